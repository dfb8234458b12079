#include "dmlkit/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dmlkit/enrichment.hpp"
#include "dmlkit/metadata_parsers.hpp"
#include "dmlkit/record_model.hpp"
#include "dmlkit/serializers.hpp"
#include "dmlkit/text.hpp"

namespace dmlkit::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kEndpointFile = "_endpoint.json";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

bool is_safe_name(const std::string& name) {
  static const std::regex pattern("[A-Za-z0-9][A-Za-z0-9_.-]*");
  return std::regex_match(name, pattern);
}

fs::path resolve(const fs::path& base, const std::string& value) {
  fs::path p(value);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

std::string dump(const json& j) { return j.dump(2, ' ', false, json::error_handler_t::replace); }

void require_path(const fs::path& p, const char* key) {
  if (p.empty()) throw UsageError(std::string("config key '") + key + "' is required for this command");
}

std::vector<CanonicalRecord> load_store(const fs::path& path, std::vector<std::string>& warnings) {
  auto loaded = load_records(path, true);
  for (auto& w : loaded.warnings) warnings.push_back(std::move(w));
  return std::move(loaded.records);
}

oai::EndpointConfig endpoint_from_json(const json& j) {
  if (!j.is_object()) throw UsageError("each endpoint must be a JSON object");
  oai::EndpointConfig e;
  const auto str = [&j](const char* key) -> std::optional<std::string> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    if (!j.at(key).is_string()) throw UsageError(std::string("endpoint key '") + key + "' must be a string");
    return j.at(key).get<std::string>();
  };
  e.name = str("name").value_or("");
  e.base_url = str("base_url").value_or("");
  e.metadata_prefix = str("metadata_prefix").value_or("");
  e.set_spec = str("set");
  e.from_date = str("from");
  e.until_date = str("until");
  for (const auto& [key, value] : j.items()) {
    static const std::set<std::string> known{"name", "base_url", "metadata_prefix", "set", "from", "until"};
    if (!known.count(key)) throw UsageError("unknown endpoint key '" + key + "'");
  }
  return e;
}

void validate_endpoints(const std::vector<oai::EndpointConfig>& endpoints) {
  std::set<std::string> names;
  for (const auto& e : endpoints) {
    try {
      e.validate();
    } catch (const Error& err) {
      throw UsageError(err.what());
    }
    if (!is_safe_name(e.name)) throw UsageError("endpoint name '" + e.name + "' is not a plain file name");
    if (!names.insert(e.name).second) throw UsageError("endpoint '" + e.name + "' listed twice");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

PipelineConfig PipelineConfig::load(const fs::path& path) {
  std::string content;
  try {
    content = read_file(path);
  } catch (const IoError& e) {
    throw UsageError(e.what());
  }
  return parse(content, path.parent_path());
}

PipelineConfig PipelineConfig::parse(const std::string& text_json, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(text_json);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  PipelineConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "endpoints") {
      if (!value.is_array()) throw UsageError("'endpoints' must be an array");
      for (const auto& e : value) cfg.endpoints.push_back(endpoint_from_json(e));
    } else if (key == "request_delay_ms" || key == "max_retries") {
      if (!value.is_number_integer() || value.get<long long>() < 0) {
        throw UsageError("'" + key + "' must be a non-negative integer");
      }
      cfg.set(key, std::to_string(value.get<long long>()));
    } else {
      if (!value.is_string()) throw UsageError("'" + key + "' must be a string");
      // paths in the file are relative to the file
      cfg.set(key, resolve(base_dir, value.get<std::string>()).string());
    }
  }
  validate_endpoints(cfg.endpoints);
  return cfg;
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
  if (key == "spool_dir") {
    spool_dir = value;
  } else if (key == "store") {
    store_path = value;
  } else if (key == "enriched_store") {
    enriched_store_path = value;
  } else if (key == "mr_table") {
    mr_table_path = value;
  } else if (key == "totals") {
    totals_path = value;
  } else if (key == "output_dir") {
    output_dir = value;
  } else if (key == "request_delay_ms" || key == "max_retries") {
    const auto n = text::parse_unsigned(value);
    if (!n) throw UsageError("'" + key + "' must be a non-negative integer");
    if (key == "max_retries") {
      harvest.max_retries = static_cast<int>(*n);
    } else {
      harvest.request_delay = std::chrono::milliseconds(*n);
    }
  } else {
    throw UsageError("unknown config key '" + key + "'");
  }
}

fs::path PipelineConfig::effective_enriched_store() const {
  if (!enriched_store_path.empty()) return enriched_store_path;
  require_path(store_path, "store");
  auto p = store_path;
  const auto ext = p.extension().string();
  p.replace_extension();
  return p.string() + ".enriched" + ext;
}

fs::path analysis_input(const PipelineConfig& config) {
  if (!config.enriched_store_path.empty() || !config.store_path.empty()) {
    const auto enriched = config.effective_enriched_store();
    if (fs::exists(enriched)) return enriched;
  }
  require_path(config.store_path, "store");
  return config.store_path;
}

std::string Report::text(bool verbose) const {
  std::string out;
  for (const auto& line : summary) out += line + "\n";
  for (const auto& line : warnings) out += "warning: " + line + "\n";
  if (verbose) {
    for (const auto& line : details) out += "  " + line + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// harvest

namespace {

struct EndpointOutcome {
  std::string name;
  bool ok = false;
  std::size_t records = 0;
  std::size_t pages = 0;
  std::size_t served = 0;
  bool restarted = false;
  std::string error;
};

EndpointOutcome harvest_one(const oai::EndpointConfig& endpoint, const fs::path& spool,
                            const oai::HarvestOptions& options) {
  EndpointOutcome out;
  out.name = endpoint.name;
  try {
    http::HttplibTransport transport;
    auto result = oai::harvest(endpoint, transport, options);
    const auto dir = spool / endpoint.name;
    const auto staging = spool / (endpoint.name + ".partial");
    std::error_code ec;
    fs::remove_all(staging, ec);
    make_dirs(staging);
    oai::EnvelopeOptions env;
    env.request_url = endpoint.base_url;
    env.metadata_prefix = endpoint.metadata_prefix;
    for (std::size_t i = 0; i < result.records.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "rec-%06zu.xml", i + 1);
      write_file(staging / name, oai::serialize_list_records({result.records[i]}, env));
    }
    json meta{{"name", endpoint.name},
              {"base_url", endpoint.base_url},
              {"metadata_prefix", endpoint.metadata_prefix},
              {"records", result.records.size()}};
    write_file(staging / kEndpointFile, dump(meta) + "\n");
    fs::remove_all(dir, ec);
    if (ec) throw IoError("cannot clear " + dir.string() + ": " + ec.message());
    fs::rename(staging, dir, ec);
    if (ec) throw IoError("cannot move spool into " + dir.string() + ": " + ec.message());
    out.ok = true;
    out.records = result.records.size();
    out.pages = result.pages;
    out.served = result.served;
    out.restarted = result.restarted;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

Report cmd_harvest(const PipelineConfig& config, const std::vector<std::string>& names) {
  require_path(config.spool_dir, "spool_dir");
  std::vector<const oai::EndpointConfig*> selected;
  for (const auto& name : names) {
    const auto it = std::find_if(config.endpoints.begin(), config.endpoints.end(),
                                 [&](const auto& e) { return e.name == name; });
    if (it == config.endpoints.end()) throw UsageError("no endpoint named '" + name + "' in config");
  }
  for (const auto& e : config.endpoints) {
    if (names.empty() || std::find(names.begin(), names.end(), e.name) != names.end()) {
      selected.push_back(&e);
    }
  }
  if (selected.empty()) throw UsageError("no endpoints to harvest");
  make_dirs(config.spool_dir);

  std::vector<std::future<EndpointOutcome>> jobs;
  for (const auto* e : selected) {
    jobs.push_back(std::async(std::launch::async, harvest_one, std::cref(*e), std::cref(config.spool_dir),
                              std::cref(config.harvest)));
  }
  Report report;
  json endpoints = json::array();
  std::size_t failed = 0;
  for (auto& job : jobs) {
    const auto out = job.get();
    if (out.ok) {
      report.summary.push_back(out.name + ": " + std::to_string(out.records) + " records, 0 errors");
      report.details.push_back(out.name + ": " + std::to_string(out.pages) + " pages, " +
                               std::to_string(out.served) + " served" +
                               (out.restarted ? ", restarted after token rejection" : ""));
    } else {
      ++failed;
      report.summary.push_back(out.name + ": 0 records, 1 errors");
      report.warnings.push_back(out.name + ": " + out.error);
    }
    json j{{"name", out.name}, {"ok", out.ok}, {"records", out.records}, {"pages", out.pages},
           {"served", out.served}, {"restarted", out.restarted}};
    if (!out.ok) j["error"] = out.error;
    endpoints.push_back(std::move(j));
  }
  report.exit_code = failed ? kExitPartial : kExitOk;
  report.json = dump(json{{"command", "harvest"}, {"endpoints", endpoints}, {"exit_code", report.exit_code}});
  return report;
}

// ---------------------------------------------------------------------------
// transform

Report cmd_transform(const PipelineConfig& config) {
  require_path(config.spool_dir, "spool_dir");
  require_path(config.store_path, "store");
  if (!fs::is_directory(config.spool_dir)) {
    throw Error(ErrorKind::NotFound, "spool directory " + config.spool_dir.string() + " does not exist");
  }
  std::vector<fs::path> endpoint_dirs;
  for (const auto& entry : fs::directory_iterator(config.spool_dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / kEndpointFile)) endpoint_dirs.push_back(entry.path());
  }
  std::sort(endpoint_dirs.begin(), endpoint_dirs.end());

  Report report;
  std::vector<CanonicalRecord> incoming;
  std::set<std::string> deleted_ids;
  std::size_t files = 0;
  std::size_t failures = 0;
  json per_endpoint = json::array();
  for (const auto& dir : endpoint_dirs) {
    json meta;
    try {
      meta = json::parse(read_file(dir / kEndpointFile));
    } catch (const std::exception& e) {
      ++failures;
      report.warnings.push_back(dir.filename().string() + ": unreadable " + kEndpointFile + ": " + e.what());
      continue;
    }
    const auto source = meta.value("name", dir.filename().string());
    const auto prefix = meta.value("metadata_prefix", std::string());
    std::vector<fs::path> envelopes;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".xml") envelopes.push_back(entry.path());
    }
    std::sort(envelopes.begin(), envelopes.end());
    std::size_t stored = 0;
    std::size_t endpoint_failures = 0;
    for (const auto& file : envelopes) {
      ++files;
      std::vector<oai::OaiRecord> records;
      try {
        records = oai::parse_oai_envelope(read_file(file));
      } catch (const std::exception& e) {
        ++endpoint_failures;
        report.warnings.push_back(source + ": " + file.filename().string() + ": " + e.what());
        continue;
      }
      for (const auto& rec : records) {
        if (rec.deleted) {
          deleted_ids.insert(make_record_id(source, rec.identifier));
          continue;
        }
        try {
          if (!rec.payload) throw ValidationError("record has no metadata");
          if (prefix == oai::kPrefixOaiDc) {
            incoming.push_back(canonical_from_dc(parsers::parse_oai_dc(*rec.payload), source, rec.identifier));
          } else if (prefix == oai::kPrefixJunii2) {
            incoming.push_back(
                canonical_from_junii2(parsers::parse_junii2(*rec.payload), source, rec.identifier));
          } else {
            throw ValidationError("unsupported metadata prefix '" + prefix + "'");
          }
          incoming.back().datestamp = rec.datestamp;
          incoming.back().validate();
          ++stored;
        } catch (const std::exception& e) {
          ++endpoint_failures;
          report.warnings.push_back(source + ": " + rec.identifier + ": " + e.what());
        }
      }
    }
    failures += endpoint_failures;
    report.details.push_back(source + ": " + std::to_string(stored) + " records from " +
                             std::to_string(envelopes.size()) + " envelopes");
    per_endpoint.push_back({{"name", source}, {"records", stored}, {"failures", endpoint_failures}});
  }
  if (files == 0) {
    throw Error(ErrorKind::NotFound, "spool " + config.spool_dir.string() + " holds no harvested envelopes");
  }

  std::vector<CanonicalRecord> base;
  if (fs::exists(config.store_path)) base = load_store(config.store_path, report.warnings);
  auto merged = merge_records(std::move(base), incoming);
  const auto before = merged.size();
  std::erase_if(merged, [&](const CanonicalRecord& r) { return deleted_ids.count(r.record_id) > 0; });
  const auto removed = before - merged.size();
  make_dirs(config.store_path.has_parent_path() ? config.store_path.parent_path() : fs::path("."));
  store_records(merged, config.store_path, StoreMode::Overwrite);

  report.summary.push_back(std::to_string(incoming.size()) + " records transformed, " +
                           std::to_string(failures) + " failed, " + std::to_string(removed) +
                           " deleted; store holds " + std::to_string(merged.size()));
  report.exit_code = failures ? kExitPartial : kExitOk;
  report.json = dump(json{{"command", "transform"},
                          {"transformed", incoming.size()},
                          {"failed", failures},
                          {"deleted", removed},
                          {"store_records", merged.size()},
                          {"endpoints", per_endpoint},
                          {"exit_code", report.exit_code}});
  return report;
}

// ---------------------------------------------------------------------------
// enrich

Report cmd_enrich(const PipelineConfig& config) {
  require_path(config.store_path, "store");
  require_path(config.mr_table_path, "mr_table");
  Report report;
  auto records = load_store(config.store_path, report.warnings);
  const auto table = enrichment::load_mr_table(config.mr_table_path);
  auto result = enrichment::enrich(std::move(records), table);
  const auto out = config.effective_enriched_store();
  make_dirs(out.has_parent_path() ? out.parent_path() : fs::path("."));
  store_records(result.records, out, StoreMode::Overwrite);
  const auto& r = result.report;
  report.summary.push_back(std::to_string(r.matched) + " matched, " + std::to_string(r.unmatched) +
                           " unmatched, " + std::to_string(r.skipped) + " without a match key");
  report.details = r.diagnostics;
  report.json = dump(json{{"command", "enrich"},
                          {"matched", r.matched},
                          {"unmatched", r.unmatched},
                          {"skipped", r.skipped},
                          {"output", out.string()},
                          {"exit_code", 0}});
  return report;
}

// ---------------------------------------------------------------------------
// export

ExportFormat parse_export_format(const std::string& name) {
  if (name == "eprints") return ExportFormat::Eprints;
  if (name == "ore") return ExportFormat::Ore;
  if (name == "mets") return ExportFormat::Mets;
  throw UsageError("unknown export format '" + name + "' (expected eprints, ore or mets)");
}

Report cmd_export(const PipelineConfig& config, const ExportOptions& options) {
  require_path(config.output_dir, "output_dir");
  Report report;
  const auto input = analysis_input(config);
  const auto records = load_store(input, report.warnings);
  json files = json::array();
  std::size_t failures = 0;

  if (options.format == ExportFormat::Ore) {
    if (!is_safe_name(options.name)) throw UsageError("aggregation name '" + options.name + "' is not a plain file name");
    const auto dir = config.output_dir / "ore";
    make_dirs(dir);
    serializers::Aggregation agg;
    agg.resource_map_uri = options.portal_base + "/" + options.name + ".atom";
    agg.title = options.title;
    std::set<std::string> seen;
    std::string latest;
    for (const auto& rec : records) {
      if (!seen.insert(rec.official_url).second) {
        report.warnings.push_back("duplicate resource " + rec.official_url + " skipped");
        continue;
      }
      agg.aggregated.push_back({rec.official_url, rec.title});
      if (rec.datestamp) latest = std::max(latest, *rec.datestamp);
    }
    // timestamps come from the data so reruns are byte-identical
    if (latest.size() == 10) latest += "T00:00:00Z";
    agg.created = latest.empty() ? "1970-01-01T00:00:00Z" : latest;
    agg.modified = agg.created;
    const auto path = dir / (options.name + ".ore.atom.xml");
    write_file(path, serializers::to_ore_atom(agg));
    files.push_back(path.string());
    report.summary.push_back("wrote " + path.string() + " with " + std::to_string(agg.aggregated.size()) +
                             " aggregated resources");
  } else {
    const bool mets = options.format == ExportFormat::Mets;
    const auto dir = config.output_dir / (mets ? "mets" : "eprints");
    make_dirs(dir);
    std::unique_ptr<http::HttplibTransport> transport;
    if (options.deposit_url) {
      if (!mets) throw UsageError("--deposit-url applies to the mets format only");
      if (!text::is_absolute_http_url(*options.deposit_url)) throw UsageError("deposit URL is not absolute");
      transport = std::make_unique<http::HttplibTransport>();
    }
    std::size_t written = 0;
    std::size_t deposited = 0;
    for (const auto& rec : records) {
      try {
        const auto doc = mets ? serializers::to_mets(rec) : serializers::to_eprints_xml(rec);
        const auto path = dir / (rec.record_id + (mets ? ".mets.xml" : ".eprints.xml"));
        write_file(path, doc);
        files.push_back(path.string());
        ++written;
        if (transport) {
          const auto result = serializers::deposit_package(*transport, *options.deposit_url, doc);
          if (result.status < 200 || result.status >= 300) {
            throw Error(ErrorKind::Transport, "deposit answered HTTP " + std::to_string(result.status));
          }
          ++deposited;
        }
      } catch (const std::exception& e) {
        ++failures;
        report.warnings.push_back(rec.oai_identifier + ": " + e.what());
      }
    }
    report.summary.push_back("wrote " + std::to_string(written) + (mets ? " METS" : " EPrints") +
                             " documents to " + dir.string());
    if (transport) report.summary.push_back("deposited " + std::to_string(deposited) + " packages");
  }
  report.exit_code = failures ? kExitPartial : kExitOk;
  report.details.push_back("input " + input.string());
  report.json = dump(json{{"command", "export"}, {"files", files}, {"failed", failures},
                          {"exit_code", report.exit_code}});
  return report;
}

// ---------------------------------------------------------------------------
// stats

Report cmd_stats(const PipelineConfig& config, const StatsOptions& options) {
  const auto totals_path = options.totals.value_or(config.totals_path);
  require_path(totals_path, "totals");
  Report report;
  const auto totals = analytics::load_field_counts(totals_path);
  analytics::FieldCounts counts;
  if (options.counts) {
    counts = analytics::load_field_counts(*options.counts);
  } else {
    const auto records = load_store(analysis_input(config), report.warnings);
    counts = analytics::count_primary_fields(records);
  }
  const auto rows = analytics::field_share_rows(counts, totals);
  const auto table = analytics::format_share_table(rows);
  std::istringstream lines(table);
  for (std::string line; std::getline(lines, line);) report.summary.push_back(line);
  if (!config.output_dir.empty()) {
    const auto dir = config.output_dir / "stats";
    make_dirs(dir);
    write_file(dir / "field_share.txt", table);
    write_file(dir / "field_share.csv", analytics::share_table_csv(rows));
    report.details.push_back("wrote " + (dir / "field_share.csv").string());
  }
  json jrows = json::array();
  for (const auto& r : rows) {
    jrows.push_back({{"msc2", r.msc2}, {"count", r.count}, {"total", r.total}, {"percent", r.percent_text()}});
  }
  report.json = dump(json{{"command", "stats"}, {"rows", jrows}, {"exit_code", 0}});
  return report;
}

// ---------------------------------------------------------------------------
// hits

Report cmd_hits(const PipelineConfig& config, const HitsCommandOptions& options) {
  require_path(config.output_dir, "output_dir");
  if (options.from > options.to) throw UsageError("--from is after --to");
  if (options.window < 1) throw UsageError("--window must be at least 1");
  for (const auto& node : options.nodes) {
    if (node.size() != 2 || !text::all_digits(node)) throw UsageError("node '" + node + "' is not a two-digit MSC field");
  }
  Report report;
  const auto records = load_store(analysis_input(config), report.warnings);
  if (records.empty()) report.warnings.push_back("store is empty; every score is zero");
  analytics::HitsOptions hits_options;
  hits_options.convention = options.convention;
  analytics::GraphOptions graph_options;
  graph_options.include_self_loops = options.self_loops;
  const auto series = analytics::sliding_window_series(records, options.from, options.to, options.window,
                                                       hits_options, graph_options);
  for (const auto& e : series.entries) {
    if (e.hits.non_unique) {
      report.warnings.push_back(std::to_string(e.year) + ": dominant eigenvalue is repeated; scores depend on the start vector");
    }
    if (!e.hits.converged) report.warnings.push_back(std::to_string(e.year) + ": power iteration did not converge");
  }
  const auto exported = analytics::export_series(series, config.output_dir / "hits", options.nodes);
  report.summary.push_back("wrote " + exported.csv.string() + " (" + std::to_string(exported.rows) + " rows) and " +
                           std::to_string(exported.charts.size()) + " charts");
  json charts = json::array();
  for (const auto& c : exported.charts) charts.push_back(c.string());
  report.json = dump(json{{"command", "hits"},
                          {"csv", exported.csv.string()},
                          {"charts", charts},
                          {"windows", series.entries.size()},
                          {"exit_code", 0}});
  return report;
}

}  // namespace dmlkit::pipeline
