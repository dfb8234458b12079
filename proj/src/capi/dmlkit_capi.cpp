#include "dmlkit/dmlkit.h"

#include <memory>
#include <new>
#include <string>
#include <vector>

#include "dmlkit/analytics.hpp"
#include "dmlkit/fixture_server.hpp"
#include "dmlkit/metadata_parsers.hpp"
#include "dmlkit/pipeline.hpp"

using namespace dmlkit;

struct dmlkit_config {
  pipeline::PipelineConfig cfg;
};

struct dmlkit_report {
  pipeline::Report report;
  std::string text;
};

struct dmlkit_fixture_server {
  std::unique_ptr<oai::FixtureServer> server;
  std::string url;
};

struct dmlkit_citation {
  std::string journal;
  std::string volume;
  std::string issue;
  int year = 0;
  unsigned spage = 0;
  unsigned epage = 0;
};

namespace {

thread_local std::string last_error;

dmlkit_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return DMLKIT_E_INVALID_ARGUMENT;
    case ErrorKind::Io: return DMLKIT_E_IO;
    case ErrorKind::Parse: return DMLKIT_E_PARSE;
    case ErrorKind::Transport: return DMLKIT_E_TRANSPORT;
    case ErrorKind::Protocol: return DMLKIT_E_PROTOCOL;
    case ErrorKind::Validation: return DMLKIT_E_VALIDATION;
    case ErrorKind::NotFound: return DMLKIT_E_NOT_FOUND;
    case ErrorKind::Internal: return DMLKIT_E_INTERNAL;
  }
  return DMLKIT_E_INTERNAL;
}

template <typename F>
dmlkit_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return DMLKIT_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return DMLKIT_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return DMLKIT_E_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return DMLKIT_E_INTERNAL;
  }
}

void require(bool condition, const char* message) {
  if (!condition) throw InvalidArgument(message);
}

std::optional<std::string> opt(const char* s) {
  if (s == nullptr || *s == '\0') return std::nullopt;
  return std::string(s);
}

template <typename F>
dmlkit_status run_command(const dmlkit_config* cfg, dmlkit_report** out, F&& command) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "config and out must not be null");
    *out = nullptr;
    auto report = std::make_unique<dmlkit_report>();
    report->report = command(cfg->cfg);
    *out = report.release();
  });
}

}  // namespace

extern "C" {

const char* dmlkit_version(void) { return "1.0.0"; }

const char* dmlkit_last_error(void) { return last_error.c_str(); }

const char* dmlkit_status_name(dmlkit_status status) {
  switch (status) {
    case DMLKIT_OK: return "ok";
    case DMLKIT_E_INVALID_ARGUMENT: return "invalid argument";
    case DMLKIT_E_IO: return "i/o error";
    case DMLKIT_E_PARSE: return "parse error";
    case DMLKIT_E_TRANSPORT: return "transport error";
    case DMLKIT_E_PROTOCOL: return "protocol error";
    case DMLKIT_E_VALIDATION: return "validation error";
    case DMLKIT_E_NOT_FOUND: return "not found";
    case DMLKIT_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

dmlkit_status dmlkit_config_new(dmlkit_config** out) {
  return guarded([&] {
    require(out != nullptr, "out must not be null");
    *out = new dmlkit_config();
  });
}

dmlkit_status dmlkit_config_load(const char* path, dmlkit_config** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path and out must not be null");
    *out = nullptr;
    auto cfg = std::make_unique<dmlkit_config>();
    cfg->cfg = pipeline::PipelineConfig::load(path);
    *out = cfg.release();
  });
}

dmlkit_status dmlkit_config_set(dmlkit_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg != nullptr && key != nullptr && value != nullptr, "config, key and value must not be null");
    cfg->cfg.set(key, value);
  });
}

dmlkit_status dmlkit_config_add_endpoint(dmlkit_config* cfg, const char* name, const char* base_url,
                                         const char* metadata_prefix, const char* set_spec, const char* from,
                                         const char* until) {
  return guarded([&] {
    require(cfg != nullptr && name != nullptr && base_url != nullptr && metadata_prefix != nullptr,
            "config, name, base_url and metadata_prefix must not be null");
    oai::EndpointConfig e{name, base_url, metadata_prefix, opt(set_spec), opt(from), opt(until)};
    e.validate();
    for (const auto& existing : cfg->cfg.endpoints) {
      if (existing.name == e.name) throw InvalidArgument("endpoint '" + e.name + "' already present");
    }
    cfg->cfg.endpoints.push_back(std::move(e));
  });
}

size_t dmlkit_config_endpoint_count(const dmlkit_config* cfg) { return cfg ? cfg->cfg.endpoints.size() : 0; }

void dmlkit_config_free(dmlkit_config* cfg) { delete cfg; }

int dmlkit_report_exit_code(const dmlkit_report* report) {
  return report ? report->report.exit_code : pipeline::kExitUsage;
}

const char* dmlkit_report_text(dmlkit_report* report, int verbose) {
  if (report == nullptr) return "";
  report->text = report->report.text(verbose != 0);
  return report->text.c_str();
}

const char* dmlkit_report_json(const dmlkit_report* report) {
  return report ? report->report.json.c_str() : "";
}

size_t dmlkit_report_warning_count(const dmlkit_report* report) {
  return report ? report->report.warnings.size() : 0;
}

void dmlkit_report_free(dmlkit_report* report) { delete report; }

dmlkit_status dmlkit_harvest(const dmlkit_config* cfg, const char* const* names, size_t count,
                             dmlkit_report** out) {
  std::vector<std::string> selected;
  for (size_t i = 0; names != nullptr && i < count; ++i) {
    if (names[i] != nullptr) selected.emplace_back(names[i]);
  }
  return run_command(cfg, out, [&](const auto& c) { return pipeline::cmd_harvest(c, selected); });
}

dmlkit_status dmlkit_transform(const dmlkit_config* cfg, dmlkit_report** out) {
  return run_command(cfg, out, [](const auto& c) { return pipeline::cmd_transform(c); });
}

dmlkit_status dmlkit_enrich(const dmlkit_config* cfg, dmlkit_report** out) {
  return run_command(cfg, out, [](const auto& c) { return pipeline::cmd_enrich(c); });
}

dmlkit_status dmlkit_export(const dmlkit_config* cfg, const dmlkit_export_options* options,
                            dmlkit_report** out) {
  return run_command(cfg, out, [&](const auto& c) {
    require(options != nullptr && options->format != nullptr, "export options need a format");
    pipeline::ExportOptions o;
    o.format = pipeline::parse_export_format(options->format);
    if (auto v = opt(options->name)) o.name = *v;
    if (auto v = opt(options->title)) o.title = *v;
    if (auto v = opt(options->portal_base)) o.portal_base = *v;
    o.deposit_url = opt(options->deposit_url);
    return pipeline::cmd_export(c, o);
  });
}

dmlkit_status dmlkit_stats(const dmlkit_config* cfg, const char* totals_path, const char* counts_path,
                           dmlkit_report** out) {
  return run_command(cfg, out, [&](const auto& c) {
    pipeline::StatsOptions o;
    if (auto v = opt(totals_path)) o.totals = *v;
    if (auto v = opt(counts_path)) o.counts = *v;
    return pipeline::cmd_stats(c, o);
  });
}

dmlkit_status dmlkit_hits(const dmlkit_config* cfg, const dmlkit_hits_options* options, dmlkit_report** out) {
  return run_command(cfg, out, [&](const auto& c) {
    require(options != nullptr, "hits options must not be null");
    pipeline::HitsCommandOptions o;
    o.from = options->from_year;
    o.to = options->to_year;
    o.window = options->window == 0 ? 10 : options->window;
    for (size_t i = 0; options->nodes != nullptr && i < options->node_count; ++i) {
      require(options->nodes[i] != nullptr, "null node name");
      o.nodes.emplace_back(options->nodes[i]);
    }
    o.convention = options->convention == DMLKIT_HITS_KLEINBERG ? analytics::HitsConvention::Kleinberg
                                                                : analytics::HitsConvention::Default;
    o.self_loops = options->exclude_self_loops == 0;
    return pipeline::cmd_hits(c, o);
  });
}

dmlkit_status dmlkit_fixture_server_start(const char* dir, size_t page_size, const char* host, int port,
                                          dmlkit_fixture_server** out) {
  return guarded([&] {
    require(dir != nullptr && out != nullptr, "dir and out must not be null");
    require(page_size > 0, "page size must be positive");
    require(port >= 0 && port <= 65535, "port out of range");
    *out = nullptr;
    auto handle = std::make_unique<dmlkit_fixture_server>();
    handle->server = oai::serve_fixtures(dir, page_size, host ? host : "127.0.0.1", port);
    handle->url = handle->server->base_url();
    *out = handle.release();
  });
}

int dmlkit_fixture_server_port(const dmlkit_fixture_server* server) {
  return server && server->server ? server->server->port() : 0;
}

const char* dmlkit_fixture_server_url(const dmlkit_fixture_server* server) {
  return server ? server->url.c_str() : "";
}

size_t dmlkit_fixture_server_requests(const dmlkit_fixture_server* server) {
  return server && server->server ? server->server->requests_served() : 0;
}

void dmlkit_fixture_server_stop(dmlkit_fixture_server* server) {
  if (server && server->server) server->server->stop();
}

void dmlkit_fixture_server_free(dmlkit_fixture_server* server) { delete server; }

dmlkit_status dmlkit_parse_citation(const char* text, dmlkit_citation** out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "text and out must not be null");
    *out = nullptr;
    const auto c = parsers::parse_citation_string(text);
    auto handle = std::make_unique<dmlkit_citation>();
    handle->journal = c.journal_title;
    handle->volume = c.volume.value_or("");
    handle->issue = c.issue.value_or("");
    handle->year = c.year.value_or(0);
    handle->spage = c.spage.value_or(0);
    handle->epage = c.epage.value_or(0);
    *out = handle.release();
  });
}

const char* dmlkit_citation_journal(const dmlkit_citation* c) { return c ? c->journal.c_str() : ""; }
const char* dmlkit_citation_volume(const dmlkit_citation* c) { return c ? c->volume.c_str() : ""; }
const char* dmlkit_citation_issue(const dmlkit_citation* c) { return c ? c->issue.c_str() : ""; }
int dmlkit_citation_year(const dmlkit_citation* c) { return c ? c->year : 0; }
unsigned dmlkit_citation_spage(const dmlkit_citation* c) { return c ? c->spage : 0; }
unsigned dmlkit_citation_epage(const dmlkit_citation* c) { return c ? c->epage : 0; }
void dmlkit_citation_free(dmlkit_citation* c) { delete c; }

dmlkit_status dmlkit_hits_dense(const double* weights, size_t n, dmlkit_hits_convention convention, double* hub,
                                double* authority, int* non_unique) {
  return guarded([&] {
    require(n == 0 || (weights != nullptr && hub != nullptr && authority != nullptr),
            "weights, hub and authority must not be null");
    analytics::HitsOptions o;
    o.convention = convention == DMLKIT_HITS_KLEINBERG ? analytics::HitsConvention::Kleinberg
                                                       : analytics::HitsConvention::Default;
    const auto r = analytics::hits_dense(std::span<const double>(weights, n * n), n, o);
    std::copy(r.hub.begin(), r.hub.end(), hub);
    std::copy(r.authority.begin(), r.authority.end(), authority);
    if (non_unique) *non_unique = r.non_unique ? 1 : 0;
  });
}

dmlkit_status dmlkit_field_share_basis_points(uint64_t count, uint64_t total, uint64_t* out) {
  return guarded([&] {
    require(out != nullptr, "out must not be null");
    if (count > total) throw ValidationError("count exceeds total");
    *out = analytics::truncated_basis_points(count, total);
  });
}

}  // extern "C"
