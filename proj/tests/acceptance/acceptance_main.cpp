// One PASS/FAIL line per acceptance criterion. Exit status is non-zero when
// any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dmlkit/analytics.hpp"
#include "dmlkit/enrichment.hpp"
#include "dmlkit/fixture_server.hpp"
#include "dmlkit/metadata_parsers.hpp"
#include "dmlkit/oai_record.hpp"
#include "dmlkit/pipeline.hpp"
#include "dmlkit/serializers.hpp"
#include "dmlkit/xml.hpp"
#include "support.hpp"

using namespace dmlkit;
namespace t = dmlkit::testing;
namespace a = dmlkit::analytics;

namespace {

/// Collects failed expectations of one criterion.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  template <typename A, typename B>
  void equal(const A& actual, const B& expected, const std::string& what) {
    if (actual == expected) {
      expect(true, what);
    } else {
      std::ostringstream os;
      os << what << ": got '" << actual << "', want '" << expected << "'";
      expect(false, os.str());
    }
  }
  std::size_t checks() const { return checks_; }
  std::size_t failed() const { return failed_; }
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  std::size_t checks_ = 0;
  std::size_t failed_ = 0;
  std::vector<std::string> failures_;
};

std::string opt(const std::optional<std::string>& s) { return s.value_or("<none>"); }

oai::OaiRecord envelope(const std::string& fixture) {
  return oai::parse_oai_envelope(t::read_file(t::fixture(fixture))).at(0);
}

// 1 ---------------------------------------------------------------------------

void fixture_fidelity(Checker& c) {
  const auto dc_env = envelope("oai_dc/01-euclid-jmsj-1240435759.xml");
  c.equal(dc_env.identifier, "oai:CULeuclid:euclid.jmsj/1240435759", "dc header identifier");
  const auto dc = parsers::parse_oai_dc(*dc_env.payload);
  c.equal(dc.title, "Minimal 2-regular digraphs with given girth", "dc title");
  c.expect(dc.creators == std::vector<std::string>{"BEHZAD, Mehdi"}, "dc creator");
  c.expect(dc.subjects == std::vector<std::string>{"05C20"}, "dc subject");
  c.expect(dc.identifiers == std::vector<std::string>{"http://projecteuclid.org/euclid.jmsj/1240435759",
                                                      "J. Math. Soc. Japan 25, no. 1 (1973), 1-6",
                                                      "doi:10.2969/jmsj/02510001"},
           "dc identifiers");
  const auto dc_rec = canonical_from_dc(dc, "euclid", dc_env.identifier);
  c.equal(dc_rec.official_url, "http://projecteuclid.org/euclid.jmsj/1240435759", "dc official url");
  c.equal(dc_rec.publication, "J. Math. Soc. Japan", "dc journal");
  c.equal(opt(dc_rec.volume), "25", "dc volume");
  c.equal(opt(dc_rec.issue), "1", "dc issue");
  c.equal(opt(dc_rec.pagerange), "1-6", "dc pages");
  c.expect(dc_rec.date && dc_rec.date->iso() == "1973-01", "dc date");
  c.expect(dc_rec.creators.size() == 1 && dc_rec.creators[0].family == "BEHZAD" &&
               dc_rec.creators[0].given == "Mehdi",
           "dc creator name parts");
  c.expect(dc_rec.related_urls == std::vector<RelatedUrl>{{"doi:10.2969/jmsj/02510001", "doi"}}, "dc doi");

  const auto jn_env = envelope("junii2/01-ocha-10083-843.xml");
  c.equal(jn_env.identifier, "oai:teapot.lib.ocha.ac.jp:10083/843", "junii2 header identifier");
  const auto jn = parsers::parse_junii2(*jn_env.payload);
  c.equal(jn.title, "CONDITIONALLY TRIMMED SUMS FOR INDEPENDENT RANDOM VARIABLES", "junii2 title");
  c.expect(jn.creators == std::vector<std::string>{"KASAHARA, Yuji"}, "junii2 creator");
  c.equal(jn.uri, "http://hdl.handle.net/10083/843", "junii2 URI");
  c.equal(jn.full_text_url, "http://teapot.lib.ocha.ac.jp/ocha/bitstream/10083/843/1/KJ00004470846.pdf",
          "junii2 fulltextURL");
  c.equal(jn.issn, "00298190", "junii2 issn");
  c.equal(jn.ncid, "AN00033958", "junii2 NCID");
  c.equal(jn.jtitle, "Natur. Sci. Rep. Ochanomizu Univ.", "junii2 jtitle");
  c.equal(jn.volume, "46", "junii2 volume");
  c.equal(jn.issue, "2", "junii2 issue");
  c.equal(jn.spage, "9", "junii2 spage");
  c.equal(jn.epage, "12", "junii2 epage");
  c.equal(jn.date_of_issued, "1995-12-30", "junii2 dateofissued");
  const auto jn_rec = canonical_from_junii2(jn, "ocha", jn_env.identifier);
  c.equal(opt(jn_rec.pagerange), "9-12", "junii2 canonical pages");
  c.equal(jn_rec.official_url, "http://hdl.handle.net/10083/843", "junii2 canonical url");

  const auto ep = serializers::from_eprints_xml(t::read_file(t::fixture("eprints/horie-10083-839.eprints.xml")));
  c.equal(ep.title, "Note on the Schur multiplier of a certain semidirect product", "eprints title");
  c.expect(ep.creators.size() == 1 && ep.creators[0].family == "Horie" && ep.creators[0].given == "Mitsuko",
           "eprints creator");
  c.equal(ep.publication, "Natur. Sci. Report. Ochanomizu. Univ.", "eprints publication");
  c.equal(ep.official_url, "http://hdl.handle.net/10083/839", "eprints official_url");
  c.equal(opt(ep.volume), "45", "eprints volume");
  c.equal(opt(ep.pagerange), "85-88", "eprints pagerange");
  c.expect(ep.date && ep.date->iso() == "1994-12-15", "eprints date");
  c.expect(ep.msc_primary && ep.msc_primary->str() == "20J06", "eprints msc_p");
  c.expect(ep.msc_secondary.size() == 1 && ep.msc_secondary[0].str() == "20C25", "eprints msc");
  c.expect(ep.mr_number == std::optional<std::uint64_t>(1317509), "eprints mr");
  c.expect(ep.related_urls ==
               std::vector<RelatedUrl>{{"http://www.ams.org/mathscinet-getitem?mr=1317509", "MathSciNet"}},
           "eprints related_url");
}

// 2 ---------------------------------------------------------------------------

void share_table_criterion(Checker& c) {
  const auto rows = a::field_share_rows(a::load_field_counts(t::data_dir() / "msc_counts.tsv"),
                                        a::load_field_counts(t::data_dir() / "msc_totals.tsv"));
  const std::vector<std::pair<std::string, std::string>> expected = {
      {"57", "10.62"}, {"32", "10.00"}, {"31", "9.48"}, {"55", "9.46"}, {"14", "9.20"}, {"53", "8.15"},
      {"13", "7.68"},  {"12", "7.45"},  {"11", "6.58"}, {"22", "6.25"}, {"30", "5.84"}, {"16", "5.44"}};
  c.equal(rows.size(), expected.size(), "row count");
  for (std::size_t i = 0; i < std::min(rows.size(), expected.size()); ++i) {
    c.equal(rows[i].msc2, expected[i].first, "row " + std::to_string(i + 1) + " field");
    c.equal(rows[i].percent_text(), expected[i].second, "row " + std::to_string(i + 1) + " percent");
  }
}

// 3 ---------------------------------------------------------------------------

double norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}


void hits_oracle(Checker& c) {
  t::Rng rng(20240301);
  std::size_t compared = 0;
  for (int i = 0; i < 400; ++i) {
    const auto g = t::random_graph(rng, 10, 9);
    const auto oracle = t::oracle_hits(g.weights, g.n);
    const auto r = a::hits_dense(g.weights, g.n);
    const auto tag = "graph " + std::to_string(i);
    c.expect(r.converged, tag + " converged");
    if (oracle.hub.multiplicity == 0) {  // zero matrix
      c.expect(norm(r.hub) == 0.0 && norm(r.authority) == 0.0, tag + " zero matrix gives zero scores");
      continue;
    }
    c.expect(r.non_unique == !oracle.simple(), tag + " multiplicity detection");
    if (!oracle.simple()) continue;
    ++compared;
    c.expect(t::max_abs_diff(r.hub, oracle.hub.vector) <= 1e-8, tag + " hub vs oracle");
    c.expect(t::max_abs_diff(r.authority, oracle.authority.vector) <= 1e-8, tag + " authority vs oracle");
    const auto nodes = t::node_names(g.n);
    c.expect(a::rank(nodes, r.hub) == t::oracle_rank(nodes, oracle.hub.vector), tag + " hub rank");
    c.expect(a::rank(nodes, r.authority) == t::oracle_rank(nodes, oracle.authority.vector), tag + " authority rank");
  }
  c.expect(compared >= 200, "at least 200 graphs with a simple dominant eigenvalue (got " +
                                std::to_string(compared) + ")");
}

// 4 ---------------------------------------------------------------------------

std::vector<double> step(const std::vector<double>& m, std::size_t n, const std::vector<double>& v) {
  // normalize(M^t M v)
  std::vector<double> mv(n, 0.0), out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) mv[i] += m[i * n + j] * v[j];
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) out[j] += m[i * n + j] * mv[i];
  double s = 0;
  for (double x : out) s += x * x;
  s = std::sqrt(s);
  if (s > 0)
    for (double& x : out) x /= s;
  return out;
}

void hits_invariants(Checker& c) {
  t::Rng rng(4242);
  const a::HitsOptions options;
  for (int i = 0; i < 1000; ++i) {
    const auto g = t::random_graph(rng, 10, 9);
    const auto tag = "graph " + std::to_string(i);
    const auto r = a::hits_dense(g.weights, g.n, options);
    const bool zero = norm(g.weights) == 0.0;
    bool nonneg = true;
    for (double x : r.hub) nonneg = nonneg && x >= 0.0;
    for (double x : r.authority) nonneg = nonneg && x >= 0.0;
    c.expect(nonneg, tag + " nonnegative");
    if (zero) {
      c.expect(norm(r.hub) == 0.0 && norm(r.authority) == 0.0, tag + " zero matrix gives zero scores");
      continue;
    }
    c.expect(std::abs(norm(r.hub) - 1.0) < 1e-12 && std::abs(norm(r.authority) - 1.0) < 1e-12, tag + " unit norm");
    c.expect(r.converged && r.residual < options.tol, tag + " residual below tol");
    c.expect(t::max_abs_diff(step(g.weights, g.n, r.hub), r.hub) < 1e-8, tag + " hub is a fixed point");

    const auto nodes = t::node_names(g.n);
    for (double scale : {0.5, 3.0, 1000.0}) {
      std::vector<double> scaled = g.weights;
      for (double& w : scaled) w *= scale;
      const auto s = a::hits_dense(scaled, g.n, options);
      c.expect(a::rank(nodes, s.hub) == a::rank(nodes, r.hub) &&
                   a::rank(nodes, s.authority) == a::rank(nodes, r.authority),
               tag + " rankings invariant under scaling by " + std::to_string(scale));
    }
  }
  for (int i = 0; i < 1000; ++i) {
    const auto g = t::random_symmetric_graph(rng, 10, 9);
    const auto r = a::hits_dense(g.weights, g.n, options);
    c.expect(t::max_abs_diff(r.hub, r.authority) < 1e-10, "symmetric graph " + std::to_string(i) + " hub == authority");
  }
}

// 5 ---------------------------------------------------------------------------

CanonicalRecord dated(int year, const std::string& primary, const std::string& secondary, std::size_t serial) {
  CanonicalRecord r;
  r.source = "synthetic";
  r.oai_identifier = "oai:synthetic:" + std::to_string(serial);
  r.record_id = make_record_id(r.source, r.oai_identifier);
  r.title = "Article " + std::to_string(serial);
  r.official_url = "http://example.org/" + std::to_string(serial);
  r.date = PublicationDate{year, std::nullopt, std::nullopt};
  r.msc_primary = MscCode(primary);
  r.msc_secondary = {MscCode(secondary)};
  return r;
}

void window_semantics(Checker& c) {
  // Year y holds (y % 4) + 1 articles in field y - 1960, each citing the
  // field of the following year, so nodes and weights identify the years.
  std::vector<CanonicalRecord> records;
  std::size_t serial = 0;
  for (int year = 1970; year <= 2029; ++year) {
    const auto field = std::to_string(year - 1960);
    const auto next = std::to_string(year - 1959);
    for (int k = 0; k <= year % 4; ++k) records.push_back(dated(year, field + "A10", next + "B20", serial++));
  }
  const auto series = a::sliding_window_series(records, 1960, 2035);
  c.equal(series.entries.size(), std::size_t(76), "one entry per year");
  for (const auto& e : series.entries) {
    const auto tag = "Y=" + std::to_string(e.year);
    std::set<std::string> nodes;
    std::uint64_t weight = 0;
    for (int y = e.year; y <= e.year + 9; ++y) {
      if (y < 1970 || y > 2029) continue;
      nodes.insert(std::to_string(y - 1960));
      nodes.insert(std::to_string(y - 1959));
      weight += static_cast<std::uint64_t>(y % 4 + 1);
      c.equal(e.graph.weight(std::to_string(y - 1960), std::to_string(y - 1959)),
              static_cast<std::uint64_t>(y % 4 + 1), tag + " edge of year " + std::to_string(y));
    }
    c.expect(std::vector<std::string>(nodes.begin(), nodes.end()) == e.graph.nodes(), tag + " node set");
    c.equal(e.graph.total_weight(), weight, tag + " total weight");
    // nothing from Y-1 or Y+10
    const auto before = std::to_string(e.year - 1 - 1960);
    const auto after = std::to_string(e.year + 10 - 1960);
    if (e.year - 1 >= 1970) {
      c.expect(!e.graph.index_of(before), tag + " excludes Y-1");
    }
    if (e.year + 10 <= 2029) {
      c.expect(!e.graph.index_of(std::to_string(e.year + 11 - 1960)), tag + " excludes Y+10");
    }
    c.equal(e.graph.weight(after, std::to_string(e.year + 11 - 1960)), std::uint64_t(0), tag + " no Y+10 edge");
    // the per-window result equals a direct build over the year range
    c.expect(e.graph == a::build_msc_graph(records, a::YearRange{e.year, e.year + 9}), tag + " direct build");
  }
}

// 6 ---------------------------------------------------------------------------

void harvest_paging(Checker& c) {
  t::TempDir dir("accept-harvest");
  const auto served = t::synthetic_oai_records(11, "page");
  oai::FixtureServer server(oai::FixtureCorpus(served), 3);
  pipeline::PipelineConfig cfg;
  oai::EndpointConfig ep;
  ep.name = "fixture";
  ep.base_url = server.base_url();
  ep.metadata_prefix = "oai_dc";
  cfg.endpoints.push_back(ep);
  cfg.spool_dir = dir / "spool";
  cfg.store_path = dir / "store.jsonl";
  cfg.output_dir = dir / "out";

  const auto h = pipeline::cmd_harvest(cfg);
  c.equal(h.exit_code, 0, "harvest exit code");
  c.equal(server.requests_served(), std::size_t(4), "pages requested");
  const auto tr = pipeline::cmd_transform(cfg);
  c.equal(tr.exit_code, 0, "transform exit code");

  std::vector<CanonicalRecord> expected;
  for (const auto& r : served) {
    auto rec = canonical_from_dc(parsers::parse_oai_dc(*r.payload), "fixture", r.identifier);
    rec.datestamp = r.datestamp;
    expected.push_back(rec);
  }
  const auto stored = load_records(cfg.store_path).records;
  c.equal(stored.size(), expected.size(), "stored record count");
  std::map<std::string, CanonicalRecord> by_id;
  for (const auto& r : stored) by_id[r.record_id] = r;
  for (const auto& e : expected) {
    const auto it = by_id.find(e.record_id);
    c.expect(it != by_id.end() && it->second == e, "stored " + e.oai_identifier);
  }

  const auto bytes = t::read_file(cfg.store_path);
  c.equal(pipeline::cmd_harvest(cfg).exit_code, 0, "second harvest exit code");
  c.equal(pipeline::cmd_transform(cfg).exit_code, 0, "second transform exit code");
  c.expect(t::read_file(cfg.store_path) == bytes, "rerun leaves the store byte-identical");
}

// 7 ---------------------------------------------------------------------------

std::size_t count(const std::string& haystack, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + 1)) ++n;
  return n;
}

void serializer_contracts(Checker& c) {
  serializers::Aggregation agg;
  agg.resource_map_uri = "http://dmljp.math.sci.hokudai.ac.jp/ore/euclid.atom";
  agg.title = "Euclid";
  agg.aggregated = {{"http://projecteuclid.org/euclid.kmj/1138846413", "A remark on derived spaces"},
                    {"http://projecteuclid.org/euclid.tmj/1192117987",
                     "Spectral synthesis in the Fourier algebra and the Varopoulos algebra"}};
  agg.created = "2009-01-01T00:00:00Z";
  const auto atom = serializers::to_ore_atom(agg);
  std::string err;
  c.expect(xml::is_well_formed(atom, true, &err), "ORE well-formed " + err);
  c.equal(count(atom, "rel='http://www.openarchives.org/ore/terms/aggregates'"), std::size_t(2), "ORE link count");
  c.expect(atom.find("<atom:link href='http://projecteuclid.org/euclid.kmj/1138846413' title='A remark on derived "
                     "spaces' rel='http://www.openarchives.org/ore/terms/aggregates' />") != std::string::npos,
           "ORE first link");
  c.expect(atom.find("<atom:link href='http://projecteuclid.org/euclid.tmj/1192117987' title='Spectral synthesis "
                     "in the Fourier algebra and the Varopoulos algebra' "
                     "rel='http://www.openarchives.org/ore/terms/aggregates' />") != std::string::npos,
           "ORE second link");

  t::Rng rng(500);
  for (std::size_t i = 0; i < 500; ++i) {
    const auto rec = t::random_record(rng, i);
    const auto xml_text = serializers::to_eprints_xml(rec);
    const auto tag = "record " + std::to_string(i);
    c.expect(xml::is_well_formed(xml_text, true, &err), tag + " EPrints well-formed " + err);
    c.expect(serializers::from_eprints_xml(xml_text) == rec, tag + " EPrints round-trip");
    const auto mets = serializers::to_mets(rec);
    c.expect(xml::is_well_formed(mets, true, &err), tag + " METS well-formed " + err);
  }
  for (std::size_t n = 1; n <= 20; ++n) {
    serializers::Aggregation random_agg;
    random_agg.resource_map_uri = "http://example.org/map/" + std::to_string(n);
    random_agg.title = t::random_text(rng);
    for (std::size_t i = 0; i < n; ++i)
      random_agg.aggregated.push_back({"http://example.org/r/" + std::to_string(i), t::random_text(rng)});
    c.expect(xml::is_well_formed(serializers::to_ore_atom(random_agg), true, &err), "random ORE well-formed " + err);
  }
}

// 8 ---------------------------------------------------------------------------

void enrichment_example(Checker& c) {
  const auto env = envelope("oai_dc/04-ynu-10131-1069.xml");
  const auto maeda = canonical_from_dc(parsers::parse_oai_dc(*env.payload), "ynu", env.identifier);
  const auto table = enrichment::parse_mr_table(
      "Nat. Sci. J. Fac. Educ. Hum. Sci. Yokohama National University Sec. I\t1\t1998\t43\t1710269\t53A35\t53A04\n");
  const auto result = enrichment::enrich({maeda}, table);
  c.equal(result.report.matched, std::size_t(1), "matched");
  const auto& r = result.records.at(0);
  c.equal(r.msc_primary ? r.msc_primary->str() : "<none>", "53A35", "msc_primary");
  c.expect(r.msc_secondary.size() == 1 && r.msc_secondary[0].str() == "53A04", "msc_secondary");
  c.expect(r.mr_number == std::optional<std::uint64_t>(1710269), "mr");
  c.equal(enrichment::review_url(*r.mr_number), "http://www.ams.org/mathscinet-getitem?mr=1710269", "review url");
  c.expect(std::find(r.related_urls.begin(), r.related_urls.end(),
                     RelatedUrl{"http://www.ams.org/mathscinet-getitem?mr=1710269", "MathSciNet"}) !=
               r.related_urls.end(),
           "review url attached");
}

struct Criterion {
  int number;
  const char* name;
  double limit_seconds;
  std::function<void(Checker&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "fixture fidelity", 1, fixture_fidelity},
      {2, "field share table", 1, share_table_criterion},
      {3, "HITS oracle equivalence", 30, hits_oracle},
      {4, "HITS invariants", 60, hits_invariants},
      {5, "sliding-window semantics", 5, window_semantics},
      {6, "harvest paging", 10, harvest_paging},
      {7, "serializer contracts", 30, serializer_contracts},
      {8, "enrichment example", 1, enrichment_example},
  };
  int failed = 0;
  for (const auto& criterion : criteria) {
    Checker checker;
    const auto start = std::chrono::steady_clock::now();
    std::string exception;
    try {
      criterion.run(checker);
    } catch (const std::exception& e) {
      exception = e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < criterion.limit_seconds;
    const bool pass = exception.empty() && checker.failed() == 0 && in_time;
    std::printf("%s criterion %d (%s): %zu checks, %zu failed, %.3f s (limit %.0f s)\n", pass ? "PASS" : "FAIL",
                criterion.number, criterion.name, checker.checks(), checker.failed(), seconds,
                criterion.limit_seconds);
    if (!exception.empty()) std::printf("    exception: %s\n", exception.c_str());
    if (!in_time) std::printf("    over the time limit\n");
    for (const auto& f : checker.failures()) std::printf("    %s\n", f.c_str());
    failed += pass ? 0 : 1;
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
