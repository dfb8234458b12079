// dmlkit command-line front end. Talks to the library only through the C API.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dmlkit/dmlkit.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::atomic<bool> interrupted{false};

extern "C" void on_signal(int) { interrupted.store(true); }

int fail(dmlkit_status status) {
  std::cerr << "dmlkit: " << dmlkit_status_name(status) << ": " << dmlkit_last_error() << "\n";
  return status == DMLKIT_E_INVALID_ARGUMENT ? kExitUsage : kExitFailure;
}

struct Globals {
  std::string config;
  std::string store;
  bool verbose = false;
  bool json = false;
};

// Owns the config handle for one invocation.
class Session {
 public:
  ~Session() { dmlkit_config_free(cfg_); }

  dmlkit_status open(const Globals& g) {
    const auto status = g.config.empty() ? dmlkit_config_new(&cfg_) : dmlkit_config_load(g.config.c_str(), &cfg_);
    if (status != DMLKIT_OK) return status;
    if (!g.store.empty()) return dmlkit_config_set(cfg_, "store", g.store.c_str());
    return DMLKIT_OK;
  }

  dmlkit_config* get() const { return cfg_; }

 private:
  dmlkit_config* cfg_ = nullptr;
};

int finish(dmlkit_status status, dmlkit_report* report, const Globals& g) {
  if (status != DMLKIT_OK) return fail(status);
  if (g.json) {
    std::cout << dmlkit_report_json(report) << "\n";
  } else {
    std::cout << dmlkit_report_text(report, g.verbose ? 1 : 0);
  }
  const int code = dmlkit_report_exit_code(report);
  dmlkit_report_free(report);
  return code;
}

template <typename F>
int run(const Globals& g, F&& command) {
  Session session;
  if (const auto status = session.open(g); status != DMLKIT_OK) return fail(status);
  dmlkit_report* report = nullptr;
  const auto status = command(session.get(), &report);
  return finish(status, report, g);
}

std::vector<const char*> c_strings(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  out.reserve(v.size());
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

int serve(const std::string& dir, std::size_t page_size, const std::string& host, int port) {
  dmlkit_fixture_server* server = nullptr;
  if (const auto status = dmlkit_fixture_server_start(dir.c_str(), page_size, host.c_str(), port, &server);
      status != DMLKIT_OK) {
    return fail(status);
  }
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << dmlkit_fixture_server_url(server) << std::endl;
  while (!interrupted.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  dmlkit_fixture_server_stop(server);
  std::cerr << "served " << dmlkit_fixture_server_requests(server) << " requests\n";
  dmlkit_fixture_server_free(server);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harvest, normalize, enrich and analyse mathematical article metadata"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dmlkit_version()));

  Globals g;
  app.add_option("--config", g.config, "Pipeline config file (JSON)");
  app.add_option("--store", g.store, "Record store path, overrides the config");
  app.add_flag("-v,--verbose", g.verbose, "Print per-item details");
  app.add_flag("--json", g.json, "Print the report as JSON");

  std::vector<std::string> endpoints;
  auto* harvest = app.add_subcommand("harvest", "Harvest OAI-PMH endpoints into the spool");
  harvest->add_option("-e,--endpoint", endpoints, "Only these endpoints (repeatable)");

  auto* transform = app.add_subcommand("transform", "Parse spooled records into the store");
  auto* enrich = app.add_subcommand("enrich", "Attach MR numbers and MSC codes from the lookup table");

  std::string format;
  std::string name;
  std::string title;
  std::string portal_base;
  std::string deposit_url;
  auto* export_cmd = app.add_subcommand("export", "Write EPrints XML, ORE Atom or METS documents");
  export_cmd->add_option("--format", format, "eprints, ore or mets")
      ->required()
      ->check(CLI::IsMember({"eprints", "ore", "mets"}));
  export_cmd->add_option("--name", name, "ORE aggregation name");
  export_cmd->add_option("--title", title, "ORE aggregation title");
  export_cmd->add_option("--portal-base", portal_base, "Base URI of the ORE resource map");
  export_cmd->add_option("--deposit-url", deposit_url, "POST each METS package here");

  std::string totals;
  std::string counts;
  auto* stats = app.add_subcommand("stats", "Share of articles per MSC field");
  stats->add_option("--totals", totals, "World totals per field (msc2, count)");
  stats->add_option("--counts", counts, "Use these per-field counts instead of the store");

  int from = 0;
  int to = 0;
  int window = 10;
  std::vector<std::string> nodes;
  std::string convention = "default";
  bool no_self_loops = false;
  auto* hits = app.add_subcommand("hits", "Sliding-window HITS over the MSC field graph");
  hits->add_option("--from", from, "First window start year")->required();
  hits->add_option("--to", to, "Last window start year")->required();
  hits->add_option("--window", window, "Window length in years")->capture_default_str();
  hits->add_option("--nodes", nodes, "Fields to export, e.g. 53,57")->delimiter(',');
  hits->add_option("--convention", convention, "default (hub from MtM) or kleinberg")
      ->check(CLI::IsMember({"default", "kleinberg"}))
      ->capture_default_str();
  hits->add_flag("--no-self-loops", no_self_loops, "Drop edges within one field");

  std::string fixture_dir;
  std::size_t page_size = 2;
  std::string host = "127.0.0.1";
  int port = 0;
  auto* serve_cmd = app.add_subcommand("serve-fixtures", "Serve fixture records over OAI-PMH");
  serve_cmd->add_option("--dir", fixture_dir, "Directory of OAI-PMH XML fixtures")->required();
  serve_cmd->add_option("--page-size", page_size, "Records per page")->capture_default_str();
  serve_cmd->add_option("--host", host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--port", port, "Port, 0 picks a free one")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*harvest) {
    return run(g, [&](dmlkit_config* cfg, dmlkit_report** out) {
      const auto names = c_strings(endpoints);
      return dmlkit_harvest(cfg, names.data(), names.size(), out);
    });
  }
  if (*transform) return run(g, [](dmlkit_config* cfg, dmlkit_report** out) { return dmlkit_transform(cfg, out); });
  if (*enrich) return run(g, [](dmlkit_config* cfg, dmlkit_report** out) { return dmlkit_enrich(cfg, out); });
  if (*export_cmd) {
    return run(g, [&](dmlkit_config* cfg, dmlkit_report** out) {
      const dmlkit_export_options o{format.c_str(), name.c_str(), title.c_str(), portal_base.c_str(),
                                    deposit_url.c_str()};
      return dmlkit_export(cfg, &o, out);
    });
  }
  if (*stats) {
    return run(g, [&](dmlkit_config* cfg, dmlkit_report** out) {
      return dmlkit_stats(cfg, totals.c_str(), counts.c_str(), out);
    });
  }
  if (*hits) {
    return run(g, [&](dmlkit_config* cfg, dmlkit_report** out) {
      const auto node_ptrs = c_strings(nodes);
      dmlkit_hits_options o{};
      o.from_year = from;
      o.to_year = to;
      o.window = window;
      o.nodes = node_ptrs.data();
      o.node_count = node_ptrs.size();
      o.convention = convention == "kleinberg" ? DMLKIT_HITS_KLEINBERG : DMLKIT_HITS_DEFAULT;
      o.exclude_self_loops = no_self_loops ? 1 : 0;
      return dmlkit_hits(cfg, &o, out);
    });
  }
  if (*serve_cmd) return serve(fixture_dir, page_size, host, port);
  return kExitUsage;
}
