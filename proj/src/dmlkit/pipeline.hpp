#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dmlkit/analytics.hpp"
#include "dmlkit/http_transport.hpp"
#include "dmlkit/oai_client.hpp"

namespace dmlkit::pipeline {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitUsage = 2;

/// Bad invocation or configuration; maps to kExitUsage.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& message) : Error(ErrorKind::InvalidArgument, message) {}
};

struct PipelineConfig {
  std::vector<oai::EndpointConfig> endpoints;
  std::filesystem::path spool_dir;
  std::filesystem::path store_path;
  std::filesystem::path enriched_store_path;
  std::filesystem::path mr_table_path;
  std::filesystem::path totals_path;
  std::filesystem::path output_dir;
  oai::HarvestOptions harvest;

  /// Reads the JSON config. Relative paths are resolved against the
  /// directory holding the file.
  static PipelineConfig load(const std::filesystem::path& path);
  static PipelineConfig parse(const std::string& json, const std::filesystem::path& base_dir);

  /// Sets one key using the same names as the JSON file. Paths are taken
  /// as given.
  void set(const std::string& key, const std::string& value);

  /// store_path with ".enriched" before the extension unless set.
  std::filesystem::path effective_enriched_store() const;
};

struct Report {
  int exit_code = kExitOk;
  /// One line per item, without trailing newlines.
  std::vector<std::string> summary;
  std::vector<std::string> warnings;
  std::vector<std::string> details;
  /// Machine-readable form of the same content.
  std::string json;

  std::string text(bool verbose) const;
};

/// Harvests each endpoint (all of them when names is empty) into
/// spool_dir/<name>/. Endpoints run concurrently; the report lists them in
/// config order.
Report cmd_harvest(const PipelineConfig& config, const std::vector<std::string>& names = {});

/// Parses every spooled envelope and merges the canonical records into the
/// store. Re-running on the same spool leaves the store unchanged.
Report cmd_transform(const PipelineConfig& config);

/// Applies the MR lookup table to the store and writes the enriched store.
Report cmd_enrich(const PipelineConfig& config);

enum class ExportFormat { Eprints, Ore, Mets };

ExportFormat parse_export_format(const std::string& name);

struct ExportOptions {
  ExportFormat format = ExportFormat::Eprints;
  /// ORE only: aggregation name, used for the file name and the map URI.
  std::string name = "aggregation";
  std::string title = "Aggregated articles";
  std::string portal_base = "http://localhost/dml";
  /// METS only: POST each package here when set.
  std::optional<std::string> deposit_url;
};

Report cmd_export(const PipelineConfig& config, const ExportOptions& options);

struct StatsOptions {
  /// Overrides config.totals_path.
  std::optional<std::filesystem::path> totals;
  /// Per-field article counts to use instead of counting the store.
  std::optional<std::filesystem::path> counts;
};

Report cmd_stats(const PipelineConfig& config, const StatsOptions& options);

struct HitsCommandOptions {
  int from = 0;
  int to = 0;
  int window = 10;
  std::vector<std::string> nodes;
  analytics::HitsConvention convention = analytics::HitsConvention::Default;
  bool self_loops = true;
};

Report cmd_hits(const PipelineConfig& config, const HitsCommandOptions& options);

/// Store read by export, stats and hits: the enriched store if present,
/// else the plain store.
std::filesystem::path analysis_input(const PipelineConfig& config);

}  // namespace dmlkit::pipeline
