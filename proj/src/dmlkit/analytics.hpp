#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dmlkit/record_model.hpp"

namespace dmlkit::analytics {

// ---------------------------------------------------------------------------
// Field shares

struct FieldShareRow {
  std::string msc2;
  std::uint64_t count = 0;
  std::uint64_t total = 0;
  /// floor(10000 * count / total): the percentage truncated to 2 decimals,
  /// kept as an integer so ordering and printing are exact.
  std::uint64_t basis_points = 0;

  double percent() const noexcept { return static_cast<double>(basis_points) / 100.0; }
  /// "10.62"
  std::string percent_text() const;

  bool operator==(const FieldShareRow&) const = default;
};

using FieldCounts = std::map<std::string, std::uint64_t>;

std::uint64_t truncated_basis_points(std::uint64_t count, std::uint64_t total);

/// Rows for every field with a non-zero count, sorted by percentage
/// descending, then by field code. Throws ValidationError when a counted
/// field has no total or count exceeds total.
std::vector<FieldShareRow> field_share_rows(const FieldCounts& counts, const FieldCounts& totals);

/// Counts primary classifications per two-digit field, then as above.
std::vector<FieldShareRow> field_share_table(const std::vector<CanonicalRecord>& records,
                                             const FieldCounts& totals);

FieldCounts count_primary_fields(const std::vector<CanonicalRecord>& records);

/// Delimited text, one "msc2<sep>number[<sep>label]" per line with tab,
/// comma or spaces as separator. '#' comments and a "msc2" header are
/// skipped.
FieldCounts parse_field_counts(std::string_view content, const std::string& origin = "<memory>");
FieldCounts load_field_counts(const std::filesystem::path& path);

/// Aligned text table and CSV renderings of the rows.
std::string format_share_table(const std::vector<FieldShareRow>& rows);
std::string share_table_csv(const std::vector<FieldShareRow>& rows);

// ---------------------------------------------------------------------------
// MSC graph

/// Weighted digraph over two-digit MSC fields; weight(a, b) counts
/// (primary in a, secondary in b) pairs.
class MscGraph {
 public:
  MscGraph() = default;
  /// weights is row-major nodes.size() x nodes.size(). Nodes must be sorted
  /// and unique.
  MscGraph(std::vector<std::string> nodes, std::vector<std::uint64_t> weights);

  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  std::optional<std::size_t> index_of(std::string_view node) const;
  std::uint64_t weight(std::size_t from, std::size_t to) const { return weights_[from * size() + to]; }
  std::uint64_t weight(std::string_view from, std::string_view to) const;
  std::uint64_t total_weight() const;

  /// Row-major copy as doubles.
  std::vector<double> dense() const;

  bool operator==(const MscGraph&) const = default;

 private:
  std::vector<std::string> nodes_;
  std::vector<std::uint64_t> weights_;
};

struct YearRange {
  int lo;
  int hi;
};

struct GraphOptions {
  bool include_self_loops = true;
};

/// Adds 1 to top(p) -> top(s) for each secondary s of every record with a
/// primary p. With a year range, records without a date are left out.
MscGraph build_msc_graph(const std::vector<CanonicalRecord>& records,
                         std::optional<YearRange> years = std::nullopt,
                         const GraphOptions& options = {});

// ---------------------------------------------------------------------------
// HITS

/// Default: hub from M^t M, authority from M M^t. Kleinberg: the reverse.
enum class HitsConvention { Default, Kleinberg };

struct HitsOptions {
  double tol = 1e-10;
  std::size_t max_iter = 10000;
  HitsConvention convention = HitsConvention::Default;
};

struct HitsResult {
  std::vector<double> hub;
  std::vector<double> authority;
  std::size_t iterations = 0;
  /// Largest Euclidean change of either vector in the final iteration.
  double residual = 0.0;
  bool converged = true;
  /// The dominant eigenvalue looked repeated, so the vectors depend on the
  /// start vector.
  bool non_unique = false;
  /// Dominant eigenvalue shared by M^t M and M M^t.
  double eigenvalue = 0.0;
};

/// Alternating power iteration from the uniform vector. Non-convergence is
/// reported through `converged`, not an exception.
HitsResult hits(const MscGraph& graph, const HitsOptions& options = {});

/// Same over a row-major n x n non-negative matrix.
HitsResult hits_dense(std::span<const double> weights, std::size_t n, const HitsOptions& options = {});

using Ranking = std::map<std::string, int>;

/// 1 = highest score. Scores within tie_tolerance of the first score of a
/// run are ties and are ordered by code.
Ranking rank(const std::vector<std::string>& nodes, std::span<const double> scores,
             double tie_tolerance = 1e-9);

// ---------------------------------------------------------------------------
// Sliding windows

struct WindowEntry {
  int year = 0;
  MscGraph graph;
  HitsResult hits;
  Ranking hub_rank;
  Ranking auth_rank;
};

struct WindowSeries {
  int start_year = 0;
  int end_year = 0;
  int window = 10;
  std::vector<WindowEntry> entries;

  /// Sorted union of nodes over all windows.
  std::vector<std::string> all_nodes() const;
};

/// Entry for year Y is computed from publications in [Y, Y + window - 1].
WindowSeries sliding_window_series(const std::vector<CanonicalRecord>& records, int start_year,
                                   int end_year, int window = 10, const HitsOptions& hits_options = {},
                                   const GraphOptions& graph_options = {});

/// year,node,hub,authority,hub_rank,auth_rank; one row per (year, node) with
/// empty cells where the node is absent from that window.
std::string series_csv(const WindowSeries& series, const std::vector<std::string>& nodes);

/// Line chart of H-score, A-score and both ranks for one node.
std::string series_svg(const WindowSeries& series, const std::string& node);

struct ExportedSeries {
  std::filesystem::path csv;
  std::vector<std::filesystem::path> charts;
  std::size_t rows = 0;
};

/// Writes hits_series.csv and hits_<node>.svg under out_dir. An empty node
/// list means every node of the series.
ExportedSeries export_series(const WindowSeries& series, const std::filesystem::path& out_dir,
                             const std::vector<std::string>& nodes = {});

}  // namespace dmlkit::analytics
