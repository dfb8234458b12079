#include "dmlkit/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "dmlkit/text.hpp"

namespace dmlkit::analytics {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Field shares

std::string FieldShareRow::percent_text() const {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%llu.%02llu",
                static_cast<unsigned long long>(basis_points / 100),
                static_cast<unsigned long long>(basis_points % 100));
  return buffer;
}

std::uint64_t truncated_basis_points(std::uint64_t count, std::uint64_t total) {
  if (total == 0) throw ValidationError("field total is zero");
  return count * 10000 / total;
}

std::vector<FieldShareRow> field_share_rows(const FieldCounts& counts, const FieldCounts& totals) {
  std::vector<FieldShareRow> rows;
  for (const auto& [field, count] : counts) {
    if (count == 0) continue;
    const auto it = totals.find(field);
    if (it == totals.end()) throw ValidationError("no world total for MSC field " + field);
    if (count > it->second) {
      throw ValidationError("count " + std::to_string(count) + " exceeds total " +
                            std::to_string(it->second) + " for MSC field " + field);
    }
    rows.push_back({field, count, it->second, truncated_basis_points(count, it->second)});
  }
  std::sort(rows.begin(), rows.end(), [](const FieldShareRow& a, const FieldShareRow& b) {
    if (a.basis_points != b.basis_points) return a.basis_points > b.basis_points;
    return a.msc2 < b.msc2;
  });
  return rows;
}

FieldCounts count_primary_fields(const std::vector<CanonicalRecord>& records) {
  FieldCounts counts;
  for (const auto& rec : records) {
    if (rec.msc_primary) ++counts[rec.msc_primary->top_level()];
  }
  return counts;
}

std::vector<FieldShareRow> field_share_table(const std::vector<CanonicalRecord>& records,
                                             const FieldCounts& totals) {
  return field_share_rows(count_primary_fields(records), totals);
}

FieldCounts parse_field_counts(std::string_view content, const std::string& origin) {
  FieldCounts counts;
  std::istringstream in{std::string(content)};
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    std::string normalized(trimmed);
    for (char& c : normalized) {
      if (c == ',' || c == '\t') c = ' ';
    }
    std::istringstream fields(normalized);
    std::string field;
    std::string number;
    fields >> field >> number;
    if (text::to_lower_ascii(field) == "msc2") continue;
    const auto where = origin + ":" + std::to_string(line_number);
    if (field.size() != 2 || !text::all_digits(field)) {
      throw ValidationError(where + ": '" + field + "' is not a two-digit MSC field");
    }
    const auto value = text::parse_unsigned(number);
    if (!value) throw ValidationError(where + ": '" + number + "' is not a count");
    if (!counts.emplace(field, *value).second) {
      throw ValidationError(where + ": MSC field " + field + " listed twice");
    }
  }
  return counts;
}

FieldCounts load_field_counts(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_field_counts(buffer.str(), path.string());
}

std::string format_share_table(const std::vector<FieldShareRow>& rows) {
  std::string out = "      %  Articles/Total   MSC\n";
  char buffer[96];
  for (const auto& r : rows) {
    const std::string ratio = "(" + std::to_string(r.count) + "/" + std::to_string(r.total) + ")";
    std::snprintf(buffer, sizeof buffer, "%7s  %-15s  %s\n", r.percent_text().c_str(),
                  ratio.c_str(), r.msc2.c_str());
    out += buffer;
  }
  return out;
}

std::string share_table_csv(const std::vector<FieldShareRow>& rows) {
  std::string out = "msc2,count,total,percent\n";
  for (const auto& r : rows) {
    out += r.msc2 + "," + std::to_string(r.count) + "," + std::to_string(r.total) + "," +
           r.percent_text() + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// MSC graph

MscGraph::MscGraph(std::vector<std::string> nodes, std::vector<std::uint64_t> weights)
    : nodes_(std::move(nodes)), weights_(std::move(weights)) {
  if (weights_.size() != nodes_.size() * nodes_.size()) {
    throw InvalidArgument("weight matrix does not match node count");
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i - 1] < nodes_[i])) throw InvalidArgument("graph nodes must be sorted and unique");
  }
}

std::optional<std::size_t> MscGraph::index_of(std::string_view node) const {
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), node);
  if (it == nodes_.end() || *it != node) return std::nullopt;
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::uint64_t MscGraph::weight(std::string_view from, std::string_view to) const {
  const auto i = index_of(from);
  const auto j = index_of(to);
  if (!i || !j) return 0;
  return weight(*i, *j);
}

std::uint64_t MscGraph::total_weight() const {
  return std::accumulate(weights_.begin(), weights_.end(), std::uint64_t{0});
}

std::vector<double> MscGraph::dense() const {
  return std::vector<double>(weights_.begin(), weights_.end());
}

MscGraph build_msc_graph(const std::vector<CanonicalRecord>& records,
                         std::optional<YearRange> years, const GraphOptions& options) {
  std::map<std::pair<std::string, std::string>, std::uint64_t> edges;
  std::set<std::string> node_set;
  for (const auto& rec : records) {
    if (!rec.msc_primary || rec.msc_secondary.empty()) continue;
    if (years && (!rec.date || rec.date->year < years->lo || rec.date->year > years->hi)) continue;
    const auto from = rec.msc_primary->top_level();
    for (const auto& secondary : rec.msc_secondary) {
      auto to = secondary.top_level();
      if (!options.include_self_loops && to == from) continue;
      node_set.insert(from);
      node_set.insert(to);
      ++edges[{from, std::move(to)}];
    }
  }
  std::vector<std::string> nodes(node_set.begin(), node_set.end());
  const auto n = nodes.size();
  std::vector<std::uint64_t> weights(n * n, 0);
  const auto index = [&nodes](const std::string& node) {
    return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), node) - nodes.begin());
  };
  for (const auto& [edge, w] : edges) weights[index(edge.first) * n + index(edge.second)] = w;
  return MscGraph(std::move(nodes), std::move(weights));
}

// ---------------------------------------------------------------------------
// HITS

namespace {

using Vector = std::vector<double>;

// y = M x
void multiply(std::span<const double> m, std::size_t n, const Vector& x, Vector& y) {
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += m[i * n + j] * x[j];
    y[i] = sum;
  }
}

// y = M^t x
void multiply_transposed(std::span<const double> m, std::size_t n, const Vector& x, Vector& y) {
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) y[j] += m[i * n + j] * xi;
  }
}

double norm(const Vector& v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

double distance(const Vector& a, const Vector& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum);
}

bool normalize(Vector& v) {
  const double len = norm(v);
  if (len == 0.0) return false;
  for (double& x : v) {
    x /= len;
    if (x <= 0.0) x = 0.0;  // clears -0.0
  }
  return true;
}

// Second eigenvalue of A = M^t M by power iteration on A - lambda1 u u^t.
double second_eigenvalue(std::span<const double> m, std::size_t n, const Vector& u, double lambda1) {
  if (n < 2) return 0.0;
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + static_cast<double>(i + 1) / static_cast<double>(n + 1);
  Vector tmp(n);
  Vector next(n);
  const auto deflate = [&](Vector& x) {
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += x[i] * u[i];
    for (std::size_t i = 0; i < n; ++i) x[i] -= dot * u[i];
  };
  deflate(v);
  if (norm(v) < 1e-12) {
    // u is parallel to the start vector; take the first basis vector u misses most
    std::size_t k = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (std::abs(u[i]) < std::abs(u[k])) k = i;
    }
    std::fill(v.begin(), v.end(), 0.0);
    v[k] = 1.0;
    deflate(v);
  }
  const double len0 = norm(v);
  if (len0 == 0.0) return 0.0;
  for (double& x : v) x /= len0;

  double estimate = 0.0;
  for (int iter = 0; iter < 5000; ++iter) {
    multiply(m, n, v, tmp);
    multiply_transposed(m, n, tmp, next);
    deflate(next);
    double rayleigh = 0.0;
    for (std::size_t i = 0; i < n; ++i) rayleigh += v[i] * next[i];
    const double len = norm(next);
    if (len == 0.0) return 0.0;
    for (std::size_t i = 0; i < n; ++i) v[i] = next[i] / len;
    if (iter > 10 && std::abs(rayleigh - estimate) <= 1e-14 * lambda1) return rayleigh;
    estimate = rayleigh;
  }
  return estimate;
}

}  // namespace

HitsResult hits_dense(std::span<const double> weights, std::size_t n, const HitsOptions& options) {
  if (weights.size() != n * n) throw InvalidArgument("weight matrix is not square");
  if (!(options.tol > 0.0)) throw InvalidArgument("HITS tolerance must be positive");
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("HITS weights must be finite and >= 0");
  }
  HitsResult result;
  result.hub.assign(n, 0.0);
  result.authority.assign(n, 0.0);
  if (n == 0 || std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; })) {
    return result;
  }

  // x tracks the dominant eigenvector of M^t M, y that of M M^t.
  const double start = 1.0 / std::sqrt(static_cast<double>(n));
  Vector x(n, start);
  Vector y(n, start);
  Vector tmp(n);
  Vector x_next(n);
  Vector y_next(n);
  result.converged = false;
  // A step below tol counts as converged, but with a small spectral gap the
  // remaining error is about step * r / (1 - r), r being the contraction
  // ratio estimated from successive steps. Iteration goes on (within
  // max_iter) until that estimate is below tol too.
  double previous_step = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
    multiply(weights, n, x, tmp);
    multiply_transposed(weights, n, tmp, x_next);
    multiply_transposed(weights, n, y, tmp);
    multiply(weights, n, tmp, y_next);
    if (!normalize(x_next) || !normalize(y_next)) break;
    result.residual = std::max(distance(x, x_next), distance(y, y_next));
    x.swap(x_next);
    y.swap(y_next);
    result.iterations = iter;
    const double ratio = result.residual / previous_step;
    previous_step = result.residual;
    if (result.residual < options.tol &&
        (result.residual <= 1e-15 || (ratio < 1.0 && result.residual * ratio / (1.0 - ratio) < options.tol))) {
      break;
    }
  }
  result.converged = result.iterations > 0 && result.residual < options.tol;

  multiply(weights, n, x, tmp);
  result.eigenvalue = norm(tmp) * norm(tmp);
  const double lambda2 = second_eigenvalue(weights, n, x, result.eigenvalue);
  result.non_unique = lambda2 >= result.eigenvalue * (1.0 - 1e-6);

  if (options.convention == HitsConvention::Default) {
    result.hub = std::move(x);
    result.authority = std::move(y);
  } else {
    result.hub = std::move(y);
    result.authority = std::move(x);
  }
  return result;
}

HitsResult hits(const MscGraph& graph, const HitsOptions& options) {
  const auto dense = graph.dense();
  return hits_dense(dense, graph.size(), options);
}

Ranking rank(const std::vector<std::string>& nodes, std::span<const double> scores,
             double tie_tolerance) {
  if (nodes.size() != scores.size()) throw InvalidArgument("rank: nodes and scores differ in length");
  std::vector<std::size_t> order(nodes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return nodes[a] < nodes[b];
  });
  Ranking ranking;
  int next_rank = 1;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && scores[order[i]] - scores[order[j]] <= tie_tolerance) ++j;
    std::vector<std::size_t> group(order.begin() + static_cast<std::ptrdiff_t>(i),
                                   order.begin() + static_cast<std::ptrdiff_t>(j));
    std::sort(group.begin(), group.end(), [&](std::size_t a, std::size_t b) { return nodes[a] < nodes[b]; });
    for (auto idx : group) ranking[nodes[idx]] = next_rank++;
    i = j;
  }
  return ranking;
}

// ---------------------------------------------------------------------------
// Sliding windows

std::vector<std::string> WindowSeries::all_nodes() const {
  std::set<std::string> nodes;
  for (const auto& e : entries) nodes.insert(e.graph.nodes().begin(), e.graph.nodes().end());
  return {nodes.begin(), nodes.end()};
}

WindowSeries sliding_window_series(const std::vector<CanonicalRecord>& records, int start_year,
                                   int end_year, int window, const HitsOptions& hits_options,
                                   const GraphOptions& graph_options) {
  if (start_year > end_year) throw InvalidArgument("start year is after end year");
  if (window < 1) throw InvalidArgument("window must be at least one year");
  WindowSeries series;
  series.start_year = start_year;
  series.end_year = end_year;
  series.window = window;
  for (int year = start_year; year <= end_year; ++year) {
    WindowEntry entry;
    entry.year = year;
    entry.graph = build_msc_graph(records, YearRange{year, year + window - 1}, graph_options);
    entry.hits = hits(entry.graph, hits_options);
    if (!entry.graph.empty()) {
      entry.hub_rank = rank(entry.graph.nodes(), entry.hits.hub);
      entry.auth_rank = rank(entry.graph.nodes(), entry.hits.authority);
    }
    series.entries.push_back(std::move(entry));
  }
  return series;
}

std::string series_csv(const WindowSeries& series, const std::vector<std::string>& nodes) {
  std::string out = "year,node,hub,authority,hub_rank,auth_rank\n";
  for (const auto& e : series.entries) {
    for (const auto& node : nodes) {
      out += std::to_string(e.year) + "," + node + ",";
      if (const auto i = e.graph.index_of(node)) {
        out += text::format_double(e.hits.hub[*i]) + "," + text::format_double(e.hits.authority[*i]) +
               "," + std::to_string(e.hub_rank.at(node)) + "," + std::to_string(e.auth_rank.at(node));
      } else {
        out += ",,,";
      }
      out += "\n";
    }
  }
  return out;
}

namespace {

struct SeriesStyle {
  const char* label;
  const char* color;
  const char* dash;  // nullptr = solid
};

constexpr SeriesStyle kStyles[4] = {
    {"H-score", "#1f4e9c", nullptr},
    {"A-score", "#b0361f", "2,3"},
    {"H-score rank", "#1f4e9c", "8,4"},
    {"A-score rank", "#b0361f", "8,3,2,3"},
};

std::string fmt(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", v);
  return buffer;
}

}  // namespace

std::string series_svg(const WindowSeries& series, const std::string& node) {
  constexpr double kWidth = 720, kHeight = 400;
  constexpr double kLeft = 60, kRight = 60, kTop = 40, kBottom = 70;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  int max_rank = 1;
  for (const auto& e : series.entries) max_rank = std::max(max_rank, static_cast<int>(e.graph.size()));
  const int first = series.start_year;
  const int span = std::max(1, series.end_year - series.start_year);
  const auto x_of = [&](int year) { return kLeft + plot_w * (year - first) / span; };
  const auto y_score = [&](double s) { return kTop + plot_h * (1.0 - s); };
  const auto y_rank = [&](int r) {
    return max_rank == 1 ? kTop : kTop + plot_h * (r - 1) / static_cast<double>(max_rank - 1);
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
      << "  <title>MSC " << node << ": H-score, A-score and ranks</title>\n"
      << "  <rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\" />\n"
      << "  <rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(plot_w)
      << "\" height=\"" << fmt(plot_h) << "\" fill=\"none\" stroke=\"#444\" />\n"
      << "  <text x=\"" << fmt(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">MSC "
      << node << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double s = k / 4.0;
    svg << "  <text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(y_score(s) + 4)
        << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(s) << "</text>\n";
  }
  for (int r : {1, max_rank}) {
    svg << "  <text x=\"" << fmt(kLeft + plot_w + 6) << "\" y=\"" << fmt(y_rank(r) + 4)
        << "\" font-size=\"10\">" << r << "</text>\n";
  }
  for (const auto& e : series.entries) {
    if ((e.year - first) % std::max(1, span / 10) != 0 && e.year != series.end_year) continue;
    svg << "  <text x=\"" << fmt(x_of(e.year)) << "\" y=\"" << fmt(kTop + plot_h + 16)
        << "\" text-anchor=\"middle\" font-size=\"10\">" << e.year << "</text>\n";
  }
  svg << "  <text x=\"14\" y=\"" << fmt(kTop + plot_h / 2) << "\" font-size=\"11\" transform=\"rotate(-90 14 "
      << fmt(kTop + plot_h / 2) << ")\" text-anchor=\"middle\">score</text>\n"
      << "  <text x=\"" << fmt(kWidth - 14) << "\" y=\"" << fmt(kTop + plot_h / 2)
      << "\" font-size=\"11\" transform=\"rotate(90 " << fmt(kWidth - 14) << " " << fmt(kTop + plot_h / 2)
      << ")\" text-anchor=\"middle\">rank</text>\n";

  for (int s = 0; s < 4; ++s) {
    // Split the polyline wherever the node is missing from a window.
    std::vector<std::vector<std::pair<double, double>>> segments(1);
    for (const auto& e : series.entries) {
      const auto i = e.graph.index_of(node);
      if (!i) {
        if (!segments.back().empty()) segments.emplace_back();
        continue;
      }
      double y = 0;
      switch (s) {
        case 0: y = y_score(e.hits.hub[*i]); break;
        case 1: y = y_score(e.hits.authority[*i]); break;
        case 2: y = y_rank(e.hub_rank.at(node)); break;
        default: y = y_rank(e.auth_rank.at(node)); break;
      }
      segments.back().emplace_back(x_of(e.year), y);
    }
    for (const auto& seg : segments) {
      if (seg.empty()) continue;
      svg << "  <polyline class=\"series-" << s << "\" fill=\"none\" stroke=\"" << kStyles[s].color
          << "\" stroke-width=\"1.5\"";
      if (kStyles[s].dash != nullptr) svg << " stroke-dasharray=\"" << kStyles[s].dash << "\"";
      svg << " points=\"";
      for (std::size_t k = 0; k < seg.size(); ++k) {
        svg << (k ? " " : "") << fmt(seg[k].first) << "," << fmt(seg[k].second);
      }
      svg << "\" />\n";
    }
    const double ly = kHeight - 36 + 14 * (s / 2);
    const double lx = kLeft + 220 * (s % 2);
    svg << "  <line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(lx + 30) << "\" y2=\""
        << fmt(ly) << "\" stroke=\"" << kStyles[s].color << "\" stroke-width=\"1.5\"";
    if (kStyles[s].dash != nullptr) svg << " stroke-dasharray=\"" << kStyles[s].dash << "\"";
    svg << " />\n  <text x=\"" << fmt(lx + 36) << "\" y=\"" << fmt(ly + 4) << "\" font-size=\"11\">"
        << kStyles[s].label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write to " + path.string() + " failed");
}

}  // namespace

ExportedSeries export_series(const WindowSeries& series, const fs::path& out_dir,
                             const std::vector<std::string>& nodes) {
  if (series.entries.empty()) throw InvalidArgument("cannot export an empty series");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  const auto selected = nodes.empty() ? series.all_nodes() : nodes;
  ExportedSeries result;
  result.csv = out_dir / "hits_series.csv";
  write_file(result.csv, series_csv(series, selected));
  result.rows = series.entries.size() * selected.size();
  for (const auto& node : selected) {
    const auto path = out_dir / ("hits_" + node + ".svg");
    write_file(path, series_svg(series, node));
    result.charts.push_back(path);
  }
  return result;
}

}  // namespace dmlkit::analytics
