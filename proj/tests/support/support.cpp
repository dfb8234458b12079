#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include <unistd.h>

namespace dmlkit::testing {

namespace fs = std::filesystem;

fs::path data_dir() { return fs::path(DMLKIT_DATA_DIR); }

fs::path fixture(const std::string& relative) { return data_dir() / "fixtures" / relative; }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1)));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

// ---------------------------------------------------------------------------
// generators

namespace {

template <typename T>
T pick(Rng& rng, T lo, T hi) {
  return std::uniform_int_distribution<T>(lo, hi)(rng);
}

bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

}  // namespace

std::string random_word(Rng& rng, std::size_t min_len, std::size_t max_len) {
  static const std::string letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  static const std::vector<std::string> extras = {"&", "<", ">", "'", "\"", "\xC3\xA9", "\xE6\x95\xB0",
                                                  "\xE5\xAD\xA6", "-", "."};
  const auto len = pick<std::size_t>(rng, min_len, max_len);
  std::string w;
  for (std::size_t i = 0; i < len; ++i) {
    if (coin(rng, 0.08)) {
      w += extras[pick<std::size_t>(rng, 0, extras.size() - 1)];
    } else {
      w += letters[pick<std::size_t>(rng, 0, letters.size() - 1)];
    }
  }
  return w;
}

std::string random_text(Rng& rng) {
  const auto words = pick<int>(rng, 1, 6);
  std::string out;
  for (int i = 0; i < words; ++i) {
    if (i) out += ' ';
    out += random_word(rng, 1, 9);
  }
  return out;
}

std::string random_msc(Rng& rng) {
  static const std::string upper = "ABCDEFGHJKLMNPQRSTUVWXYZ";
  std::string code;
  code += static_cast<char>('0' + pick(rng, 0, 9));
  code += static_cast<char>('0' + pick(rng, 0, 9));
  switch (pick(rng, 0, 3)) {
    case 0: return code;
    case 1: return code + "-xx";
    case 2: return code + upper[pick<std::size_t>(rng, 0, upper.size() - 1)] + "xx";
    default:
      code += upper[pick<std::size_t>(rng, 0, upper.size() - 1)];
      code += static_cast<char>('0' + pick(rng, 0, 9));
      code += static_cast<char>('0' + pick(rng, 0, 9));
      return code;
  }
}

CanonicalRecord random_record(Rng& rng, std::size_t serial) {
  CanonicalRecord r;
  r.source = coin(rng) ? "repo" + std::to_string(pick(rng, 1, 5)) : random_word(rng, 3, 8);
  r.oai_identifier = "oai:" + random_word(rng, 3, 10) + ":" + std::to_string(serial);
  r.record_id = make_record_id(r.source, r.oai_identifier);
  if (coin(rng)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", pick(rng, 1990, 2020), pick(rng, 1, 12), pick(rng, 1, 28));
    r.datestamp = buf;
    if (coin(rng)) *r.datestamp += "T" + std::string(coin(rng) ? "06:30:00Z" : "23:59:59Z");
  }
  r.title = random_text(rng);
  for (int i = pick(rng, 0, 3); i > 0; --i) {
    NameParts n;
    n.family = random_word(rng, 2, 10);
    if (coin(rng, 0.8)) n.given = random_text(rng);
    n.raw = coin(rng, 0.8) ? n.joined() : random_text(rng);
    r.creators.push_back(std::move(n));
  }
  if (coin(rng, 0.8)) r.publication = random_text(rng);
  if (coin(rng)) r.volume = std::to_string(pick(rng, 1, 120));
  if (coin(rng)) r.issue = std::to_string(pick(rng, 1, 12));
  if (coin(rng)) {
    const int s = pick(rng, 1, 900);
    r.pagerange = coin(rng, 0.8) ? std::to_string(s) + "-" + std::to_string(s + pick(rng, 0, 40)) : std::to_string(s);
  }
  if (coin(rng, 0.8)) {
    PublicationDate d;
    d.year = pick(rng, 1900, 2020);
    if (coin(rng, 0.6)) {
      d.month = pick(rng, 1, 12);
      if (coin(rng)) d.day = pick(rng, 1, 28);
    }
    r.date = d;
  }
  if (coin(rng)) r.publisher = random_text(rng);
  r.official_url = "http://example.org/" + std::to_string(serial) + "/" + random_word(rng, 1, 6) + "?q=" +
                   std::to_string(pick(rng, 0, 999));
  // keep the URL free of characters the URL check rejects
  std::replace_if(r.official_url.begin(), r.official_url.end(),
                  [](char c) { return c == ' ' || c == '"' || c == '<' || c == '>' || c == '\''; }, 'x');
  if (coin(rng, 0.3)) r.full_text_url = "https://example.org/pdf/" + std::to_string(serial) + ".pdf";
  for (int i = pick(rng, 0, 3); i > 0; --i) r.subjects.push_back(coin(rng) ? random_msc(rng) : random_text(rng));
  if (coin(rng)) r.msc_primary = MscCode(random_msc(rng));
  for (int i = pick(rng, 0, 3); i > 0; --i) r.msc_secondary.emplace_back(random_msc(rng));
  if (coin(rng)) r.mr_number = pick<std::uint64_t>(rng, 1, 9999999);
  for (int i = pick(rng, 0, 2); i > 0; --i) {
    r.related_urls.push_back({"http://www.ams.org/mathscinet-getitem?mr=" + std::to_string(pick(rng, 1, 99999)),
                              coin(rng) ? "MathSciNet" : "doi"});
  }
  r.refereed = coin(rng);
  if (coin(rng)) r.language = coin(rng) ? "en" : "ja";
  return r;
}

std::vector<oai::OaiRecord> synthetic_oai_records(std::size_t count, const std::string& prefix) {
  std::vector<oai::OaiRecord> out;
  for (std::size_t i = 0; i < count; ++i) {
    oai::OaiRecord r;
    r.identifier = "oai:test:" + prefix + "-" + std::to_string(i + 1);
    char date[16];
    std::snprintf(date, sizeof date, "2009-%02zu-%02zu", 1 + i % 12, 1 + i % 28);
    r.datestamp = date;
    r.set_specs = {i % 2 ? "odd" : "even"};
    r.payload = "<oai_dc:dc xmlns:oai_dc=\"http://www.openarchives.org/OAI/2.0/oai_dc/\" "
                "xmlns:dc=\"http://purl.org/dc/elements/1.1/\">"
                "<dc:title>Synthetic article " + std::to_string(i + 1) + "</dc:title>"
                "<dc:creator>Tester, Number " + std::to_string(i + 1) + "</dc:creator>"
                "<dc:identifier>http://example.org/article/" + prefix + "/" + std::to_string(i + 1) + "</dc:identifier>"
                "<dc:identifier>J. Synthetic Math. " + std::to_string(1 + i % 7) + " (" + std::to_string(1990 + i % 20) +
                "), " + std::to_string(1 + 10 * i) + "-" + std::to_string(9 + 10 * i) + "</dc:identifier>"
                "</oai_dc:dc>";
    out.push_back(std::move(r));
  }
  return out;
}

void write_fixture_files(const fs::path& dir, const std::vector<oai::OaiRecord>& records) {
  fs::create_directories(dir);
  oai::EnvelopeOptions env;
  env.request_url = "http://fixtures.invalid/oai";
  env.metadata_prefix = "oai_dc";
  for (std::size_t i = 0; i < records.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "%03zu.xml", i + 1);
    write_file(dir / name, oai::serialize_list_records({records[i]}, env));
  }
}

RandomGraph random_graph(Rng& rng, std::size_t max_nodes, int max_weight) {
  RandomGraph g;
  g.n = pick<std::size_t>(rng, 1, max_nodes);
  g.weights.assign(g.n * g.n, 0.0);
  const double density = std::uniform_real_distribution<double>(0.15, 1.0)(rng);
  for (auto& w : g.weights) {
    if (coin(rng, density)) w = pick(rng, 0, max_weight);
  }
  return g;
}

RandomGraph random_symmetric_graph(Rng& rng, std::size_t max_nodes, int max_weight) {
  auto g = random_graph(rng, max_nodes, max_weight);
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j = 0; j < i; ++j) g.weights[i * g.n + j] = g.weights[j * g.n + i];
  }
  return g;
}

std::vector<std::string> node_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02zu", 10 + 7 * i);
    names.emplace_back(buf);
  }
  return names;
}

// ---------------------------------------------------------------------------
// oracle

OracleEigen oracle_dominant(const std::vector<double>& a, std::size_t n) {
  OracleEigen out;
  out.vector.assign(n, 0.0);
  if (n == 0) return out;
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = a[i * n + j];
  }
  if (m.cwiseAbs().maxCoeff() == 0.0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  const auto& values = solver.eigenvalues();  // ascending
  const double top = values(static_cast<Eigen::Index>(n) - 1);
  out.eigenvalue = top;
  const double tol = 1e-9 * std::max(1.0, std::abs(top));
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    if (std::abs(values(i) - top) <= tol) ++out.multiplicity;
  }
  Eigen::VectorXd v = solver.eigenvectors().col(static_cast<Eigen::Index>(n) - 1);
  if (v.sum() < 0) v = -v;
  v.normalize();
  for (std::size_t i = 0; i < n; ++i) out.vector[i] = v(static_cast<Eigen::Index>(i));
  return out;
}

std::vector<double> gram_transposed(const std::vector<double>& m, std::size_t n) {
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) out[i * n + j] += m[k * n + i] * m[k * n + j];
  return out;
}

std::vector<double> gram(const std::vector<double>& m, std::size_t n) {
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) out[i * n + j] += m[i * n + k] * m[j * n + k];
  return out;
}

OracleHits oracle_hits(const std::vector<double>& m, std::size_t n) {
  return {oracle_dominant(gram_transposed(m, n), n), oracle_dominant(gram(m, n), n)};
}

analytics::Ranking oracle_rank(const std::vector<std::string>& nodes, const std::vector<double>& scores,
                               double tie_tolerance) {
  // Bucket scores into tie classes by a single pass over the sorted values.
  std::vector<std::pair<double, std::string>> entries;
  for (std::size_t i = 0; i < nodes.size(); ++i) entries.emplace_back(scores[i], nodes[i]);
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<int> klass(entries.size(), 0);
  double anchor = entries.empty() ? 0.0 : entries.front().first;
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (anchor - entries[i].first <= tie_tolerance) {
      klass[i] = klass[i - 1];
    } else {
      klass[i] = klass[i - 1] + 1;
      anchor = entries[i].first;
    }
  }
  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (klass[a] != klass[b]) return klass[a] < klass[b];
    return entries[a].second < entries[b].second;
  });
  analytics::Ranking out;
  int r = 1;
  for (auto i : order) out[entries[i].second] = r++;
  return out;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace dmlkit::testing
