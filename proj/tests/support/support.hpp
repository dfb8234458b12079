#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "dmlkit/analytics.hpp"
#include "dmlkit/oai_record.hpp"
#include "dmlkit/record_model.hpp"

namespace dmlkit::testing {

/// Repository data/ directory.
std::filesystem::path data_dir();
std::filesystem::path fixture(const std::string& relative);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

/// Fresh directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "dmlkit");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

using Rng = std::mt19937_64;

// ---- generators ------------------------------------------------------------

std::string random_word(Rng& rng, std::size_t min_len, std::size_t max_len);
/// Collapsed text of a few words, occasionally with markup-sensitive
/// characters and non-ASCII letters.
std::string random_text(Rng& rng);
std::string random_msc(Rng& rng);
CanonicalRecord random_record(Rng& rng, std::size_t serial);

/// OAI records with oai_dc payloads; identifiers oai:test:<prefix>-<i>.
std::vector<oai::OaiRecord> synthetic_oai_records(std::size_t count, const std::string& prefix = "rec");
/// Writes one envelope file per record (NNN.xml) into dir.
void write_fixture_files(const std::filesystem::path& dir, const std::vector<oai::OaiRecord>& records);

struct RandomGraph {
  std::size_t n = 0;
  std::vector<double> weights;  // row-major
};

/// 1..max_nodes nodes, integer weights 0..max_weight, random density.
RandomGraph random_graph(Rng& rng, std::size_t max_nodes = 10, int max_weight = 9);
RandomGraph random_symmetric_graph(Rng& rng, std::size_t max_nodes = 10, int max_weight = 9);

std::vector<std::string> node_names(std::size_t n);

// ---- dense eigensolver oracle ----------------------------------------------

struct OracleEigen {
  std::vector<double> vector;  // unit norm, nonnegative orientation
  double eigenvalue = 0.0;
  int multiplicity = 0;  // of the dominant eigenvalue; 0 for the zero matrix
};

/// Dominant eigenpair of the symmetric n x n matrix a (row-major), from a
/// full self-adjoint eigendecomposition.
OracleEigen oracle_dominant(const std::vector<double>& a, std::size_t n);

/// M^t M and M M^t.
std::vector<double> gram_transposed(const std::vector<double>& m, std::size_t n);  // M^t M
std::vector<double> gram(const std::vector<double>& m, std::size_t n);             // M M^t

struct OracleHits {
  OracleEigen hub;        // M^t M
  OracleEigen authority;  // M M^t
  bool simple() const { return hub.multiplicity == 1 && authority.multiplicity == 1; }
};

OracleHits oracle_hits(const std::vector<double>& m, std::size_t n);

/// Ranking from oracle scores: descending, ties (within tol) by name.
analytics::Ranking oracle_rank(const std::vector<std::string>& nodes, const std::vector<double>& scores,
                               double tie_tolerance = 1e-9);

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace dmlkit::testing
