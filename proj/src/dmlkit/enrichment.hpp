#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dmlkit/record_model.hpp"

namespace dmlkit::enrichment {

inline constexpr std::string_view kReviewUrlPrefix = "http://www.ams.org/mathscinet-getitem?mr=";

std::string review_url(std::uint64_t mr_number);

/// Join key bridging repository citations and review-database citations.
struct MatchKey {
  std::string journal_norm;
  std::string volume;
  std::string year;
  std::string spage;

  /// "journal|volume|year|spage"
  std::string render() const;

  auto operator<=>(const MatchKey&) const = default;
};

/// Lowercases, folds Latin-1 letters and full-width ASCII, turns punctuation
/// into spaces and collapses whitespace. Other non-ASCII text is kept.
std::string normalize_journal(std::string_view title);

MatchKey make_key(std::string_view journal, std::string_view volume, int year,
                  std::string_view spage);

/// nullopt when publication or year is missing.
std::optional<MatchKey> make_match_key(const CanonicalRecord& rec);

struct MrEntry {
  std::uint64_t mr_number = 0;
  MscCode msc_primary{"00"};
  std::vector<MscCode> msc_secondary;
  MatchKey match_key;

  bool operator==(const MrEntry&) const = default;
};

using MrTable = std::map<MatchKey, MrEntry>;

/// Tab-separated rows: journal, volume, year, spage, mr_number, msc_primary,
/// msc_secondary (";"-separated, may be empty). Blank lines, lines starting
/// with '#' and a header row starting with "journal" are skipped.
MrTable parse_mr_table(std::string_view content, const std::string& origin = "<memory>");
MrTable load_mr_table(const std::filesystem::path& path);

/// First two characters of a valid MSC code.
std::string msc_top_level(std::string_view code);

struct EnrichReport {
  std::size_t matched = 0;
  std::size_t unmatched = 0;
  std::size_t skipped = 0;
  std::vector<std::string> diagnostics;
};

struct EnrichResult {
  std::vector<CanonicalRecord> records;
  EnrichReport report;
};

/// Matched records gain mr_number, MSC codes and a MathSciNet related URL.
/// Nothing else is touched; applying twice equals applying once.
EnrichResult enrich(std::vector<CanonicalRecord> records, const MrTable& table);

}  // namespace dmlkit::enrichment
