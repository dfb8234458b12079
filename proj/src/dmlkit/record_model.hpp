#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dmlkit/error.hpp"
#include "dmlkit/metadata_parsers.hpp"

namespace dmlkit {

/// Mathematics Subject Classification code: "53A35", "20-xx", "53Axx" or
/// the two-digit field form "53".
class MscCode {
 public:
  /// Throws ValidationError for anything that is not an MSC code.
  explicit MscCode(std::string_view code);

  static bool is_valid(std::string_view code);
  static std::optional<MscCode> parse(std::string_view code);

  const std::string& str() const noexcept { return code_; }
  /// First two characters; leading zeros are kept ("05C20" -> "05").
  std::string top_level() const { return code_.substr(0, 2); }

  auto operator<=>(const MscCode&) const = default;

 private:
  std::string code_;
};

/// Year, optionally with month and day.
struct PublicationDate {
  int year = 0;
  std::optional<int> month;
  std::optional<int> day;

  /// Accepts YYYY, YYYY-MM and YYYY-MM-DD (a time suffix is ignored).
  static std::optional<PublicationDate> parse(std::string_view s);
  std::string iso() const;

  bool operator==(const PublicationDate&) const = default;
};

struct NameParts {
  std::string family;
  std::string given;
  std::string raw;

  /// Splits "FAMILY, Given" at the first comma. Without a comma the whole
  /// string is the family name.
  static NameParts split(std::string_view raw);
  /// "family, given", or family alone when given is empty.
  std::string joined() const;

  bool operator==(const NameParts&) const = default;
};

struct RelatedUrl {
  std::string url;
  std::string type;

  bool operator==(const RelatedUrl&) const = default;
};

inline constexpr std::string_view kRelatedDoi = "doi";
inline constexpr std::string_view kRelatedMathSciNet = "MathSciNet";

/// Normalized article record. Free-text fields are whitespace-collapsed.
struct CanonicalRecord {
  std::string record_id;
  std::string source;
  std::string oai_identifier;
  std::optional<std::string> datestamp;
  std::string title;
  std::vector<NameParts> creators;
  std::string publication;
  std::optional<std::string> volume;
  std::optional<std::string> issue;
  std::optional<std::string> pagerange;
  std::optional<PublicationDate> date;
  std::optional<std::string> publisher;
  std::string official_url;
  std::optional<std::string> full_text_url;
  /// Raw subject headings as harvested, MSC or not.
  std::vector<std::string> subjects;
  std::optional<MscCode> msc_primary;
  std::vector<MscCode> msc_secondary;
  std::optional<std::uint64_t> mr_number;
  std::vector<RelatedUrl> related_urls;
  bool refereed = false;
  std::optional<std::string> language;

  /// Throws ValidationError naming the first broken invariant.
  void validate() const;

  bool operator==(const CanonicalRecord&) const = default;
};

/// 16 hex digits of FNV-1a over source and identifier.
std::string make_record_id(std::string_view source, std::string_view oai_identifier);

/// Throws ValidationError when no identifier is an http(s) URL.
CanonicalRecord canonical_from_dc(const parsers::DcRecord& rec, std::string_view source,
                                  std::string_view oai_identifier);

CanonicalRecord canonical_from_junii2(const parsers::Junii2Record& rec, std::string_view source,
                                      std::string_view oai_identifier);

// Record store: UTF-8 JSON, one record per line.

std::string to_json_line(const CanonicalRecord& rec);
/// Throws ParseError / ValidationError.
CanonicalRecord from_json_line(std::string_view line);

enum class StoreMode { Append, Overwrite };

/// Returns the number of records written. Overwrite replaces the file
/// atomically.
std::size_t store_records(const std::vector<CanonicalRecord>& records,
                          const std::filesystem::path& path, StoreMode mode = StoreMode::Append);

struct LoadResult {
  std::vector<CanonicalRecord> records;
  std::vector<std::string> warnings;
};

/// Later lines win on record_id collision; the record keeps the position of
/// its first line. Strict mode throws on the first malformed line; lenient
/// mode skips it with a warning carrying the line number.
LoadResult load_records(const std::filesystem::path& path, bool lenient = false);

/// Replaces records of `base` that share a record_id with `incoming` in
/// place and appends the rest.
std::vector<CanonicalRecord> merge_records(std::vector<CanonicalRecord> base,
                                           const std::vector<CanonicalRecord>& incoming);

}  // namespace dmlkit
