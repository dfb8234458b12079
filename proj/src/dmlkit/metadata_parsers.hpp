#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dmlkit/error.hpp"

namespace dmlkit::parsers {

/// oai_dc payload. Scalar fields keep the first occurrence; list fields
/// accumulate in source order.
struct DcRecord {
  std::string title;
  std::vector<std::string> creators;
  std::vector<std::string> subjects;
  std::string publisher;
  std::string date;
  std::string type;
  std::string format;
  std::vector<std::string> identifiers;
  std::string language;
  std::string rights;

  bool operator==(const DcRecord&) const = default;
};

struct Junii2Record {
  std::string title;
  std::vector<std::string> creators;
  std::string ndc;
  std::string publisher;
  std::string nii_type;
  std::vector<std::string> formats;
  std::string uri;
  std::string full_text_url;
  std::string issn;
  std::string ncid;
  std::string jtitle;
  std::string volume;
  std::string issue;
  std::string spage;
  std::string epage;
  std::string date_of_issued;

  bool operator==(const Junii2Record&) const = default;
};

struct Citation {
  std::string journal_title;
  std::optional<std::string> volume;
  std::optional<std::string> issue;
  std::optional<int> year;
  std::optional<unsigned> spage;
  std::optional<unsigned> epage;
  std::string raw;

  /// True when anything beyond the journal title was recognised.
  bool structured() const noexcept { return volume || issue || year || spage; }

  /// "journal volume, no. issue (year), spage-epage" with absent parts left
  /// out. Parsing this text yields the same structured fields.
  std::string render() const;

  bool operator==(const Citation&) const = default;
};

/// Throws ParseError for malformed XML or a wrong root element and
/// ValidationError when title or every dc:identifier is missing.
DcRecord parse_oai_dc(std::string_view payload);

/// Throws ParseError / ValidationError (missing title or URI, non-numeric
/// volume/issue/pages, spage > epage, bad ISSN length).
Junii2Record parse_junii2(std::string_view payload);

/// Total on non-empty input. Unrecognised strings come back with the whole
/// text as journal_title.
Citation parse_citation_string(std::string_view s);

}  // namespace dmlkit::parsers
