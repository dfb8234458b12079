#include "dmlkit/metadata_parsers.hpp"

#include <regex>

#include "dmlkit/text.hpp"
#include "dmlkit/xml.hpp"

namespace dmlkit::parsers {

namespace {

void set_first(std::string& field, const xml::Node& node) {
  if (field.empty()) field = node.normalized_text();
}

void append_nonempty(std::vector<std::string>& list, const xml::Node& node) {
  auto value = node.normalized_text();
  if (!value.empty()) list.push_back(std::move(value));
}

}  // namespace

DcRecord parse_oai_dc(std::string_view payload) {
  const auto doc = xml::parse(std::string(payload));
  const auto root = doc.root.local_name();
  if (root != "dc" && root != "oai_dc") {
    throw ParseError("oai_dc payload rooted at <" + doc.root.name + ">");
  }
  DcRecord rec;
  for (const auto& child : doc.root.children) {
    const auto name = child.local_name();
    if (name == "title") set_first(rec.title, child);
    else if (name == "creator") append_nonempty(rec.creators, child);
    else if (name == "subject") append_nonempty(rec.subjects, child);
    else if (name == "publisher") set_first(rec.publisher, child);
    else if (name == "date") set_first(rec.date, child);
    else if (name == "type") set_first(rec.type, child);
    else if (name == "format") set_first(rec.format, child);
    else if (name == "identifier") append_nonempty(rec.identifiers, child);
    else if (name == "language") set_first(rec.language, child);
    else if (name == "rights") set_first(rec.rights, child);
  }
  if (rec.title.empty()) throw ValidationError("oai_dc record without dc:title");
  if (rec.identifiers.empty()) throw ValidationError("oai_dc record without dc:identifier");
  return rec;
}

Junii2Record parse_junii2(std::string_view payload) {
  const auto doc = xml::parse(std::string(payload));
  if (doc.root.local_name() != "meta") {
    throw ParseError("junii2 payload rooted at <" + doc.root.name + ">");
  }
  Junii2Record rec;
  for (const auto& child : doc.root.children) {
    const auto name = child.local_name();
    if (name == "title") set_first(rec.title, child);
    else if (name == "creator") append_nonempty(rec.creators, child);
    else if (name == "NDC") set_first(rec.ndc, child);
    else if (name == "publisher") set_first(rec.publisher, child);
    else if (name == "NIItype") set_first(rec.nii_type, child);
    else if (name == "format") append_nonempty(rec.formats, child);
    else if (name == "URI") set_first(rec.uri, child);
    else if (name == "fullTextURL") set_first(rec.full_text_url, child);
    else if (name == "issn") set_first(rec.issn, child);
    else if (name == "NCID") set_first(rec.ncid, child);
    else if (name == "jtitle") set_first(rec.jtitle, child);
    else if (name == "volume") set_first(rec.volume, child);
    else if (name == "issue") set_first(rec.issue, child);
    else if (name == "spage") set_first(rec.spage, child);
    else if (name == "epage") set_first(rec.epage, child);
    else if (name == "dateofissued") set_first(rec.date_of_issued, child);
  }
  if (rec.title.empty()) throw ValidationError("junii2 record without title");
  if (rec.uri.empty()) throw ValidationError("junii2 record without URI");

  const auto digits_or_empty = [](const std::string& value, const char* field) {
    if (!value.empty() && !text::all_digits(value)) {
      throw ValidationError(std::string("junii2 ") + field + " is not numeric: '" + value + "'");
    }
  };
  digits_or_empty(rec.volume, "volume");
  digits_or_empty(rec.issue, "issue");
  digits_or_empty(rec.spage, "spage");
  digits_or_empty(rec.epage, "epage");
  if (!rec.spage.empty() && !rec.epage.empty()) {
    const auto s = text::parse_unsigned(rec.spage);
    const auto e = text::parse_unsigned(rec.epage);
    if (s && e && *s > *e) {
      throw ValidationError("junii2 page range inverted: " + rec.spage + "-" + rec.epage);
    }
  }
  if (!rec.issn.empty()) {
    std::string compact;
    for (char c : rec.issn) {
      if (c != '-') compact.push_back(c);
    }
    if (compact.size() != 8) throw ValidationError("junii2 issn is not 8 characters: " + rec.issn);
  }
  return rec;
}

// Citation grammar, applied right to left:
//   [journal] [vol.] volume [, no. issue] [(year)] [, pp. spage-epage]
namespace {

bool is_separator_char(char c) { return c == ',' || c == ';' || c == ':'; }

// Drops trailing whitespace, commas, semicolons, colons and a period that
// stands alone after a space. An abbreviation period ("J.") is kept.
void strip_separators(std::string& s) {
  while (!s.empty()) {
    const char last = s.back();
    if (text::is_space(last) || is_separator_char(last)) {
      s.pop_back();
    } else if (last == '.' && (s.size() == 1 || text::is_space(s[s.size() - 2]))) {
      s.pop_back();
    } else {
      break;
    }
  }
}

bool ends_with_marker(const std::string& s, std::string_view marker) {
  if (s.size() < marker.size()) return false;
  const auto start = s.size() - marker.size();
  if (!text::starts_with_icase(std::string_view(s).substr(start), marker)) return false;
  return start == 0 || !text::is_alnum(s[start - 1]);
}

void strip_page_marker(std::string& s) {
  strip_separators(s);
  for (const auto marker : {std::string_view("pp."), std::string_view("p.")}) {
    if (ends_with_marker(s, marker)) {
      s.resize(s.size() - marker.size());
      break;
    }
  }
  strip_separators(s);
}

void strip_volume_marker(std::string& s) {
  bool changed = true;
  while (changed) {
    changed = false;
    strip_separators(s);
    for (const auto marker :
         {std::string_view("vol."), std::string_view("volume"), std::string_view("vol")}) {
      if (ends_with_marker(s, marker)) {
        s.resize(s.size() - marker.size());
        changed = true;
        break;
      }
    }
  }
}

struct PageMatch {
  std::size_t start;
  unsigned spage;
  unsigned epage;
};

std::optional<PageMatch> match_pages(const std::string& s) {
  static const std::regex pattern(R"((\d{1,9})[ ]?(?:-|\xE2\x80\x93|\xE2\x80\x94)[ ]?(\d{1,9})$)");
  std::smatch m;
  if (!std::regex_search(s, m, pattern)) return std::nullopt;
  const auto start = static_cast<std::size_t>(m.position(0));
  if (start > 0) {
    const char before = s[start - 1];
    if (text::is_alnum(before) || before == '-' || before == '/' ||
        static_cast<unsigned char>(before) >= 0x80) {
      return std::nullopt;
    }
  }
  return PageMatch{start, static_cast<unsigned>(*text::parse_unsigned(m[1].str())),
                   static_cast<unsigned>(*text::parse_unsigned(m[2].str()))};
}

}  // namespace

Citation parse_citation_string(std::string_view s) {
  if (text::trim(s).empty()) throw InvalidArgument("citation string is empty");
  Citation c;
  c.raw = std::string(s);
  const std::string whole = text::collapse_whitespace(s);

  std::string head = whole;
  strip_separators(head);
  // "pp. 43-46." ends the citation with a sentence period
  if (head.size() > 1 && head.back() == '.' && text::is_digit(head[head.size() - 2])) {
    head.pop_back();
    strip_separators(head);
  }
  if (const auto pages = match_pages(head)) {
    c.spage = pages->spage;
    c.epage = pages->epage;
    head.resize(pages->start);
    strip_page_marker(head);
  }

  if (head.size() >= 6 && head.back() == ')' && head[head.size() - 6] == '(' &&
      text::all_digits(std::string_view(head).substr(head.size() - 5, 4))) {
    const int year = std::stoi(head.substr(head.size() - 5, 4));
    if (year >= 1600 && year <= 2100) {
      c.year = year;
      head.resize(head.size() - 6);
      strip_separators(head);
    }
  }

  static const std::regex issue_pattern(
      R"((?:^|[\s,(])(no\.|issue)\s?([0-9A-Za-z]+(?:[-/][0-9A-Za-z]+)?)$)", std::regex::icase);
  std::smatch m;
  if (std::regex_search(head, m, issue_pattern)) {
    c.issue = m[2].str();
    head.resize(static_cast<std::size_t>(m.position(1)));
    strip_separators(head);
  }

  static const std::regex volume_pattern(R"((?:^|[\s,])(\d{1,9})$)");
  if (std::regex_search(head, m, volume_pattern)) {
    c.volume = m[1].str();
    head.resize(static_cast<std::size_t>(m.position(1)));
    strip_volume_marker(head);
  }

  if (!c.structured()) {
    c.journal_title = whole;
    return c;
  }
  strip_separators(head);
  c.journal_title = std::move(head);
  return c;
}

std::string Citation::render() const {
  std::string out = journal_title;
  const auto add = [&out](std::string_view joiner, const std::string& piece) {
    if (!out.empty()) out += joiner;
    out += piece;
  };
  if (volume) add(" ", *volume);
  if (issue) add(", ", "no. " + *issue);
  if (year) add(" ", "(" + std::to_string(*year) + ")");
  if (spage && epage) add(", ", std::to_string(*spage) + "-" + std::to_string(*epage));
  return out;
}

}  // namespace dmlkit::parsers
