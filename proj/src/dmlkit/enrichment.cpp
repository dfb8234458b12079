#include "dmlkit/enrichment.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "dmlkit/text.hpp"

namespace dmlkit::enrichment {

std::string review_url(std::uint64_t mr_number) {
  return std::string(kReviewUrlPrefix) + std::to_string(mr_number);
}

std::string MatchKey::render() const {
  return journal_norm + "|" + volume + "|" + year + "|" + spage;
}

namespace {

// Latin-1 supplement letters U+00C0..U+00FF folded to ASCII; '\0' marks
// code points with no ASCII letter equivalent.
constexpr char kLatin1Fold[64] = {
    'a', 'a', 'a', 'a', 'a', 'a', 'a', 'c', 'e', 'e', 'e', 'e', 'i', 'i', 'i', 'i',
    'd', 'n', 'o', 'o', 'o', 'o', 'o', 0,   'o', 'u', 'u', 'u', 'u', 'y', 0,   's',
    'a', 'a', 'a', 'a', 'a', 'a', 'a', 'c', 'e', 'e', 'e', 'e', 'i', 'i', 'i', 'i',
    'd', 'n', 'o', 'o', 'o', 'o', 'o', 0,   'o', 'u', 'u', 'u', 'u', 'y', 0,   'y'};

void push_ascii(std::string& out, char c) {
  if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  if (text::is_alnum(c)) {
    out.push_back(c);
  } else {
    out.push_back(' ');
  }
}

std::string normalize_volume(std::string_view v) {
  std::string out = text::to_lower_ascii(text::collapse_whitespace(v));
  if (text::all_digits(out)) {
    const auto n = text::parse_unsigned(out);
    if (n) out = std::to_string(*n);
  }
  return out;
}

}  // namespace

std::string normalize_journal(std::string_view title) {
  std::string out;
  std::size_t i = 0;
  while (i < title.size()) {
    const auto c = static_cast<unsigned char>(title[i]);
    if (c < 0x80) {
      push_ascii(out, static_cast<char>(c));
      ++i;
      continue;
    }
    // U+00C0..U+00FF: C3 80..C3 BF
    if (c == 0xC3 && i + 1 < title.size()) {
      const auto c2 = static_cast<unsigned char>(title[i + 1]);
      if (c2 >= 0x80 && c2 <= 0xBF && kLatin1Fold[c2 - 0x80] != 0) {
        out.push_back(kLatin1Fold[c2 - 0x80]);
        i += 2;
        continue;
      }
    }
    // Full-width ASCII U+FF01..U+FF5E: EF BC 81..EF BD 9E
    if (c == 0xEF && i + 2 < title.size()) {
      const auto c2 = static_cast<unsigned char>(title[i + 1]);
      const auto c3 = static_cast<unsigned char>(title[i + 2]);
      int cp = -1;
      if (c2 == 0xBC && c3 >= 0x81 && c3 <= 0xBF) cp = 0xFF00 + (c3 - 0x80);
      if (c2 == 0xBD && c3 >= 0x80 && c3 <= 0x9E) cp = 0xFF40 + (c3 - 0x80);
      if (cp >= 0xFF01) {
        push_ascii(out, static_cast<char>(cp - 0xFF01 + 0x21));
        i += 3;
        continue;
      }
    }
    // U+3000 ideographic space
    if (c == 0xE3 && i + 2 < title.size() && static_cast<unsigned char>(title[i + 1]) == 0x80 &&
        static_cast<unsigned char>(title[i + 2]) == 0x80) {
      out.push_back(' ');
      i += 3;
      continue;
    }
    out.push_back(static_cast<char>(c));
    ++i;
  }
  return text::collapse_whitespace(out);
}

MatchKey make_key(std::string_view journal, std::string_view volume, int year,
                  std::string_view spage) {
  return MatchKey{normalize_journal(journal), normalize_volume(volume), std::to_string(year),
                  normalize_volume(spage)};
}

std::optional<MatchKey> make_match_key(const CanonicalRecord& rec) {
  if (normalize_journal(rec.publication).empty() || !rec.date) return std::nullopt;
  std::string_view spage;
  if (rec.pagerange) {
    spage = *rec.pagerange;
    if (const auto dash = spage.find('-'); dash != std::string_view::npos) {
      spage = spage.substr(0, dash);
    }
  }
  return make_key(rec.publication, rec.volume.value_or(""), rec.date->year, spage);
}

std::string msc_top_level(std::string_view code) { return MscCode(code).top_level(); }

MrTable parse_mr_table(std::string_view content, const std::string& origin) {
  MrTable table;
  std::map<MatchKey, std::size_t> first_line;
  std::istringstream in{std::string(content)};
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto where = origin + ":" + std::to_string(line_number);
    auto cols = text::split(line, '\t');
    if (line_number == 1 || table.empty()) {
      if (text::to_lower_ascii(text::trim(cols[0])) == "journal") continue;
    }
    if (cols.size() < 6 || cols.size() > 7) {
      throw ValidationError(where + ": expected 7 tab-separated columns, found " +
                            std::to_string(cols.size()));
    }
    cols.resize(7);
    for (auto& c : cols) c = std::string(text::trim(c));

    const auto year = text::parse_unsigned(cols[2]);
    if (!year || *year < 1600 || *year > 2100) {
      throw ValidationError(where + ": bad year '" + cols[2] + "'");
    }
    const auto mr = text::parse_unsigned(cols[4]);
    if (!mr || *mr == 0) throw ValidationError(where + ": bad mr_number '" + cols[4] + "'");
    if (!MscCode::is_valid(cols[5])) {
      throw ValidationError(where + ": malformed MSC code '" + cols[5] + "'");
    }
    MrEntry entry;
    entry.mr_number = *mr;
    entry.msc_primary = MscCode(cols[5]);
    for (const auto& piece : text::split(cols[6], ';')) {
      const auto code = text::trim(piece);
      if (code.empty()) continue;
      if (!MscCode::is_valid(code)) {
        throw ValidationError(where + ": malformed MSC code '" + std::string(code) + "'");
      }
      entry.msc_secondary.emplace_back(code);
    }
    entry.match_key = make_key(cols[0], cols[1], static_cast<int>(*year), cols[3]);
    if (entry.match_key.journal_norm.empty()) throw ValidationError(where + ": empty journal");

    if (const auto it = first_line.find(entry.match_key); it != first_line.end()) {
      throw ValidationError(origin + ": duplicate key '" + entry.match_key.render() + "' on lines " +
                            std::to_string(it->second) + " and " + std::to_string(line_number));
    }
    first_line.emplace(entry.match_key, line_number);
    table.emplace(entry.match_key, std::move(entry));
  }
  return table;
}

MrTable load_mr_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open MR table " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_mr_table(buffer.str(), path.string());
}

EnrichResult enrich(std::vector<CanonicalRecord> records, const MrTable& table) {
  EnrichResult result;
  for (auto& rec : records) {
    const auto key = make_match_key(rec);
    if (!key) {
      ++result.report.skipped;
      result.report.diagnostics.push_back("skipped " + rec.oai_identifier +
                                          ": no journal title or year");
      continue;
    }
    const auto it = table.find(*key);
    if (it == table.end()) {
      ++result.report.unmatched;
      continue;
    }
    const MrEntry& entry = it->second;
    ++result.report.matched;
    rec.mr_number = entry.mr_number;
    rec.msc_primary = entry.msc_primary;
    for (const auto& code : entry.msc_secondary) {
      if (std::find(rec.msc_secondary.begin(), rec.msc_secondary.end(), code) ==
          rec.msc_secondary.end()) {
        rec.msc_secondary.push_back(code);
      }
    }
    RelatedUrl review{review_url(entry.mr_number), std::string(kRelatedMathSciNet)};
    if (std::find(rec.related_urls.begin(), rec.related_urls.end(), review) ==
        rec.related_urls.end()) {
      rec.related_urls.push_back(std::move(review));
    }
  }
  result.records = std::move(records);
  return result;
}

}  // namespace dmlkit::enrichment
