#include "dmlkit/record_model.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <regex>
#include <unordered_map>

#include "dmlkit/oai_record.hpp"
#include "dmlkit/text.hpp"

namespace dmlkit {

using nlohmann::json;
namespace fs = std::filesystem;

MscCode::MscCode(std::string_view code) : code_(code) {
  if (!is_valid(code)) throw ValidationError("invalid MSC code '" + std::string(code) + "'");
}

bool MscCode::is_valid(std::string_view code) {
  if (code.size() == 2) return text::is_digit(code[0]) && text::is_digit(code[1]);
  if (code.size() != 5) return false;
  const char third = code[2];
  return text::is_digit(code[0]) && text::is_digit(code[1]) &&
         ((third >= 'A' && third <= 'Z') || third == '-') && text::is_alnum(code[3]) &&
         text::is_alnum(code[4]);
}

std::optional<MscCode> MscCode::parse(std::string_view code) {
  if (!is_valid(code)) return std::nullopt;
  return MscCode(code);
}

std::optional<PublicationDate> PublicationDate::parse(std::string_view s) {
  static const std::regex pattern(R"(^(\d{4})(?:-(\d{2})(?:-(\d{2})(?:T.*)?)?)?$)");
  const std::string str(text::trim(s));
  std::smatch m;
  if (!std::regex_match(str, m, pattern)) return std::nullopt;
  PublicationDate d;
  d.year = std::stoi(m[1].str());
  if (m[2].matched) {
    d.month = std::stoi(m[2].str());
    if (*d.month < 1 || *d.month > 12) return std::nullopt;
  }
  if (m[3].matched) {
    d.day = std::stoi(m[3].str());
    if (*d.day < 1 || *d.day > 31) return std::nullopt;
  }
  return d;
}

std::string PublicationDate::iso() const {
  char buffer[16];
  if (month && day) {
    std::snprintf(buffer, sizeof buffer, "%04d-%02d-%02d", year, *month, *day);
  } else if (month) {
    std::snprintf(buffer, sizeof buffer, "%04d-%02d", year, *month);
  } else {
    std::snprintf(buffer, sizeof buffer, "%04d", year);
  }
  return buffer;
}

NameParts NameParts::split(std::string_view raw) {
  NameParts n;
  n.raw = text::collapse_whitespace(raw);
  const auto comma = n.raw.find(',');
  if (comma == std::string::npos) {
    n.family = n.raw;
  } else {
    n.family = text::collapse_whitespace(std::string_view(n.raw).substr(0, comma));
    n.given = text::collapse_whitespace(std::string_view(n.raw).substr(comma + 1));
  }
  return n;
}

std::string NameParts::joined() const { return given.empty() ? family : family + ", " + given; }

std::string make_record_id(std::string_view source, std::string_view oai_identifier) {
  std::uint64_t hash = 14695981039346656037ULL;
  const auto mix = [&hash](std::string_view bytes) {
    for (unsigned char c : bytes) {
      hash ^= c;
      hash *= 1099511628211ULL;
    }
  };
  mix(source);
  mix(std::string_view("\x1f", 1));
  mix(oai_identifier);
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

namespace {

void require_collapsed(std::string_view value, const char* field) {
  if (!text::is_collapsed(value)) {
    throw ValidationError(std::string("field ") + field + " is not whitespace-normalized");
  }
}

void require_collapsed(const std::string& value, const char* field) {
  require_collapsed(std::string_view(value), field);
}

void require_collapsed(const std::optional<std::string>& value, const char* field) {
  if (value) {
    if (value->empty()) throw ValidationError(std::string("field ") + field + " is present but empty");
    require_collapsed(std::string_view(*value), field);
  }
}

std::optional<std::string> nonempty(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s;
}

}  // namespace

void CanonicalRecord::validate() const {
  if (source.empty()) throw ValidationError("record without source");
  if (oai_identifier.empty()) throw ValidationError("record without OAI identifier");
  if (record_id != make_record_id(source, oai_identifier)) {
    throw ValidationError("record_id does not match (source, oai_identifier) for " + oai_identifier);
  }
  if (datestamp && !oai::is_valid_datestamp(*datestamp)) {
    throw ValidationError("invalid datestamp '" + *datestamp + "'");
  }
  if (title.empty()) throw ValidationError("record without title: " + oai_identifier);
  require_collapsed(title, "title");
  require_collapsed(publication, "publication");
  require_collapsed(volume, "volume");
  require_collapsed(issue, "issue");
  require_collapsed(pagerange, "pagerange");
  require_collapsed(publisher, "publisher");
  require_collapsed(language, "language");
  for (const auto& c : creators) {
    require_collapsed(c.family, "creator family");
    require_collapsed(c.given, "creator given");
    require_collapsed(c.raw, "creator raw");
  }
  for (const auto& s : subjects) {
    if (s.empty()) throw ValidationError("empty subject");
    require_collapsed(s, "subject");
  }
  if (date) {
    if (date->year < 0 || date->year > 9999 || (date->day && !date->month) ||
        (date->month && (*date->month < 1 || *date->month > 12)) ||
        (date->day && (*date->day < 1 || *date->day > 31))) {
      throw ValidationError("invalid publication date for " + oai_identifier);
    }
  }
  if (!text::is_absolute_http_url(official_url)) {
    throw ValidationError("official_url is not absolute: '" + official_url + "'");
  }
  if (full_text_url && !text::is_absolute_http_url(*full_text_url)) {
    throw ValidationError("full_text_url is not absolute: '" + *full_text_url + "'");
  }
  if (mr_number && *mr_number == 0) throw ValidationError("mr_number must be positive");
  for (const auto& r : related_urls) {
    if (r.url.empty() || r.type.empty()) throw ValidationError("related_url with empty url or type");
    require_collapsed(r.url, "related_url");
    require_collapsed(r.type, "related_url type");
  }
}

CanonicalRecord canonical_from_dc(const parsers::DcRecord& rec, std::string_view source,
                                  std::string_view oai_identifier) {
  CanonicalRecord out;
  out.source = std::string(source);
  out.oai_identifier = std::string(oai_identifier);
  out.record_id = make_record_id(source, oai_identifier);
  out.title = text::collapse_whitespace(rec.title);
  for (const auto& c : rec.creators) out.creators.push_back(NameParts::split(c));
  out.publisher = nonempty(text::collapse_whitespace(rec.publisher));
  out.language = nonempty(text::collapse_whitespace(rec.language));
  out.date = PublicationDate::parse(rec.date);

  std::optional<parsers::Citation> citation;
  for (const auto& raw_id : rec.identifiers) {
    const auto id = text::collapse_whitespace(raw_id);
    if (id.empty()) continue;
    if (text::starts_with_icase(id, "doi:")) {
      out.related_urls.push_back({id, std::string(kRelatedDoi)});
    } else if (text::is_absolute_http_url(id)) {
      if (out.official_url.empty()) {
        out.official_url = id;
      } else {
        out.related_urls.push_back({id, "url"});
      }
    } else if (!citation) {
      auto parsed = parsers::parse_citation_string(id);
      if (parsed.structured()) citation = std::move(parsed);
    }
  }
  if (out.official_url.empty()) {
    throw ValidationError("oai_dc record " + std::string(oai_identifier) +
                          " has no URL identifier");
  }

  if (citation) {
    out.publication = citation->journal_title;
    out.volume = citation->volume;
    out.issue = citation->issue;
    if (citation->spage && citation->epage) {
      out.pagerange = std::to_string(*citation->spage) + "-" + std::to_string(*citation->epage);
    }
    if (citation->year && (!out.date || out.date->year != *citation->year)) {
      out.date = PublicationDate{*citation->year, std::nullopt, std::nullopt};
    }
  }

  for (const auto& raw_subject : rec.subjects) {
    auto subject = text::collapse_whitespace(raw_subject);
    if (subject.empty()) continue;
    if (auto code = MscCode::parse(subject)) {
      if (std::find(out.msc_secondary.begin(), out.msc_secondary.end(), *code) ==
          out.msc_secondary.end()) {
        out.msc_secondary.push_back(*code);
      }
    }
    out.subjects.push_back(std::move(subject));
  }
  return out;
}

CanonicalRecord canonical_from_junii2(const parsers::Junii2Record& rec, std::string_view source,
                                      std::string_view oai_identifier) {
  CanonicalRecord out;
  out.source = std::string(source);
  out.oai_identifier = std::string(oai_identifier);
  out.record_id = make_record_id(source, oai_identifier);
  out.title = text::collapse_whitespace(rec.title);
  for (const auto& c : rec.creators) out.creators.push_back(NameParts::split(c));
  out.publication = text::collapse_whitespace(rec.jtitle);
  out.volume = nonempty(rec.volume);
  out.issue = nonempty(rec.issue);
  if (!rec.spage.empty()) {
    out.pagerange = rec.epage.empty() ? rec.spage : rec.spage + "-" + rec.epage;
  }
  out.date = PublicationDate::parse(rec.date_of_issued);
  out.publisher = nonempty(text::collapse_whitespace(rec.publisher));
  out.official_url = text::collapse_whitespace(rec.uri);
  out.full_text_url = nonempty(text::collapse_whitespace(rec.full_text_url));
  if (!text::is_absolute_http_url(out.official_url)) {
    throw ValidationError("junii2 URI is not an absolute URL: '" + out.official_url + "'");
  }
  return out;
}

namespace {

void put(json& j, const char* key, const std::optional<std::string>& value) {
  if (value) j[key] = *value;
}

std::optional<std::string> get_opt(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace

std::string to_json_line(const CanonicalRecord& rec) {
  json j;
  j["record_id"] = rec.record_id;
  j["source"] = rec.source;
  j["oai_identifier"] = rec.oai_identifier;
  put(j, "datestamp", rec.datestamp);
  j["title"] = rec.title;
  j["creators"] = json::array();
  for (const auto& c : rec.creators) {
    j["creators"].push_back({{"family", c.family}, {"given", c.given}, {"raw", c.raw}});
  }
  j["publication"] = rec.publication;
  put(j, "volume", rec.volume);
  put(j, "issue", rec.issue);
  put(j, "pagerange", rec.pagerange);
  if (rec.date) j["date"] = rec.date->iso();
  put(j, "publisher", rec.publisher);
  j["official_url"] = rec.official_url;
  put(j, "full_text_url", rec.full_text_url);
  j["subjects"] = rec.subjects;
  if (rec.msc_primary) j["msc_primary"] = rec.msc_primary->str();
  j["msc_secondary"] = json::array();
  for (const auto& m : rec.msc_secondary) j["msc_secondary"].push_back(m.str());
  if (rec.mr_number) j["mr_number"] = *rec.mr_number;
  j["related_urls"] = json::array();
  for (const auto& r : rec.related_urls) j["related_urls"].push_back({{"url", r.url}, {"type", r.type}});
  j["refereed"] = rec.refereed;
  put(j, "language", rec.language);
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

CanonicalRecord from_json_line(std::string_view line) {
  CanonicalRecord rec;
  try {
    const json j = json::parse(line);
    if (!j.is_object()) throw ParseError("record line is not a JSON object");
    rec.record_id = j.at("record_id").get<std::string>();
    rec.source = j.at("source").get<std::string>();
    rec.oai_identifier = j.at("oai_identifier").get<std::string>();
    rec.datestamp = get_opt(j, "datestamp");
    rec.title = j.at("title").get<std::string>();
    for (const auto& c : j.value("creators", json::array())) {
      rec.creators.push_back(
          {c.at("family").get<std::string>(), c.at("given").get<std::string>(), c.at("raw").get<std::string>()});
    }
    rec.publication = j.value("publication", std::string());
    rec.volume = get_opt(j, "volume");
    rec.issue = get_opt(j, "issue");
    rec.pagerange = get_opt(j, "pagerange");
    if (const auto date = get_opt(j, "date")) {
      rec.date = PublicationDate::parse(*date);
      if (!rec.date) throw ValidationError("invalid date '" + *date + "'");
    }
    rec.publisher = get_opt(j, "publisher");
    rec.official_url = j.at("official_url").get<std::string>();
    rec.full_text_url = get_opt(j, "full_text_url");
    rec.subjects = j.value("subjects", std::vector<std::string>{});
    if (const auto primary = get_opt(j, "msc_primary")) rec.msc_primary = MscCode(*primary);
    for (const auto& m : j.value("msc_secondary", std::vector<std::string>{})) {
      rec.msc_secondary.emplace_back(m);
    }
    if (j.contains("mr_number")) rec.mr_number = j.at("mr_number").get<std::uint64_t>();
    for (const auto& r : j.value("related_urls", json::array())) {
      rec.related_urls.push_back({r.at("url").get<std::string>(), r.at("type").get<std::string>()});
    }
    rec.refereed = j.value("refereed", false);
    rec.language = get_opt(j, "language");
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad record line: ") + e.what());
  }
  rec.validate();
  return rec;
}

std::size_t store_records(const std::vector<CanonicalRecord>& records, const fs::path& path,
                          StoreMode mode) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  const fs::path target = mode == StoreMode::Overwrite ? fs::path(path.string() + ".tmp") : path;
  {
    std::ofstream out(target, mode == StoreMode::Append ? std::ios::binary | std::ios::app
                                                        : std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open record store " + target.string());
    for (const auto& rec : records) out << to_json_line(rec) << '\n';
    out.flush();
    if (!out) throw IoError("write to record store " + target.string() + " failed");
  }
  if (mode == StoreMode::Overwrite) {
    fs::rename(target, path, ec);
    if (ec) throw IoError("cannot replace record store " + path.string() + ": " + ec.message());
  }
  return records.size();
}

LoadResult load_records(const fs::path& path, bool lenient) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open record store " + path.string());
  LoadResult result;
  std::unordered_map<std::string, std::size_t> position;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    CanonicalRecord rec;
    try {
      rec = from_json_line(line);
    } catch (const Error& e) {
      const std::string message =
          path.string() + ": line " + std::to_string(line_number) + ": " + e.what();
      if (!lenient) throw ParseError(message);
      result.warnings.push_back(message);
      continue;
    }
    const auto it = position.find(rec.record_id);
    if (it == position.end()) {
      position.emplace(rec.record_id, result.records.size());
      result.records.push_back(std::move(rec));
    } else {
      result.records[it->second] = std::move(rec);
    }
  }
  if (in.bad()) throw IoError("read from record store " + path.string() + " failed");
  return result;
}

std::vector<CanonicalRecord> merge_records(std::vector<CanonicalRecord> base,
                                           const std::vector<CanonicalRecord>& incoming) {
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < base.size(); ++i) position.emplace(base[i].record_id, i);
  for (const auto& rec : incoming) {
    const auto it = position.find(rec.record_id);
    if (it == position.end()) {
      position.emplace(rec.record_id, base.size());
      base.push_back(rec);
    } else {
      base[it->second] = rec;
    }
  }
  return base;
}

}  // namespace dmlkit
