#include "dmlkit/serializers.hpp"

#include <set>

#include "dmlkit/text.hpp"
#include "dmlkit/xml.hpp"

namespace dmlkit::serializers {

std::string to_eprints_xml(const CanonicalRecord& rec) {
  xml::Writer w;
  w.declaration();
  w.open("eprints");
  w.open("eprint", {{"xmlns", std::string(kEprintsNamespace)}});
  w.element("rev_number", "1");
  w.element("eprint_status", "archive");
  w.element("userid", "1");
  w.element("metadata_visibility", "show");
  w.element("type", "article");
  w.element("ispublished", "pub");
  if (!rec.subjects.empty()) {
    w.open("subjects");
    for (const auto& s : rec.subjects) w.element("item", s);
    w.close();
  }
  w.element("refereed", rec.refereed ? "TRUE" : "FALSE");
  w.element("full_text_status", rec.full_text_url ? "public" : "none");
  if (rec.date) w.element("date_type", "published");
  if (!rec.publication.empty()) w.element("publication", rec.publication);
  if (rec.datestamp) w.element("datestamp", *rec.datestamp);
  w.element("title", rec.title);
  if (!rec.creators.empty()) {
    w.open("creators_name");
    for (const auto& c : rec.creators) {
      w.open("item");
      w.element("family", c.family);
      if (!c.given.empty()) w.element("given", c.given);
      if (c.raw != c.joined()) w.element("raw", c.raw);
      w.close();
    }
    w.close();
  }
  w.element("official_url", rec.official_url);
  if (rec.pagerange) w.element("pagerange", *rec.pagerange);
  if (rec.volume) w.element("volume", *rec.volume);
  if (rec.issue) w.element("number", *rec.issue);
  if (rec.date) w.element("date", rec.date->iso());
  if (rec.publisher) w.element("publisher", *rec.publisher);
  if (rec.msc_primary) w.element("msc_p", rec.msc_primary->str());
  if (!rec.msc_secondary.empty()) {
    w.open("msc");
    for (const auto& m : rec.msc_secondary) w.element("item", m.str());
    w.close();
  }
  if (rec.mr_number) w.element("mr", std::to_string(*rec.mr_number));
  if (!rec.related_urls.empty()) {
    w.open("related_url");
    for (const auto& r : rec.related_urls) {
      w.open("item");
      w.element("url", r.url);
      w.element("type", r.type);
      w.close();
    }
    w.close();
  }
  w.element("source", rec.source);
  w.element("oai_identifier", rec.oai_identifier);
  if (rec.full_text_url) w.element("full_text_url", *rec.full_text_url);
  if (rec.language) w.element("language", *rec.language);
  return w.finish();
}

namespace {

std::optional<std::string> child_text(const xml::Node& node, std::string_view name) {
  const auto* c = node.child(name);
  if (c == nullptr) return std::nullopt;
  auto value = c->normalized_text();
  if (value.empty()) return std::nullopt;
  return value;
}

std::vector<const xml::Node*> items(const xml::Node& node, std::string_view list_name) {
  const auto* list = node.child(list_name);
  if (list == nullptr) return {};
  return list->children_named("item");
}

}  // namespace

CanonicalRecord from_eprints_xml(std::string_view source_xml) {
  const auto doc = xml::parse(std::string(source_xml));
  const xml::Node* eprint = doc.root.local_name() == "eprint" ? &doc.root : doc.root.child("eprint");
  if (eprint == nullptr) throw ParseError("EPrints document without <eprint>");

  CanonicalRecord rec;
  rec.title = child_text(*eprint, "title").value_or("");
  rec.official_url = child_text(*eprint, "official_url").value_or("");
  rec.source = child_text(*eprint, "source").value_or("eprints");
  rec.oai_identifier = child_text(*eprint, "oai_identifier").value_or(rec.official_url);
  rec.record_id = make_record_id(rec.source, rec.oai_identifier);
  rec.datestamp = child_text(*eprint, "datestamp");
  for (const auto* item : items(*eprint, "subjects")) {
    auto s = item->normalized_text();
    if (!s.empty()) rec.subjects.push_back(std::move(s));
  }
  rec.refereed = child_text(*eprint, "refereed").value_or("") == "TRUE";
  rec.publication = child_text(*eprint, "publication").value_or("");
  for (const auto* item : items(*eprint, "creators_name")) {
    NameParts n;
    n.family = child_text(*item, "family").value_or("");
    n.given = child_text(*item, "given").value_or("");
    n.raw = child_text(*item, "raw").value_or(n.joined());
    rec.creators.push_back(std::move(n));
  }
  rec.pagerange = child_text(*eprint, "pagerange");
  rec.volume = child_text(*eprint, "volume");
  rec.issue = child_text(*eprint, "number");
  if (const auto date = child_text(*eprint, "date")) {
    rec.date = PublicationDate::parse(*date);
    if (!rec.date) throw ValidationError("EPrints date is not ISO-8601: '" + *date + "'");
  }
  rec.publisher = child_text(*eprint, "publisher");
  if (const auto msc_p = child_text(*eprint, "msc_p")) rec.msc_primary = MscCode(*msc_p);
  for (const auto* item : items(*eprint, "msc")) rec.msc_secondary.emplace_back(item->normalized_text());
  if (const auto mr = child_text(*eprint, "mr")) {
    const auto n = text::parse_unsigned(*mr);
    if (!n || *n == 0) throw ValidationError("EPrints mr is not a positive integer: '" + *mr + "'");
    rec.mr_number = *n;
  }
  for (const auto* item : items(*eprint, "related_url")) {
    rec.related_urls.push_back(
        {child_text(*item, "url").value_or(""), child_text(*item, "type").value_or("")});
  }
  rec.full_text_url = child_text(*eprint, "full_text_url");
  rec.language = child_text(*eprint, "language");
  rec.validate();
  return rec;
}

void Aggregation::validate() const {
  if (resource_map_uri.empty()) throw ValidationError("aggregation without resource map URI");
  if (aggregated.empty()) throw ValidationError("aggregation has no aggregated resources");
  std::set<std::string> seen;
  for (const auto& r : aggregated) {
    if (!text::is_absolute_http_url(r.href)) {
      throw ValidationError("aggregated href is not absolute: '" + r.href + "'");
    }
    if (!seen.insert(r.href).second) {
      throw ValidationError("duplicate aggregated href: '" + r.href + "'");
    }
  }
}

std::string to_ore_atom(const Aggregation& aggregation) {
  aggregation.validate();
  const std::string updated =
      !aggregation.modified.empty()
          ? aggregation.modified
          : (!aggregation.created.empty() ? aggregation.created : "1970-01-01T00:00:00Z");
  xml::Writer w('\'');
  w.declaration();
  w.open("atom:entry", {{"xmlns:atom", std::string(kAtomNamespace)},
                        {"xmlns:ore", "http://www.openarchives.org/ore/terms/"}});
  w.element("atom:id", aggregation.resource_map_uri);
  w.element("atom:title",
            aggregation.title.empty() ? aggregation.resource_map_uri : aggregation.title);
  w.element("atom:updated", updated);
  if (!aggregation.created.empty()) w.element("atom:published", aggregation.created);
  w.empty("atom:link", {{"href", aggregation.resource_map_uri},
                        {"rel", "self"},
                        {"type", "application/atom+xml"}});
  w.empty("atom:category", {{"term", "http://www.openarchives.org/ore/terms/Aggregation"},
                            {"scheme", "http://www.openarchives.org/ore/terms/"},
                            {"label", "Aggregation"}});
  w.comment("Aggregated Resources");
  for (const auto& r : aggregation.aggregated) {
    w.empty("atom:link", {{"href", r.href}, {"title", r.title}, {"rel", std::string(kOreAggregatesRel)}});
  }
  return w.finish();
}

namespace {

std::string citation_line(const CanonicalRecord& rec) {
  parsers::Citation c;
  c.journal_title = rec.publication;
  c.volume = rec.volume;
  c.issue = rec.issue;
  if (rec.date) c.year = rec.date->year;
  std::string out = c.render();
  if (rec.pagerange) out += (out.empty() ? "" : ", ") + *rec.pagerange;
  return out;
}

std::string xs_datetime(const std::string& datestamp) {
  return datestamp.size() == 10 ? datestamp + "T00:00:00Z" : datestamp;
}

}  // namespace

std::string to_mets(const CanonicalRecord& rec) {
  if (rec.official_url.empty()) {
    throw ValidationError("METS export needs an official_url: " + rec.oai_identifier);
  }
  xml::Writer w;
  w.declaration();
  w.open("mets:mets",
         {{"xmlns:mets", std::string(kMetsNamespace)},
          {"xmlns:xlink", "http://www.w3.org/1999/xlink"},
          {"xmlns:dc", "http://purl.org/dc/elements/1.1/"},
          {"xmlns:xsi", "http://www.w3.org/2001/XMLSchema-instance"},
          {"xsi:schemaLocation", "http://www.loc.gov/METS/ http://www.loc.gov/standards/mets/mets.xsd"},
          {"OBJID", rec.record_id},
          {"LABEL", rec.title},
          {"TYPE", "article"}});
  std::vector<xml::Attribute> header_attrs;
  if (rec.datestamp) header_attrs.emplace_back("CREATEDATE", xs_datetime(*rec.datestamp));
  w.open("mets:metsHdr", header_attrs);
  w.open("mets:agent", {{"ROLE", "CREATOR"}, {"TYPE", "ORGANIZATION"}});
  w.element("mets:name", rec.source);
  w.close();
  w.close();

  w.open("mets:dmdSec", {{"ID", "dmd1"}});
  w.open("mets:mdWrap", {{"MDTYPE", "DC"}, {"MIMETYPE", "text/xml"}});
  w.open("mets:xmlData");
  w.element("dc:title", rec.title);
  for (const auto& c : rec.creators) w.element("dc:creator", c.raw);
  if (rec.msc_primary) w.element("dc:subject", rec.msc_primary->str());
  for (const auto& m : rec.msc_secondary) w.element("dc:subject", m.str());
  if (rec.publisher) w.element("dc:publisher", *rec.publisher);
  if (rec.date) w.element("dc:date", rec.date->iso());
  w.element("dc:type", "Text");
  w.element("dc:identifier", rec.official_url);
  if (const auto cite = citation_line(rec); !cite.empty()) w.element("dc:source", cite);
  for (const auto& r : rec.related_urls) w.element("dc:relation", r.url);
  if (rec.language) w.element("dc:language", *rec.language);
  w.close();
  w.close();
  w.close();

  w.open("mets:fileSec");
  if (rec.full_text_url) {
    w.open("mets:fileGrp", {{"USE", "CONTENT"}});
    w.open("mets:file", {{"ID", "file1"}, {"MIMETYPE", "application/pdf"}});
    w.empty("mets:FLocat", {{"LOCTYPE", "URL"}, {"xlink:href", *rec.full_text_url}});
    w.close();
    w.close();
  } else {
    w.empty("mets:fileGrp", {{"USE", "CONTENT"}});
  }
  w.close();

  w.open("mets:structMap", {{"TYPE", "LOGICAL"}});
  if (rec.full_text_url) {
    w.open("mets:div", {{"ID", "div1"}, {"DMDID", "dmd1"}, {"TYPE", "article"}});
    w.empty("mets:fptr", {{"FILEID", "file1"}});
    w.close();
  } else {
    w.empty("mets:div", {{"ID", "div1"}, {"DMDID", "dmd1"}, {"TYPE", "article"}});
  }
  w.close();
  return w.finish();
}

DepositResult deposit_package(http::Transport& transport, const std::string& url,
                              const std::string& package) {
  const http::Headers headers{{"X-Packaging", std::string(kMetsNamespace)},
                              {"Content-Disposition", "filename=mets.xml"}};
  const auto response = transport.post(url, package, "application/xml", headers);
  return DepositResult{response.status, response.body};
}

}  // namespace dmlkit::serializers
