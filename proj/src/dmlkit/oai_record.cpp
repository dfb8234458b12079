#include "dmlkit/oai_record.hpp"

#include <regex>
#include <unordered_map>

#include "dmlkit/text.hpp"
#include "dmlkit/xml.hpp"

namespace dmlkit::oai {

bool is_valid_datestamp(std::string_view s) {
  static const std::regex day(R"(^\d{4}-(0[1-9]|1[0-2])-(0[1-9]|[12]\d|3[01])$)");
  static const std::regex full(
      R"(^\d{4}-(0[1-9]|1[0-2])-(0[1-9]|[12]\d|3[01])T([01]\d|2[0-3]):[0-5]\d:[0-5]\dZ$)");
  return std::regex_match(s.begin(), s.end(), day) || std::regex_match(s.begin(), s.end(), full);
}

bool datestamp_before(std::string_view a, std::string_view b) { return a < b; }

void OaiRecord::validate() const {
  if (identifier.empty()) throw ValidationError("OAI record without identifier");
  for (char c : identifier) {
    if (text::is_space(c)) throw ValidationError("OAI identifier contains whitespace: " + identifier);
  }
  if (!is_valid_datestamp(datestamp)) {
    throw ValidationError("invalid datestamp '" + datestamp + "' for " + identifier);
  }
  if (deleted && payload) throw ValidationError("deleted record carries a payload: " + identifier);
}

namespace {

void find_records(const xml::Node& node, std::vector<const xml::Node*>& out) {
  for (const auto& c : node.children) {
    const auto local = c.local_name();
    if (local == "record") {
      out.push_back(&c);
    } else if (local != "metadata") {
      find_records(c, out);
    }
  }
}

OaiRecord read_record(const xml::Document& doc, const xml::Node& node) {
  const xml::Node* header = node.child("header");
  if (header == nullptr) throw ParseError("OAI record without header");
  OaiRecord rec;
  if (const auto* id = header->child("identifier")) rec.identifier = id->normalized_text();
  if (rec.identifier.empty()) throw ParseError("OAI record header without identifier");
  if (const auto* ds = header->child("datestamp")) rec.datestamp = ds->normalized_text();
  if (!is_valid_datestamp(rec.datestamp)) {
    throw ParseError("invalid datestamp '" + rec.datestamp + "' for " + rec.identifier);
  }
  for (const auto* set : header->children_named("setSpec")) {
    rec.set_specs.push_back(set->normalized_text());
  }
  if (const auto* status = header->attribute("status")) rec.deleted = (*status == "deleted");
  if (!rec.deleted) {
    if (const auto* metadata = node.child("metadata"); metadata && !metadata->children.empty()) {
      rec.payload = std::string(doc.raw(metadata->children.front()));
    }
  }
  return rec;
}

}  // namespace

ListRecordsPage parse_list_records(std::string xml_source) {
  const xml::Document doc = xml::parse(std::move(xml_source));
  ListRecordsPage page;
  std::vector<const xml::Node*> record_nodes;
  if (doc.root.local_name() == "record") {
    record_nodes.push_back(&doc.root);
  } else {
    find_records(doc.root, record_nodes);
  }
  for (const auto* node : record_nodes) page.records.push_back(read_record(doc, *node));

  if (const auto* error = doc.root.child("error")) {
    const auto* code = error->attribute("code");
    page.error = OaiErrorInfo{code ? *code : std::string("unknown"), error->normalized_text()};
  }
  if (const auto* list = doc.root.child("ListRecords")) {
    if (const auto* token = list->child("resumptionToken")) {
      auto value = std::string(text::trim(token->text));
      if (!value.empty()) page.resumption_token = std::move(value);
    }
  }
  return page;
}

std::vector<OaiRecord> parse_oai_envelope(std::string xml_source) {
  return parse_list_records(std::move(xml_source)).records;
}

std::string serialize_list_records(const std::vector<OaiRecord>& records,
                                   const EnvelopeOptions& options) {
  xml::Writer w;
  w.declaration();
  w.open("OAI-PMH", {{"xmlns", std::string(kOaiNamespace)},
                     {"xmlns:xsi", "http://www.w3.org/2001/XMLSchema-instance"},
                     {"xmlns:oai_dc", "http://www.openarchives.org/OAI/2.0/oai_dc/"},
                     {"xmlns:dc", "http://purl.org/dc/elements/1.1/"},
                     {"xsi:schemaLocation",
                      "http://www.openarchives.org/OAI/2.0/ "
                      "http://www.openarchives.org/OAI/2.0/OAI-PMH.xsd"}});
  w.element("responseDate", options.response_date);
  std::vector<xml::Attribute> request_attrs{{"verb", "ListRecords"}};
  if (!options.metadata_prefix.empty()) {
    request_attrs.emplace_back("metadataPrefix", options.metadata_prefix);
  }
  w.element("request", options.request_url, request_attrs);
  if (options.error) {
    w.element("error", options.error->message, {{"code", options.error->code}});
    return w.finish();
  }
  w.open("ListRecords");
  for (const auto& rec : records) {
    w.open("record");
    if (rec.deleted) {
      w.open("header", {{"status", "deleted"}});
    } else {
      w.open("header");
    }
    w.element("identifier", rec.identifier);
    w.element("datestamp", rec.datestamp);
    for (const auto& set : rec.set_specs) w.element("setSpec", set);
    w.close();
    if (rec.payload) {
      w.open("metadata");
      w.raw(*rec.payload);
      w.close();
    }
    w.close();
  }
  if (options.resumption_token) {
    std::vector<xml::Attribute> attrs;
    if (options.complete_list_size) {
      attrs.emplace_back("completeListSize", std::to_string(*options.complete_list_size));
    }
    if (options.cursor) attrs.emplace_back("cursor", std::to_string(*options.cursor));
    if (options.resumption_token->empty()) {
      w.empty("resumptionToken", attrs);
    } else {
      w.element("resumptionToken", *options.resumption_token, attrs);
    }
  }
  w.close();
  return w.finish();
}

std::vector<OaiRecord> dedupe_keep_latest(std::vector<OaiRecord> records) {
  std::vector<OaiRecord> out;
  std::unordered_map<std::string, std::size_t> position;
  for (auto& rec : records) {
    const auto it = position.find(rec.identifier);
    if (it == position.end()) {
      position.emplace(rec.identifier, out.size());
      out.push_back(std::move(rec));
    } else if (!datestamp_before(rec.datestamp, out[it->second].datestamp)) {
      out[it->second] = std::move(rec);
    }
  }
  return out;
}

}  // namespace dmlkit::oai
