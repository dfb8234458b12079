#include "dmlkit/xml.hpp"

#include <expat.h>

#include <memory>

#include "dmlkit/error.hpp"
#include "dmlkit/text.hpp"

namespace dmlkit::xml {

std::string_view Node::local_name() const noexcept {
  const std::string_view n(name);
  const auto colon = n.find(':');
  return colon == std::string_view::npos ? n : n.substr(colon + 1);
}

const Node* Node::child(std::string_view local) const noexcept {
  for (const auto& c : children) {
    if (c.local_name() == local) return &c;
  }
  return nullptr;
}

std::vector<const Node*> Node::children_named(std::string_view local) const {
  std::vector<const Node*> out;
  for (const auto& c : children) {
    if (c.local_name() == local) out.push_back(&c);
  }
  return out;
}

const std::string* Node::attribute(std::string_view attr_name) const noexcept {
  for (const auto& [k, v] : attributes) {
    if (k == attr_name) return &v;
  }
  return nullptr;
}

std::string Node::normalized_text() const { return text::collapse_whitespace(text); }

namespace {

void collect(const Node& node, std::string_view local, std::vector<const Node*>& out) {
  for (const auto& c : node.children) {
    if (c.local_name() == local) out.push_back(&c);
    collect(c, local, out);
  }
}

bool is_forbidden_control(char c) noexcept {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x20 && c != '\t' && c != '\n' && c != '\r';
}

struct ParserDeleter {
  void operator()(XML_Parser p) const noexcept { XML_ParserFree(p); }
};
using ParserPtr = std::unique_ptr<std::remove_pointer_t<XML_Parser>, ParserDeleter>;

struct BuildState {
  XML_Parser parser = nullptr;
  Node root;
  bool have_root = false;
  std::vector<Node*> stack;
  std::vector<std::size_t> start_tag_end;
};

void XMLCALL on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
  auto& st = *static_cast<BuildState*>(user);
  Node node;
  node.name = name;
  for (std::size_t i = 0; attrs[i] != nullptr; i += 2) {
    node.attributes.emplace_back(attrs[i], attrs[i + 1]);
  }
  const auto begin = static_cast<std::size_t>(XML_GetCurrentByteIndex(st.parser));
  node.source_begin = begin;
  Node* placed = nullptr;
  if (st.stack.empty()) {
    st.root = std::move(node);
    st.have_root = true;
    placed = &st.root;
  } else {
    st.stack.back()->children.push_back(std::move(node));
    placed = &st.stack.back()->children.back();
  }
  st.stack.push_back(placed);
  st.start_tag_end.push_back(begin + static_cast<std::size_t>(XML_GetCurrentByteCount(st.parser)));
}

void XMLCALL on_end(void* user, const XML_Char*) {
  auto& st = *static_cast<BuildState*>(user);
  const auto count = XML_GetCurrentByteCount(st.parser);
  Node* node = st.stack.back();
  if (count == 0) {
    // empty-element tag: the end event shares the start tag's bytes
    node->source_end = st.start_tag_end.back();
  } else {
    node->source_end =
        static_cast<std::size_t>(XML_GetCurrentByteIndex(st.parser)) + static_cast<std::size_t>(count);
  }
  st.stack.pop_back();
  st.start_tag_end.pop_back();
}

void XMLCALL on_chars(void* user, const XML_Char* s, int len) {
  auto& st = *static_cast<BuildState*>(user);
  if (!st.stack.empty()) st.stack.back()->text.append(s, static_cast<std::size_t>(len));
}

}  // namespace

std::vector<const Node*> Node::descendants_named(std::string_view local) const {
  std::vector<const Node*> out;
  collect(*this, local, out);
  return out;
}

Document parse(std::string source) {
  ParserPtr parser(XML_ParserCreate("UTF-8"));
  if (!parser) throw Error(ErrorKind::Internal, "cannot allocate XML parser");
  BuildState state;
  state.parser = parser.get();
  XML_SetUserData(parser.get(), &state);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_chars);
  if (XML_Parse(parser.get(), source.data(), static_cast<int>(source.size()), XML_TRUE) ==
      XML_STATUS_ERROR) {
    throw ParseError(std::string("malformed XML: ") +
                         XML_ErrorString(XML_GetErrorCode(parser.get())),
                     XML_GetCurrentLineNumber(parser.get()),
                     XML_GetCurrentColumnNumber(parser.get()));
  }
  if (!state.have_root) throw ParseError("malformed XML: no root element");
  Document doc;
  doc.source = std::move(source);
  doc.root = std::move(state.root);
  return doc;
}

bool is_well_formed(std::string_view source, bool namespaces, std::string* error) {
  ParserPtr parser(namespaces ? XML_ParserCreateNS("UTF-8", '|') : XML_ParserCreate("UTF-8"));
  if (!parser) return false;
  if (XML_Parse(parser.get(), source.data(), static_cast<int>(source.size()), XML_TRUE) ==
      XML_STATUS_ERROR) {
    if (error != nullptr) {
      *error = std::string(XML_ErrorString(XML_GetErrorCode(parser.get()))) + " at line " +
               std::to_string(XML_GetCurrentLineNumber(parser.get()));
    }
    return false;
  }
  return true;
}

std::string escape_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '\r': out += "&#13;"; break;
      default:
        if (is_forbidden_control(c)) {
          out += "\xEF\xBF\xBD";
        } else {
          out.push_back(c);
        }
    }
  }
  return out;
}

std::string escape_attribute(std::string_view s, char quote) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += quote == '"' ? "&quot;" : "\""; break;
      case '\'': out += quote == '\'' ? "&apos;" : "'"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      case '\t': out += "&#9;"; break;
      default:
        if (is_forbidden_control(c)) {
          out += "\xEF\xBF\xBD";
        } else {
          out.push_back(c);
        }
    }
  }
  return out;
}

void Writer::declaration() { out_ += "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n"; }

void Writer::start_line() {
  out_.append(open_.size() * static_cast<std::size_t>(indent_), ' ');
}

void Writer::write_start_tag(std::string_view name, const std::vector<Attribute>& attributes) {
  out_ += '<';
  out_ += name;
  for (const auto& [k, v] : attributes) {
    out_ += ' ';
    out_ += k;
    out_ += '=';
    out_ += quote_;
    out_ += escape_attribute(v, quote_);
    out_ += quote_;
  }
}

void Writer::open(std::string_view name, const std::vector<Attribute>& attributes) {
  start_line();
  write_start_tag(name, attributes);
  out_ += ">\n";
  open_.emplace_back(name);
}

void Writer::close() {
  if (open_.empty()) throw Error(ErrorKind::Internal, "xml::Writer::close without open element");
  const std::string name = std::move(open_.back());
  open_.pop_back();
  start_line();
  out_ += "</" + name + ">\n";
}

void Writer::element(std::string_view name, std::string_view content,
                     const std::vector<Attribute>& attributes) {
  start_line();
  write_start_tag(name, attributes);
  out_ += '>';
  out_ += escape_text(content);
  out_ += "</";
  out_ += name;
  out_ += ">\n";
}

void Writer::empty(std::string_view name, const std::vector<Attribute>& attributes) {
  start_line();
  write_start_tag(name, attributes);
  out_ += " />\n";
}

void Writer::comment(std::string_view content) {
  start_line();
  std::string safe(content);
  for (auto pos = safe.find("--"); pos != std::string::npos; pos = safe.find("--")) {
    safe.replace(pos, 2, "- -");
  }
  out_ += "<!-- " + safe + " -->\n";
}

void Writer::raw(std::string_view markup) {
  start_line();
  out_ += markup;
  out_ += '\n';
}

std::string Writer::finish() {
  while (!open_.empty()) close();
  return std::move(out_);
}

}  // namespace dmlkit::xml
