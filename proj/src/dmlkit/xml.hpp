#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dmlkit::xml {

using Attribute = std::pair<std::string, std::string>;

/// Element node of a parsed document. Names are kept exactly as written in
/// the source (prefix included); namespace declarations are not resolved.
struct Node {
  std::string name;
  std::vector<Attribute> attributes;
  std::vector<Node> children;
  /// Character data directly inside this element, concatenated.
  std::string text;
  /// Byte range [source_begin, source_end) of the element in the source.
  std::size_t source_begin = 0;
  std::size_t source_end = 0;

  std::string_view local_name() const noexcept;
  const Node* child(std::string_view local) const noexcept;
  std::vector<const Node*> children_named(std::string_view local) const;
  const std::string* attribute(std::string_view attr_name) const noexcept;

  /// text with whitespace trimmed and internal runs collapsed.
  std::string normalized_text() const;

  /// Pre-order search over descendants (excluding this node).
  std::vector<const Node*> descendants_named(std::string_view local) const;
};

struct Document {
  std::string source;
  Node root;

  /// Verbatim bytes of an element of this document.
  std::string_view raw(const Node& node) const noexcept {
    return std::string_view(source).substr(node.source_begin, node.source_end - node.source_begin);
  }
};

/// Parses UTF-8 XML. Throws ParseError with line/column on malformed input.
Document parse(std::string source);

/// Generic well-formedness check. With namespaces=true prefixes must also be
/// declared.
bool is_well_formed(std::string_view source, bool namespaces = false,
                    std::string* error = nullptr);

/// Escapes markup characters. C0 control characters that XML 1.0 forbids
/// are replaced by U+FFFD.
std::string escape_text(std::string_view s);
std::string escape_attribute(std::string_view s, char quote = '"');

/// Indenting serializer. Elements holding text are written on one line.
class Writer {
 public:
  explicit Writer(char quote = '"', int indent = 2) : quote_(quote), indent_(indent) {}

  void declaration();
  void open(std::string_view name, const std::vector<Attribute>& attributes = {});
  void close();
  void element(std::string_view name, std::string_view text,
               const std::vector<Attribute>& attributes = {});
  void empty(std::string_view name, const std::vector<Attribute>& attributes = {});
  void comment(std::string_view text);
  /// Inserts pre-serialized markup on its own line, unmodified.
  void raw(std::string_view markup);

  std::string finish();

 private:
  void start_line();
  void write_start_tag(std::string_view name, const std::vector<Attribute>& attributes);

  std::string out_;
  std::vector<std::string> open_;
  char quote_;
  int indent_;
};

}  // namespace dmlkit::xml
