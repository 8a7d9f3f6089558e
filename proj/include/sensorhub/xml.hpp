// Copyright 2026 The SensorHub Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/// Small, strict XML 1.0 reader and writer for the SOS and CoP documents.
///
/// Supported: XML declaration, comments, processing instructions, CDATA,
/// the five predefined entities and numeric character references. Rejected:
/// DOCTYPE (no external or internal subsets), undeclared entities,
/// duplicate attributes, mismatched tags, more than one root element and
/// raw control characters. Namespaces are not resolved; `local_name()`
/// strips a prefix when callers want to ignore it.

#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sensorhub/error.hpp"

namespace sensorhub::xml {

struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Element> children;
  /// Character data directly inside this element, concatenated.
  std::string text;

  std::string_view local_name() const {
    const auto colon = name.find(':');
    return colon == std::string::npos ? std::string_view(name) : std::string_view(name).substr(colon + 1);
  }

  const std::string* attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes)
      if (k == key) return &v;
    return nullptr;
  }

  /// First child whose local name matches.
  const Element* child(std::string_view local) const {
    for (const auto& c : children)
      if (c.local_name() == local) return &c;
    return nullptr;
  }

  std::vector<const Element*> children_named(std::string_view local) const {
    std::vector<const Element*> out;
    for (const auto& c : children)
      if (c.local_name() == local) out.push_back(&c);
    return out;
  }

  Element& add(std::string child_name) {
    children.push_back(Element{std::move(child_name), {}, {}, {}});
    return children.back();
  }

  Element& attr(std::string key, std::string value) {
    attributes.emplace_back(std::move(key), std::move(value));
    return *this;
  }

  Element& set_text(std::string value) {
    text = std::move(value);
    return *this;
  }

  friend bool operator==(const Element&, const Element&) = default;
};

namespace detail {

inline bool is_name_start(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' || c >= 0x80;
}

inline bool is_name_char(unsigned char c) {
  return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

inline bool is_xml_char(std::uint32_t cp) {
  return cp == 0x9 || cp == 0xA || cp == 0xD || (cp >= 0x20 && cp <= 0xD7FF) || (cp >= 0xE000 && cp <= 0xFFFD) ||
         (cp >= 0x10000 && cp <= 0x10FFFF);
}

class Parser {
 public:
  explicit Parser(std::string_view src) : s_(src) {}

  Element parse_document() {
    if (s_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
    if (starts_with("<?xml") && pos_ + 5 < s_.size() && is_space(s_[pos_ + 5])) skip_pi(true);
    skip_misc();
    if (starts_with("<!DOCTYPE")) fail("DOCTYPE declarations are not accepted");
    if (!starts_with("<")) fail("expected the root element");
    Element root = parse_element(0);
    skip_misc();
    if (pos_ != s_.size()) fail("content after the root element");
    return root;
  }

 private:
  static constexpr int kMaxDepth = 256;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::MalformedXml, "malformed XML at byte " + std::to_string(pos_) + ": " + what);
  }

  bool starts_with(std::string_view p) const { return s_.substr(pos_, p.size()) == p; }

  void expect(std::string_view p) {
    if (!starts_with(p)) fail("expected '" + std::string(p) + "'");
    pos_ += p.size();
  }

  void skip_space() {
    while (pos_ < s_.size() && is_space(s_[pos_])) ++pos_;
  }

  void check_char(unsigned char c) const {
    if (c < 0x20 && c != '\t' && c != '\n' && c != '\r') fail("control character in document");
  }

  void skip_comment() {
    pos_ += 4;  // "<!--"
    const auto end = s_.find("--", pos_);
    if (end == std::string_view::npos) fail("unterminated comment");
    if (end + 2 >= s_.size() || s_[end + 2] != '>') fail("'--' inside comment");
    for (auto i = pos_; i < end; ++i) check_char(static_cast<unsigned char>(s_[i]));
    pos_ = end + 3;
  }

  void skip_pi(bool declaration_allowed = false) {
    pos_ += 2;  // "<?"
    auto target = parse_name();
    for (auto& c : target) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (target == "xml" && !declaration_allowed) fail("misplaced XML declaration");
    const auto end = s_.find("?>", pos_);
    if (end == std::string_view::npos) fail("unterminated processing instruction");
    pos_ = end + 2;
  }

  void skip_misc() {
    while (true) {
      skip_space();
      if (starts_with("<!--"))
        skip_comment();
      else if (starts_with("<?"))
        skip_pi();
      else
        return;
    }
  }

  std::string parse_name() {
    const auto start = pos_;
    if (pos_ >= s_.size() || !is_name_start(static_cast<unsigned char>(s_[pos_]))) fail("expected a name");
    while (pos_ < s_.size() && is_name_char(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  void parse_reference(std::string& out) {
    ++pos_;  // '&'
    const auto semi = s_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 12) fail("unterminated entity reference");
    const auto ref = s_.substr(pos_, semi - pos_);
    if (ref == "lt") out += '<';
    else if (ref == "gt") out += '>';
    else if (ref == "amp") out += '&';
    else if (ref == "quot") out += '"';
    else if (ref == "apos") out += '\'';
    else if (ref.size() > 1 && ref[0] == '#') {
      std::uint32_t cp = 0;
      const bool hex = ref[1] == 'x';
      const auto digits = ref.substr(hex ? 2 : 1);
      if (digits.empty()) fail("empty character reference");
      for (char c : digits) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
        else fail("bad character reference");
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
        if (cp > 0x10FFFF) fail("character reference out of range");
      }
      if (!is_xml_char(cp)) fail("character reference to a non-XML character");
      append_utf8(out, cp);
    } else {
      fail("undeclared entity '" + std::string(ref) + "'");
    }
    pos_ = semi + 1;
  }

  std::string parse_attribute_value() {
    if (pos_ >= s_.size() || (s_[pos_] != '"' && s_[pos_] != '\'')) fail("attribute value must be quoted");
    const char quote = s_[pos_++];
    std::string out;
    while (true) {
      if (pos_ >= s_.size()) fail("unterminated attribute value");
      const char c = s_[pos_];
      if (c == quote) {
        ++pos_;
        return out;
      }
      if (c == '<') fail("'<' inside attribute value");
      if (c == '&') {
        parse_reference(out);
        continue;
      }
      check_char(static_cast<unsigned char>(c));
      // Attribute-value normalization: literal whitespace becomes a space.
      out += (c == '\t' || c == '\n' || c == '\r') ? ' ' : c;
      ++pos_;
    }
  }

  Element parse_element(int depth) {
    if (depth > kMaxDepth) fail("nesting too deep");
    expect("<");
    Element el;
    el.name = parse_name();
    while (true) {
      const bool had_space = pos_ < s_.size() && is_space(s_[pos_]);
      skip_space();
      if (starts_with("/>")) {
        pos_ += 2;
        return el;
      }
      if (starts_with(">")) {
        ++pos_;
        break;
      }
      if (!had_space) fail("attributes must be separated by whitespace");
      auto key = parse_name();
      skip_space();
      expect("=");
      skip_space();
      auto value = parse_attribute_value();
      if (el.attribute(key)) fail("duplicate attribute '" + key + "'");
      el.attributes.emplace_back(std::move(key), std::move(value));
    }

    while (true) {
      if (pos_ >= s_.size()) fail("unterminated element <" + el.name + ">");
      if (starts_with("</")) {
        pos_ += 2;
        const auto closing = parse_name();
        if (closing != el.name) fail("</" + closing + "> does not close <" + el.name + ">");
        skip_space();
        expect(">");
        return el;
      }
      if (starts_with("<!--")) {
        skip_comment();
      } else if (starts_with("<![CDATA[")) {
        pos_ += 9;
        const auto end = s_.find("]]>", pos_);
        if (end == std::string_view::npos) fail("unterminated CDATA section");
        for (auto i = pos_; i < end; ++i) check_char(static_cast<unsigned char>(s_[i]));
        el.text.append(s_.substr(pos_, end - pos_));
        pos_ = end + 3;
      } else if (starts_with("<?")) {
        skip_pi();
      } else if (starts_with("<!")) {
        fail("unexpected markup declaration");
      } else if (starts_with("<")) {
        el.children.push_back(parse_element(depth + 1));
      } else if (s_[pos_] == '&') {
        parse_reference(el.text);
      } else {
        if (starts_with("]]>")) fail("']]>' in character data");
        const char c = s_[pos_];
        check_char(static_cast<unsigned char>(c));
        // Line-end normalization.
        if (c == '\r') {
          el.text += '\n';
          if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '\n') ++pos_;
        } else {
          el.text += c;
        }
        ++pos_;
      }
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses one document. Throws Error(MalformedXml) on anything outside the
/// supported subset of XML 1.0.
inline Element parse(std::string_view document) { return detail::Parser(document).parse_document(); }

inline std::string escape_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '\r': out += "&#13;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string escape_attribute(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\t': out += "&#9;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace detail {

inline void write(std::string& out, const Element& e, int indent, int depth) {
  const bool pretty = indent > 0;
  if (pretty) out.append(static_cast<std::size_t>(depth * indent), ' ');
  out += '<';
  out += e.name;
  for (const auto& [k, v] : e.attributes) {
    out += ' ';
    out += k;
    out += "=\"";
    out += escape_attribute(v);
    out += '"';
  }
  if (e.children.empty() && e.text.empty()) {
    out += "/>";
    if (pretty) out += '\n';
    return;
  }
  out += '>';
  out += escape_text(e.text);
  if (!e.children.empty()) {
    if (pretty) out += '\n';
    for (const auto& c : e.children) write(out, c, indent, depth + 1);
    if (pretty) out.append(static_cast<std::size_t>(depth * indent), ' ');
  }
  out += "</";
  out += e.name;
  out += '>';
  if (pretty) out += '\n';
}

}  // namespace detail

/// Serializes `root`. With `indent > 0` children go on their own lines;
/// mixed content is not indented around text, so only use pretty output
/// for element-only trees.
inline std::string to_string(const Element& root, bool declaration = true, int indent = 0) {
  std::string out;
  if (declaration) out += indent > 0 ? "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                                     : "<?xml version=\"1.0\" encoding=\"UTF-8\"?>";
  detail::write(out, root, indent, 0);
  return out;
}

}  // namespace sensorhub::xml
