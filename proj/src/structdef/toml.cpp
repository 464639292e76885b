#include <cctype>
#include <charconv>
#include <set>
#include <string>

#include "qbhkit/errors.hpp"
#include "qbhkit/structdef.hpp"

namespace qbhkit {
namespace {

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

class TomlParser {
 public:
  explicit TomlParser(std::string_view text) : s_(text) {}

  Json run() {
    Json root = Json::object();
    current_ = &root;
    root_ = &root;
    for (;;) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        header();
      } else {
        key_value(*current_);
      }
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError("line " + std::to_string(line_) + ": " + msg);
  }

  bool eof() const { return i_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[i_]; }

  void advance() {
    if (s_[i_] == '\n') ++line_;
    ++i_;
  }

  void skip_spaces() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) advance();
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!eof() && peek() != '\n') advance();
    }
  }

  // Whitespace, comments and newlines.
  void skip_blank_lines() {
    for (;;) {
      skip_spaces();
      skip_comment();
      if (!eof() && (peek() == '\n' || peek() == '\r')) {
        advance();
        continue;
      }
      return;
    }
  }

  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (peek() == '\r') advance();
    if (eof()) return;
    if (peek() != '\n') fail(std::string("unexpected '") + peek() + "'");
    advance();
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    advance();
  }

  std::string key_segment() {
    skip_spaces();
    if (peek() == '"') return basic_string();
    if (peek() == '\'') return literal_string();
    std::string out;
    while (!eof() && is_bare_key_char(peek())) {
      out += peek();
      advance();
    }
    if (out.empty()) fail("expected a key");
    return out;
  }

  std::vector<std::string> key_path() {
    std::vector<std::string> path{key_segment()};
    skip_spaces();
    while (peek() == '.') {
      advance();
      path.push_back(key_segment());
      skip_spaces();
    }
    return path;
  }

  static std::string join(const std::vector<std::string>& path) {
    std::string out;
    for (const auto& p : path) {
      if (!out.empty()) out += '.';
      out += p;
    }
    return out;
  }

  // Descends into (creating) the table at `key`; arrays of tables resolve
  // to their last element.
  Json* descend(Json* at, const std::string& key) {
    if (!at->contains(key)) (*at)[key] = Json::object();
    Json* next = &(*at)[key];
    if (next->is_array() && !next->empty() && next->back().is_object()) return &next->back();
    if (!next->is_object()) fail("key '" + key + "' is not a table");
    return next;
  }

  void header() {
    advance();
    const bool array = peek() == '[';
    if (array) advance();
    auto path = key_path();
    expect(']');
    if (array) expect(']');
    Json* at = root_;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) at = descend(at, path[k]);
    const std::string& last = path.back();
    const std::string full = join(path);
    if (array) {
      if (!at->contains(last)) (*at)[last] = Json::array();
      Json& arr = (*at)[last];
      if (!arr.is_array()) fail("'" + full + "' is not an array of tables");
      arr.push_back(Json::object());
      current_ = &arr.back();
    } else {
      if (!defined_.insert(full).second) fail("table '" + full + "' defined twice");
      current_ = descend(at, last);
    }
  }

  void key_value(Json& table) {
    auto path = key_path();
    skip_spaces();
    expect('=');
    skip_spaces();
    Json* at = &table;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) at = descend(at, path[k]);
    if (at->contains(path.back())) fail("duplicate key '" + join(path) + "'");
    (*at)[path.back()] = value();
  }

  Json value() {
    const char c = peek();
    if (c == '"') return basic_string();
    if (c == '\'') return literal_string();
    if (c == '[') return array();
    if (c == '{') return inline_table();
    if (s_.substr(i_, 4) == "true") {
      i_ += 4;
      return true;
    }
    if (s_.substr(i_, 5) == "false") {
      i_ += 5;
      return false;
    }
    return number();
  }

  std::string basic_string() {
    expect('"');
    std::string out;
    for (;;) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = peek();
      advance();
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (eof()) fail("unterminated string");
      char e = peek();
      advance();
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail(std::string("unsupported escape '\\") + e + "'");
      }
    }
  }

  std::string literal_string() {
    expect('\'');
    std::string out;
    for (;;) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = peek();
      advance();
      if (c == '\'') return out;
      out += c;
    }
  }

  Json array() {
    expect('[');
    Json out = Json::array();
    for (;;) {
      skip_blank_lines();
      if (peek() == ']') {
        advance();
        return out;
      }
      out.push_back(value());
      skip_blank_lines();
      if (peek() == ',') {
        advance();
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
  }

  Json inline_table() {
    expect('{');
    Json out = Json::object();
    skip_spaces();
    if (peek() == '}') {
      advance();
      return out;
    }
    for (;;) {
      key_value(out);
      skip_spaces();
      if (peek() == '}') {
        advance();
        return out;
      }
      expect(',');
    }
  }

  Json number() {
    std::string text;
    bool is_float = false;
    while (!eof()) {
      char c = peek();
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-') {
        text += c;
      } else if (c == '.' || c == 'e' || c == 'E') {
        is_float = true;
        text += c;
      } else if (c != '_') {
        break;
      }
      advance();
    }
    if (text.empty()) fail("expected a value");
    const char* first = text.data() + (text[0] == '+' ? 1 : 0);
    const char* last = text.data() + text.size();
    if (is_float) {
      double v = 0;
      auto [p, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || p != last) fail("malformed number '" + text + "'");
      return v;
    }
    long long v = 0;
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last) fail("malformed integer '" + text + "'");
    return v;
  }

  std::string_view s_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;
  Json* root_ = nullptr;
  Json* current_ = nullptr;
  std::set<std::string> defined_;
};

}  // namespace

Json parse_toml(std::string_view text) { return TomlParser(text).run(); }

}  // namespace qbhkit
