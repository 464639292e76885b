#include <algorithm>
#include <cctype>

#include "qbhkit/symexpr.hpp"

namespace qbhkit {

namespace {

class Parser {
 public:
  Parser(std::string_view text, const Chart& chart, const ParseScope& scope)
      : text_(text), chart_(chart), scope_(scope) {}

  Expr parse() {
    skip_space();
    if (at_end()) fail("empty expression");
    Expr e = expr();
    skip_space();
    if (!at_end()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  bool at_end() const { return pos_ >= text_.size(); }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (!at_end() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (at_end()) fail(std::string("expected '") + c + "' but input ended");
      fail(std::string("expected '") + c + "'");
    }
  }

  Expr expr() {
    std::vector<Expr> terms{term()};
    for (;;) {
      if (accept('+')) {
        terms.push_back(term());
      } else if (accept('-')) {
        terms.push_back(-term());
      } else {
        break;
      }
    }
    return add(std::move(terms));
  }

  Expr term() {
    Expr acc = factor();
    for (;;) {
      if (accept('*')) {
        acc = acc * factor();
      } else if (accept('/')) {
        std::size_t at = pos_;
        Expr d = factor();
        if (d.is_zero()) throw ParseError("division by zero", at);
        acc = acc / d;
      } else {
        break;
      }
    }
    return acc;
  }

  Expr factor() {
    if (accept('-')) return -factor();
    Expr b = base();
    if (accept('^')) return pow(b, exponent());
    return b;
  }

  long exponent() {
    skip_space();
    bool paren = accept('(');
    bool negative = accept('-');
    skip_space();
    std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer exponent");
    if (pos_ - start > 9) throw ParseError("exponent too large", start);
    long value = std::stol(std::string(text_.substr(start, pos_ - start)));
    if (paren) expect(')');
    return negative ? -value : value;
  }

  Expr number() {
    std::size_t start = pos_;
    Rational value = 0;
    Rational scale = 1;
    bool dot = false;
    bool digits = false;
    while (!at_end()) {
      char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        digits = true;
        value = value * 10 + (c - '0');
        if (dot) scale *= 10;
      } else if (c == '.' && !dot) {
        dot = true;
      } else {
        break;
      }
      ++pos_;
    }
    if (!digits) throw ParseError("malformed number", start);
    return Expr(value / scale);
  }

  std::string identifier() {
    std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                         text_[pos_] == '_')) {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  Expr call_argument() {
    expect('(');
    Expr arg = expr();
    expect(')');
    return arg;
  }

  Expr base() {
    skip_space();
    if (at_end()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) {
      fail(std::string("unexpected '") + c + "'");
    }
    std::size_t start = pos_;
    std::string id = identifier();
    if (auto fn = fn_from_name(id)) return apply_fn(*fn, call_argument());
    if (std::find(scope_.opaque.begin(), scope_.opaque.end(), id) != scope_.opaque.end()) {
      int order = 0;
      while (!at_end() && text_[pos_] == '\'') {
        ++order;
        ++pos_;
      }
      return Expr::opaque(id, call_argument(), order);
    }
    if (auto idx = chart_.index_of(id)) return Expr::var(*idx);
    if (std::find(scope_.params.begin(), scope_.params.end(), id) != scope_.params.end()) {
      return Expr::param(id);
    }
    if (auto it = scope_.named.find(id); it != scope_.named.end()) return it->second;
    throw ParseError("unknown identifier '" + id + "'", start);
  }

  std::string_view text_;
  const Chart& chart_;
  const ParseScope& scope_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text, const Chart& chart, const ParseScope& scope) {
  return Parser(text, chart, scope).parse();
}

}  // namespace qbhkit
