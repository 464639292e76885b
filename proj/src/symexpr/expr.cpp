#include <algorithm>
#include <utility>

#include "qbhkit/symexpr.hpp"

namespace qbhkit {

namespace {

std::shared_ptr<Node> new_node(NodeKind kind) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  return n;
}

const std::shared_ptr<const Node>& zero_node() {
  static const std::shared_ptr<const Node> zero = new_node(NodeKind::Const);
  return zero;
}

int kind_rank(NodeKind k) {
  switch (k) {
    case NodeKind::Const: return 0;
    case NodeKind::Var: return 1;
    case NodeKind::Param: return 2;
    case NodeKind::Power: return 3;
    case NodeKind::Func: return 4;
    case NodeKind::Opaque: return 5;
    case NodeKind::Product: return 6;
    case NodeKind::Sum: return 7;
  }
  return 8;
}

std::strong_ordering compare_rational(const Rational& a, const Rational& b) {
  if (a < b) return std::strong_ordering::less;
  if (b < a) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::strong_ordering compare_lists(const std::vector<Expr>& a, const std::vector<Expr>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = compare(a[i], b[i]); c != 0) return c;
  }
  return a.size() <=> b.size();
}

Rational rational_pow(const Rational& base, long exponent) {
  Rational result = 1;
  Rational b = exponent < 0 ? Rational(1) / base : base;
  unsigned long e = exponent < 0 ? static_cast<unsigned long>(-exponent)
                                 : static_cast<unsigned long>(exponent);
  while (e > 0) {
    if (e & 1UL) result *= b;
    b *= b;
    e >>= 1;
  }
  return result;
}

// Splits c*rest into (c, rest).
std::pair<Rational, Expr> split_coefficient(const Expr& term) {
  if (term.kind() == NodeKind::Product && term.operands().front().is_constant()) {
    const auto& f = term.operands();
    std::vector<Expr> rest(f.begin() + 1, f.end());
    if (rest.size() == 1) return {f.front().constant(), rest.front()};
    return {f.front().constant(), Expr::raw_product(std::move(rest))};
  }
  return {Rational(1), term};
}

Expr with_coefficient(const Rational& c, const Expr& rest) {
  if (c == 1) return rest;
  std::vector<Expr> factors{Expr(c)};
  if (rest.kind() == NodeKind::Product) {
    factors.insert(factors.end(), rest.operands().begin(), rest.operands().end());
  } else {
    factors.push_back(rest);
  }
  return Expr::raw_product(std::move(factors));
}

}  // namespace

std::string_view fn_name(Fn fn) {
  switch (fn) {
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Exp: return "exp";
    case Fn::Ln: return "ln";
    case Fn::Atan: return "atan";
    case Fn::Sqrt: return "sqrt";
  }
  return "?";
}

std::optional<Fn> fn_from_name(std::string_view name) {
  for (Fn fn : {Fn::Sin, Fn::Cos, Fn::Exp, Fn::Ln, Fn::Atan, Fn::Sqrt}) {
    if (fn_name(fn) == name) return fn;
  }
  return std::nullopt;
}

Expr::Expr() : node_(zero_node()) {}

Expr::Expr(int value) : Expr(Rational(value)) {}

Expr::Expr(const Rational& value) {
  if (value == 0) {
    node_ = zero_node();
    return;
  }
  auto n = new_node(NodeKind::Const);
  n->value = value;
  node_ = std::move(n);
}

Expr Expr::var(std::size_t index) {
  auto n = new_node(NodeKind::Var);
  n->index = index;
  return Expr(std::move(n));
}

Expr Expr::param(std::string name) {
  auto n = new_node(NodeKind::Param);
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::func(Fn fn, Expr arg) {
  auto n = new_node(NodeKind::Func);
  n->fn = fn;
  n->args.push_back(std::move(arg));
  return Expr(std::move(n));
}

Expr Expr::opaque(std::string name, Expr arg, int order) {
  if (order < 0) throw std::invalid_argument("negative derivative order");
  auto n = new_node(NodeKind::Opaque);
  n->name = std::move(name);
  n->order = order;
  n->args.push_back(std::move(arg));
  return Expr(std::move(n));
}

Expr Expr::raw_sum(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  for (auto& t : terms) {
    if (t.kind() == NodeKind::Sum) {
      flat.insert(flat.end(), t.operands().begin(), t.operands().end());
    } else {
      flat.push_back(std::move(t));
    }
  }
  if (flat.empty()) return Expr();
  if (flat.size() == 1) return flat.front();
  auto n = new_node(NodeKind::Sum);
  n->args = std::move(flat);
  return Expr(std::move(n));
}

Expr Expr::raw_product(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  for (auto& f : factors) {
    if (f.kind() == NodeKind::Product) {
      flat.insert(flat.end(), f.operands().begin(), f.operands().end());
    } else {
      flat.push_back(std::move(f));
    }
  }
  if (flat.empty()) return Expr(1);
  if (flat.size() == 1) return flat.front();
  auto n = new_node(NodeKind::Product);
  n->args = std::move(flat);
  return Expr(std::move(n));
}

Expr Expr::raw_power(Expr base, long exponent) {
  auto n = new_node(NodeKind::Power);
  n->exponent = exponent;
  n->args.push_back(std::move(base));
  return Expr(std::move(n));
}

NodeKind Expr::kind() const { return node_->kind; }

bool Expr::is_zero() const { return kind() == NodeKind::Const && node_->value == 0; }

bool Expr::is_one() const { return kind() == NodeKind::Const && node_->value == 1; }

const Rational& Expr::constant() const {
  if (kind() != NodeKind::Const) throw std::logic_error("not a constant");
  return node_->value;
}

std::size_t Expr::var_index() const {
  if (kind() != NodeKind::Var) throw std::logic_error("not a variable");
  return node_->index;
}

const std::string& Expr::name() const {
  if (kind() != NodeKind::Param && kind() != NodeKind::Opaque) {
    throw std::logic_error("node has no name");
  }
  return node_->name;
}

const std::vector<Expr>& Expr::operands() const { return node_->args; }

long Expr::exponent() const {
  if (kind() != NodeKind::Power) throw std::logic_error("not a power");
  return node_->exponent;
}

Fn Expr::fn() const {
  if (kind() != NodeKind::Func) throw std::logic_error("not a function application");
  return node_->fn;
}

int Expr::order() const {
  if (kind() != NodeKind::Opaque) throw std::logic_error("not an opaque application");
  return node_->order;
}

bool operator==(const Expr& a, const Expr& b) {
  return a.node_ == b.node_ || compare(a, b) == 0;
}

std::strong_ordering compare(const Expr& a, const Expr& b) {
  if (&a.node() == &b.node()) return std::strong_ordering::equal;
  if (auto c = kind_rank(a.kind()) <=> kind_rank(b.kind()); c != 0) return c;
  const Node& x = a.node();
  const Node& y = b.node();
  switch (a.kind()) {
    case NodeKind::Const: return compare_rational(x.value, y.value);
    case NodeKind::Var: return x.index <=> y.index;
    case NodeKind::Param: return x.name <=> y.name;
    case NodeKind::Sum:
    case NodeKind::Product: return compare_lists(x.args, y.args);
    case NodeKind::Power:
      if (auto c = compare(x.args[0], y.args[0]); c != 0) return c;
      return x.exponent <=> y.exponent;
    case NodeKind::Func:
      if (auto c = static_cast<int>(x.fn) <=> static_cast<int>(y.fn); c != 0) return c;
      return compare(x.args[0], y.args[0]);
    case NodeKind::Opaque:
      if (auto c = x.name <=> y.name; c != 0) return c;
      if (auto c = x.order <=> y.order; c != 0) return c;
      return compare(x.args[0], y.args[0]);
  }
  return std::strong_ordering::equal;
}

Expr add(std::vector<Expr> terms) {
  Rational constant = 0;
  std::vector<Expr> rests;
  std::vector<Rational> coeffs;
  auto absorb = [&](const Expr& t) {
    if (t.is_constant()) {
      constant += t.constant();
      return;
    }
    auto [c, rest] = split_coefficient(t);
    for (std::size_t i = 0; i < rests.size(); ++i) {
      if (rests[i] == rest) {
        coeffs[i] += c;
        return;
      }
    }
    rests.push_back(std::move(rest));
    coeffs.push_back(std::move(c));
  };
  for (const auto& t : terms) {
    if (t.kind() == NodeKind::Sum) {
      for (const auto& inner : t.operands()) absorb(inner);
    } else {
      absorb(t);
    }
  }
  std::vector<Expr> out;
  for (std::size_t i = 0; i < rests.size(); ++i) {
    if (coeffs[i] != 0) out.push_back(with_coefficient(coeffs[i], rests[i]));
  }
  if (constant != 0) out.emplace_back(constant);
  return Expr::raw_sum(std::move(out));
}

Expr mul(std::vector<Expr> factors) {
  Rational constant = 1;
  std::vector<Expr> bases;
  std::vector<long> exponents;
  auto absorb = [&](const Expr& f) {
    if (f.is_constant()) {
      constant *= f.constant();
      return;
    }
    Expr base = f;
    long e = 1;
    if (f.kind() == NodeKind::Power) {
      base = f.operands()[0];
      e = f.exponent();
    }
    for (std::size_t i = 0; i < bases.size(); ++i) {
      if (bases[i] == base) {
        exponents[i] += e;
        return;
      }
    }
    bases.push_back(std::move(base));
    exponents.push_back(e);
  };
  for (const auto& f : factors) {
    if (f.kind() == NodeKind::Product) {
      for (const auto& inner : f.operands()) absorb(inner);
    } else {
      absorb(f);
    }
  }
  if (constant == 0) return Expr();
  std::vector<Expr> out;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    if (exponents[i] == 0) continue;
    Expr p = exponents[i] == 1 ? bases[i] : Expr::raw_power(bases[i], exponents[i]);
    out.push_back(std::move(p));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
  if (constant != 1) out.insert(out.begin(), Expr(constant));
  return Expr::raw_product(std::move(out));
}

Expr pow(const Expr& base, long exponent) {
  if (exponent == 0) return Expr(1);
  if (exponent == 1) return base;
  switch (base.kind()) {
    case NodeKind::Const:
      if (base.is_zero()) {
        return exponent > 0 ? Expr() : Expr::raw_power(base, exponent);
      }
      return Expr(rational_pow(base.constant(), exponent));
    case NodeKind::Power:
      return pow(base.operands()[0], base.exponent() * exponent);
    case NodeKind::Product: {
      std::vector<Expr> factors;
      for (const auto& f : base.operands()) factors.push_back(pow(f, exponent));
      return mul(std::move(factors));
    }
    default:
      return Expr::raw_power(base, exponent);
  }
}

Expr apply_fn(Fn fn, const Expr& arg) {
  if (arg.is_zero()) {
    switch (fn) {
      case Fn::Sin:
      case Fn::Atan:
      case Fn::Sqrt: return Expr();
      case Fn::Cos:
      case Fn::Exp: return Expr(1);
      case Fn::Ln: break;
    }
  }
  if (arg.is_one()) {
    if (fn == Fn::Ln) return Expr();
    if (fn == Fn::Sqrt) return Expr(1);
  }
  return Expr::func(fn, arg);
}

Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return add({a, mul({Expr(-1), b})}); }
Expr operator-(const Expr& a) { return mul({Expr(-1), a}); }
Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return mul({a, pow(b, -1)}); }

Expr simplify_basic(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Const:
    case NodeKind::Var:
    case NodeKind::Param: return e;
    case NodeKind::Sum: {
      std::vector<Expr> terms;
      for (const auto& t : e.operands()) terms.push_back(simplify_basic(t));
      return add(std::move(terms));
    }
    case NodeKind::Product: {
      std::vector<Expr> factors;
      for (const auto& f : e.operands()) factors.push_back(simplify_basic(f));
      return mul(std::move(factors));
    }
    case NodeKind::Power: return pow(simplify_basic(e.operands()[0]), e.exponent());
    case NodeKind::Func: return apply_fn(e.fn(), simplify_basic(e.operands()[0]));
    case NodeKind::Opaque:
      return Expr::opaque(e.name(), simplify_basic(e.operands()[0]), e.order());
  }
  return e;
}

namespace {

void collect(const Expr& e, ExprSymbols& out) {
  switch (e.kind()) {
    case NodeKind::Var: out.vars.insert(e.var_index()); break;
    case NodeKind::Param: out.params.insert(e.name()); break;
    case NodeKind::Opaque: out.opaque.insert(e.name()); break;
    default: break;
  }
  for (const auto& child : e.operands()) collect(child, out);
}

}  // namespace

ExprSymbols collect_symbols(const Expr& e) {
  ExprSymbols out;
  collect(e, out);
  return out;
}

}  // namespace qbhkit
