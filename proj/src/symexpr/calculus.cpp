#include <cmath>

#include "qbhkit/symexpr.hpp"

namespace qbhkit {

Expr differentiate(const Expr& e, std::size_t index) {
  switch (e.kind()) {
    case NodeKind::Const:
    case NodeKind::Param: return Expr();
    case NodeKind::Var: return e.var_index() == index ? Expr(1) : Expr();
    case NodeKind::Sum: {
      std::vector<Expr> terms;
      for (const auto& t : e.operands()) terms.push_back(differentiate(t, index));
      return add(std::move(terms));
    }
    case NodeKind::Product: {
      const auto& f = e.operands();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < f.size(); ++i) {
        Expr d = differentiate(f[i], index);
        if (d.is_zero()) continue;
        std::vector<Expr> factors(f);
        factors[i] = d;
        terms.push_back(mul(std::move(factors)));
      }
      return add(std::move(terms));
    }
    case NodeKind::Power: {
      const Expr& b = e.operands()[0];
      Expr db = differentiate(b, index);
      if (db.is_zero()) return Expr();
      return mul({Expr(Rational(e.exponent())), pow(b, e.exponent() - 1), db});
    }
    case NodeKind::Func: {
      const Expr& u = e.operands()[0];
      Expr du = differentiate(u, index);
      if (du.is_zero()) return Expr();
      switch (e.fn()) {
        case Fn::Sin: return apply_fn(Fn::Cos, u) * du;
        case Fn::Cos: return -(apply_fn(Fn::Sin, u) * du);
        case Fn::Exp: return e * du;
        case Fn::Ln: return pow(u, -1) * du;
        case Fn::Atan: return pow(Expr(1) + pow(u, 2), -1) * du;
        case Fn::Sqrt: return mul({Expr(Rational(1, 2)), pow(e, -1), du});
      }
      break;
    }
    case NodeKind::Opaque: {
      const Expr& u = e.operands()[0];
      Expr du = differentiate(u, index);
      if (du.is_zero()) return Expr();
      return Expr::opaque(e.name(), u, e.order() + 1) * du;
    }
  }
  return Expr();
}

Expr differentiate(const Expr& e, const Chart& chart, std::string_view coordinate) {
  auto idx = chart.index_of(coordinate);
  if (!idx) throw ChartMismatch("unknown coordinate '" + std::string(coordinate) + "'");
  require_in_chart(e, chart);
  return differentiate(e, *idx);
}

OpaqueFunction::OpaqueFunction(std::string description, int max_order, Impl impl)
    : description_(std::move(description)), max_order_(max_order), impl_(std::move(impl)) {}

double OpaqueFunction::operator()(int order, double x) const {
  if (order < 0 || order > max_order_) {
    throw MissingBinding("derivative order " + std::to_string(order) + " of '" +
                         description_ + "' is not available");
  }
  return impl_(order, x);
}

namespace {
constexpr int kBuiltinMaxOrder = 16;
}

OpaqueFunction OpaqueFunction::identity() {
  return {"identity", kBuiltinMaxOrder, [](int order, double x) {
            return order == 0 ? x : (order == 1 ? 1.0 : 0.0);
          }};
}

OpaqueFunction OpaqueFunction::square() {
  return {"square", kBuiltinMaxOrder, [](int order, double x) {
            switch (order) {
              case 0: return x * x;
              case 1: return 2.0 * x;
              case 2: return 2.0;
              default: return 0.0;
            }
          }};
}

OpaqueFunction OpaqueFunction::sine() {
  return {"sin", kBuiltinMaxOrder, [](int order, double x) {
            switch (order % 4) {
              case 0: return std::sin(x);
              case 1: return std::cos(x);
              case 2: return -std::sin(x);
              default: return -std::cos(x);
            }
          }};
}

OpaqueFunction OpaqueFunction::constant(double c) {
  return {"const(" + std::to_string(c) + ")", kBuiltinMaxOrder,
          [c](int order, double) { return order == 0 ? c : 0.0; }};
}

OpaqueFunction OpaqueFunction::from_selector(std::string_view selector) {
  if (selector == "identity") return identity();
  if (selector == "square") return square();
  if (selector == "sin") return sine();
  if (selector.starts_with("const(") && selector.ends_with(")")) {
    std::string inner(selector.substr(6, selector.size() - 7));
    try {
      std::size_t used = 0;
      double c = std::stod(inner, &used);
      if (used == inner.size()) return constant(c);
    } catch (const std::exception&) {
    }
  }
  throw MissingBinding("unknown binding selector '" + std::string(selector) + "'");
}

namespace {

double eval(const Expr& e, std::span<const double> point, const FnBindings& bindings) {
  switch (e.kind()) {
    case NodeKind::Const: return static_cast<double>(e.constant());
    case NodeKind::Var: return point[e.var_index()];
    case NodeKind::Param: {
      auto it = bindings.params.find(e.name());
      if (it == bindings.params.end()) {
        throw MissingBinding("parameter '" + e.name() + "' has no value");
      }
      return it->second;
    }
    case NodeKind::Sum: {
      double s = 0.0;
      for (const auto& t : e.operands()) s += eval(t, point, bindings);
      return s;
    }
    case NodeKind::Product: {
      double p = 1.0;
      for (const auto& f : e.operands()) p *= eval(f, point, bindings);
      return p;
    }
    case NodeKind::Power: {
      double b = eval(e.operands()[0], point, bindings);
      if (b == 0.0 && e.exponent() < 0) throw DomainError("division by zero");
      return std::pow(b, static_cast<double>(e.exponent()));
    }
    case NodeKind::Func: {
      double u = eval(e.operands()[0], point, bindings);
      switch (e.fn()) {
        case Fn::Sin: return std::sin(u);
        case Fn::Cos: return std::cos(u);
        case Fn::Exp: return std::exp(u);
        case Fn::Ln:
          if (!(u > 0.0)) throw DomainError("ln of a non-positive value");
          return std::log(u);
        case Fn::Atan: return std::atan(u);
        case Fn::Sqrt:
          if (!(u >= 0.0)) throw DomainError("sqrt of a negative value");
          return std::sqrt(u);
      }
      break;
    }
    case NodeKind::Opaque: {
      auto it = bindings.functions.find(e.name());
      if (it == bindings.functions.end()) {
        throw MissingBinding("opaque function '" + e.name() + "' has no binding");
      }
      return it->second(e.order(), eval(e.operands()[0], point, bindings));
    }
  }
  return 0.0;
}

}  // namespace

double evaluate_unchecked(const Expr& e, std::span<const double> point,
                          const FnBindings& bindings) {
  double v = eval(e, point, bindings);
  if (!std::isfinite(v)) throw DomainError("evaluation produced a non-finite value");
  return v;
}

double evaluate(const Expr& e, const Chart& chart, std::span<const double> point,
                const FnBindings& bindings) {
  if (point.size() != chart.dim()) {
    throw ChartMismatch("point has " + std::to_string(point.size()) +
                        " coordinates, chart has " + std::to_string(chart.dim()));
  }
  require_in_chart(e, chart);
  if (!chart.satisfies_guards(point)) throw DomainError("point violates a chart guard");
  return evaluate_unchecked(e, point, bindings);
}

}  // namespace qbhkit
