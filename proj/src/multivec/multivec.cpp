#include "qbhkit/multivec.hpp"

#include <sstream>

namespace qbhkit {

namespace {

// Sorts `index` in place; returns the permutation sign, or 0 on a repeat.
int sort_with_sign(Multivector::Index& index) {
  int sign = 1;
  for (std::size_t i = 1; i < index.size(); ++i) {
    for (std::size_t j = i; j > 0 && index[j - 1] >= index[j]; --j) {
      if (index[j - 1] == index[j]) return 0;
      std::swap(index[j - 1], index[j]);
      sign = -sign;
    }
  }
  return sign;
}

void check_components(const ChartPtr& chart, const std::vector<Expr>& components,
                      const char* what) {
  if (!chart) throw PreconditionError(std::string(what) + " without a chart");
  if (components.size() != chart->dim()) {
    throw PreconditionError(std::string(what) + " has " + std::to_string(components.size()) +
                            " components on a chart of dimension " +
                            std::to_string(chart->dim()));
  }
  for (const auto& c : components) require_in_chart(c, *chart);
}

Multivector::Index without(const Multivector::Index& index, std::size_t pos) {
  Multivector::Index out;
  out.reserve(index.size() - 1);
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (i != pos) out.push_back(index[i]);
  }
  return out;
}

// d/dx_k of f is reused across many index pairs.
class DerivativeCache {
 public:
  const Expr& get(const Expr& f, std::size_t k) {
    auto key = std::make_pair(&f.node(), k);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(key, differentiate(f, k)).first->second;
  }

 private:
  std::map<std::pair<const Node*, std::size_t>, Expr> cache_;
};

}  // namespace

void require_same_chart(const Chart& a, const Chart& b) {
  if (&a == &b || a.same_coordinates(b)) return;
  throw ChartMismatch("operands live on different charts");
}

VectorField::VectorField(ChartPtr chart, std::vector<Expr> components)
    : chart_(std::move(chart)), components_(std::move(components)) {
  check_components(chart_, components_, "vector field");
}

VectorField VectorField::zero(ChartPtr chart) {
  std::size_t n = chart->dim();
  return VectorField(std::move(chart), std::vector<Expr>(n));
}

VectorField VectorField::basis(ChartPtr chart, std::size_t index) {
  std::vector<Expr> c(chart->dim());
  c.at(index) = Expr(1);
  return VectorField(std::move(chart), std::move(c));
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  require_same_chart(*a.chart(), *b.chart());
  std::vector<Expr> c(a.dim());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] + b[i];
  return VectorField(a.chart(), std::move(c));
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  require_same_chart(*a.chart(), *b.chart());
  std::vector<Expr> c(a.dim());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] - b[i];
  return VectorField(a.chart(), std::move(c));
}

VectorField operator-(const VectorField& a) { return Expr(-1) * a; }

VectorField operator*(const Expr& f, const VectorField& x) {
  require_in_chart(f, *x.chart());
  std::vector<Expr> c(x.dim());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = f * x[i];
  return VectorField(x.chart(), std::move(c));
}

OneForm::OneForm(ChartPtr chart, std::vector<Expr> components)
    : chart_(std::move(chart)), components_(std::move(components)) {
  check_components(chart_, components_, "one-form");
}

Multivector::Multivector(ChartPtr chart, std::size_t degree)
    : chart_(std::move(chart)), degree_(degree) {
  if (!chart_) throw PreconditionError("multivector without a chart");
}

Multivector Multivector::scalar(ChartPtr chart, Expr value) {
  Multivector m(std::move(chart), 0);
  m.add_term({}, value);
  return m;
}

Multivector Multivector::from_vector(const VectorField& x) {
  Multivector m(x.chart(), 1);
  for (std::size_t i = 0; i < x.dim(); ++i) m.add_term({i}, x[i]);
  return m;
}

Expr Multivector::component(const Index& index) const {
  auto it = components_.find(index);
  return it == components_.end() ? Expr() : it->second;
}

void Multivector::add_term(Index index, const Expr& coef) {
  if (index.size() != degree_) throw PreconditionError("index tuple length differs from degree");
  if (coef.is_zero()) return;
  for (std::size_t i : index) {
    if (i >= chart_->dim()) throw PreconditionError("index outside the chart");
  }
  require_in_chart(coef, *chart_);
  int sign = sort_with_sign(index);
  if (sign == 0) return;
  Expr term = sign > 0 ? coef : -coef;
  auto [it, inserted] = components_.try_emplace(std::move(index), term);
  if (!inserted) {
    it->second = it->second + term;
    if (it->second.is_zero()) components_.erase(it);
  }
}

VectorField Multivector::to_vector_field() const {
  if (degree_ != 1) throw PreconditionError("multivector is not of degree 1");
  std::vector<Expr> c(chart_->dim());
  for (const auto& [idx, coef] : components_) c[idx[0]] = coef;
  return VectorField(chart_, std::move(c));
}

Multivector operator+(const Multivector& a, const Multivector& b) {
  require_same_chart(*a.chart(), *b.chart());
  if (a.degree() != b.degree()) throw PreconditionError("adding multivectors of different degree");
  Multivector out = a;
  for (const auto& [idx, coef] : b.components()) out.add_term(idx, coef);
  return out;
}

Multivector operator-(const Multivector& a, const Multivector& b) {
  return a + Expr(-1) * b;
}

Multivector operator*(const Expr& f, const Multivector& a) {
  Multivector out(a.chart(), a.degree());
  for (const auto& [idx, coef] : a.components()) out.add_term(idx, f * coef);
  return out;
}

Multivector wedge(const Multivector& a, const Multivector& b) {
  require_same_chart(*a.chart(), *b.chart());
  Multivector out(a.chart(), a.degree() + b.degree());
  for (const auto& [ia, ca] : a.components()) {
    for (const auto& [ib, cb] : b.components()) {
      Multivector::Index idx = ia;
      idx.insert(idx.end(), ib.begin(), ib.end());
      out.add_term(std::move(idx), ca * cb);
    }
  }
  return out;
}

Multivector wedge(const VectorField& a, const VectorField& b) {
  return wedge(Multivector::from_vector(a), Multivector::from_vector(b));
}

OneForm differential(const ChartPtr& chart, const Expr& h) {
  require_in_chart(h, *chart);
  std::vector<Expr> c(chart->dim());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = differentiate(h, i);
  return OneForm(chart, std::move(c));
}

Expr apply(const VectorField& x, const Expr& h) {
  require_in_chart(h, *x.chart());
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    if (x[i].is_zero()) continue;
    terms.push_back(x[i] * differentiate(h, i));
  }
  return add(std::move(terms));
}

Multivector interior_product(const OneForm& alpha, const Multivector& a) {
  require_same_chart(*alpha.chart(), *a.chart());
  if (a.degree() == 0) throw PreconditionError("interior product into a degree-0 multivector");
  Multivector out(a.chart(), a.degree() - 1);
  for (const auto& [idx, coef] : a.components()) {
    for (std::size_t m = 0; m < idx.size(); ++m) {
      const Expr& am = alpha[idx[m]];
      if (am.is_zero()) continue;
      Expr term = am * coef;
      out.add_term(without(idx, m), m % 2 == 0 ? term : -term);
    }
  }
  return out;
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  require_same_chart(*x.chart(), *y.chart());
  std::size_t n = x.dim();
  std::vector<Expr> c(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Expr> terms;
    for (std::size_t k = 0; k < n; ++k) {
      if (!x[k].is_zero()) terms.push_back(x[k] * differentiate(y[i], k));
      if (!y[k].is_zero()) terms.push_back(-(y[k] * differentiate(x[i], k)));
    }
    c[i] = add(std::move(terms));
  }
  return VectorField(x.chart(), std::move(c));
}

namespace {

Multivector bracket_with_function(const Expr& f, const Multivector& b, bool function_first) {
  OneForm df = differential(b.chart(), f);
  Multivector contracted = interior_product(df, b);
  bool negate = function_first || (b.degree() % 2 == 0);
  return negate ? Expr(-1) * contracted : contracted;
}

}  // namespace

Multivector schouten(const Multivector& a, const Multivector& b) {
  require_same_chart(*a.chart(), *b.chart());
  const std::size_t p = a.degree();
  const std::size_t q = b.degree();
  if (p == 0 && q == 0) throw PreconditionError("Schouten bracket of two functions");
  if (p == 0) return bracket_with_function(a.component({}), b, true);
  if (q == 0) return bracket_with_function(b.component({}), a, false);

  // Each monomial f d_{a1}^...^d_{ap} is treated as (f d_{a1})^d_{a2}^...^d_{ap};
  // only brackets involving the coefficient-carrying first factor survive.
  Multivector out(a.chart(), p + q - 1);
  DerivativeCache cache;
  for (const auto& [ia, f] : a.components()) {
    for (const auto& [ib, g] : b.components()) {
      // (i=1, j=1): [f d_a1, g d_b1] ^ rest_a ^ rest_b
      {
        Multivector::Index tail;
        tail.insert(tail.end(), ia.begin() + 1, ia.end());
        tail.insert(tail.end(), ib.begin() + 1, ib.end());
        const Expr& dg = cache.get(g, ia[0]);
        if (!dg.is_zero()) {
          Multivector::Index idx{ib[0]};
          idx.insert(idx.end(), tail.begin(), tail.end());
          out.add_term(std::move(idx), f * dg);
        }
        const Expr& df = cache.get(f, ib[0]);
        if (!df.is_zero()) {
          Multivector::Index idx{ia[0]};
          idx.insert(idx.end(), tail.begin(), tail.end());
          out.add_term(std::move(idx), -(g * df));
        }
      }
      // (i=1, j>=2): (-1)^{1+j} [f d_a1, d_bj] = (-1)^j (d_bj f) d_a1
      for (std::size_t j = 1; j < q; ++j) {
        const Expr& df = cache.get(f, ib[j]);
        if (df.is_zero()) continue;
        Multivector::Index idx = ia;
        Multivector::Index rest = without(ib, j);
        idx.insert(idx.end(), rest.begin(), rest.end());
        Expr term = g * df;
        // 1-based j' = j + 1, so (-1)^{j'} = -(-1)^j.
        out.add_term(std::move(idx), j % 2 == 0 ? -term : term);
      }
      // (i>=2, j=1): (-1)^{i+1} [d_ai, g d_b1] = (-1)^{i+1} (d_ai g) d_b1
      for (std::size_t i = 1; i < p; ++i) {
        const Expr& dg = cache.get(g, ia[i]);
        if (dg.is_zero()) continue;
        Multivector::Index idx{ib[0]};
        Multivector::Index rest = without(ia, i);
        idx.insert(idx.end(), rest.begin(), rest.end());
        idx.insert(idx.end(), ib.begin() + 1, ib.end());
        Expr term = f * dg;
        // 1-based i' = i + 1, so (-1)^{i'+1} = (-1)^i.
        out.add_term(std::move(idx), i % 2 == 0 ? term : -term);
      }
    }
  }
  return out;
}

Multivector lie_derivative(const VectorField& x, const Multivector& a) {
  return schouten(Multivector::from_vector(x), a);
}

ZeroVerdict multivector_is_zero(const Multivector& a, const ZeroPolicy& policy,
                                const FnBindings& bindings) {
  std::vector<ZeroVerdict> verdicts;
  for (const auto& [idx, coef] : a.components()) {
    verdicts.push_back(decide_zero(coef, *a.chart(), policy, bindings));
  }
  return merge_verdicts(verdicts);
}

ZeroVerdict vector_field_is_zero(const VectorField& x, const ZeroPolicy& policy,
                                 const FnBindings& bindings) {
  return multivector_is_zero(Multivector::from_vector(x), policy, bindings);
}

std::string print(const VectorField& x) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < x.dim(); ++i) {
    if (i > 0) out << ", ";
    out << print(x[i], *x.chart());
  }
  out << ')';
  return out.str();
}

std::string print(const Multivector& a) {
  if (a.components().empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [idx, coef] : a.components()) {
    if (!first) out << " + ";
    first = false;
    out << '(' << print(coef, *a.chart()) << ')';
    for (std::size_t i : idx) out << " d_" << a.chart()->names()[i];
  }
  return out.str();
}

}  // namespace qbhkit
