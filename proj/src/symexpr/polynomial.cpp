#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qbhkit/symexpr.hpp"

namespace qbhkit {

namespace {

void trim(Polynomial::Monomial& m) {
  while (!m.empty() && m.back() == 0) m.pop_back();
}

unsigned total_degree(const Polynomial::Monomial& m) {
  return std::accumulate(m.begin(), m.end(), 0U);
}

}  // namespace

Polynomial::Polynomial(const Rational& c) {
  if (c != 0) terms_[Monomial{}] = c;
}

Polynomial Polynomial::variable(std::size_t index) {
  Polynomial p;
  Monomial m(index + 1, 0);
  m[index] = 1;
  p.terms_[m] = 1;
  return p;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) {
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Polynomial::Monomial m(std::max(ma.size(), mb.size()), 0);
      for (std::size_t i = 0; i < ma.size(); ++i) m[i] += ma[i];
      for (std::size_t i = 0; i < mb.size(); ++i) m[i] += mb[i];
      trim(m);
      Rational c = ca * cb;
      auto [it, inserted] = out.terms_.try_emplace(m, c);
      if (!inserted) {
        it->second += c;
        if (it->second == 0) out.terms_.erase(it);
      }
    }
  }
  return out;
}

double Polynomial::evaluate(std::span<const double> point) const {
  double sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double term = static_cast<double>(c);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] != 0) term *= std::pow(point[i], static_cast<double>(m[i]));
    }
    sum += term;
  }
  return sum;
}

std::string Polynomial::str(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::vector<std::pair<Monomial, Rational>> ordered(terms_.begin(), terms_.end());
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    unsigned da = total_degree(a.first);
    unsigned db = total_degree(b.first);
    if (da != db) return da > db;
    return a.first > b.first;
  });
  std::ostringstream out;
  bool first = true;
  for (const auto& [m, c] : ordered) {
    Rational mag = c < 0 ? Rational(-c) : c;
    if (first) {
      if (c < 0) out << '-';
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    first = false;
    bool constant = m.empty();
    if (mag != 1 || constant) {
      out << numerator(mag);
      if (denominator(mag) != 1) out << '/' << denominator(mag);
      if (!constant) out << '*';
    }
    bool first_factor = true;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      if (!first_factor) out << '*';
      first_factor = false;
      out << (i < names.size() ? names[i] : "x?" + std::to_string(i));
      if (m[i] > 1) out << '^' << m[i];
    }
  }
  return out.str();
}

std::optional<Polynomial> polynomial_normal_form(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Const: return Polynomial(e.constant());
    case NodeKind::Var: return Polynomial::variable(e.var_index());
    case NodeKind::Sum: {
      Polynomial acc;
      for (const auto& t : e.operands()) {
        auto p = polynomial_normal_form(t);
        if (!p) return std::nullopt;
        acc += *p;
      }
      return acc;
    }
    case NodeKind::Product: {
      Polynomial acc(1);
      for (const auto& f : e.operands()) {
        auto p = polynomial_normal_form(f);
        if (!p) return std::nullopt;
        acc = acc * *p;
      }
      return acc;
    }
    case NodeKind::Power: {
      if (e.exponent() < 0) return std::nullopt;
      auto b = polynomial_normal_form(e.operands()[0]);
      if (!b) return std::nullopt;
      Polynomial acc(1);
      for (long i = 0; i < e.exponent(); ++i) acc = acc * *b;
      return acc;
    }
    default: return std::nullopt;
  }
}

}  // namespace qbhkit
