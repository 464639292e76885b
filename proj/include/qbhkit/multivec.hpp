#pragma once

// Coordinate vector fields, one-forms and multivector fields with symbolic
// coefficients, together with the Lie and Schouten-Nijenhuis brackets.
//
// Sign conventions: the Schouten bracket agrees with the Lie bracket on
// vector fields, with the Lie derivative when its first argument is a vector
// field, and is graded antisymmetric and a graded derivation of the wedge:
//
//   [A,B]   = -(-1)^{(p-1)(q-1)} [B,A]
//   [A,B^C] = [A,B]^C + (-1)^{(p-1)q} B^[A,C]
//
// On functions, [f,B] = -df _| B and [A,f] = (-1)^{p-1} df _| A, where the
// interior product contracts the first slot: dH _| (X^Y) = X(H) Y - Y(H) X.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "qbhkit/symexpr.hpp"

namespace qbhkit {

class VectorField {
 public:
  VectorField(ChartPtr chart, std::vector<Expr> components);
  static VectorField zero(ChartPtr chart);
  /// The coordinate field d/dx_index.
  static VectorField basis(ChartPtr chart, std::size_t index);

  const ChartPtr& chart() const { return chart_; }
  std::size_t dim() const { return components_.size(); }
  const std::vector<Expr>& components() const { return components_; }
  const Expr& operator[](std::size_t i) const { return components_[i]; }

 private:
  ChartPtr chart_;
  std::vector<Expr> components_;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a);
VectorField operator*(const Expr& f, const VectorField& x);

class OneForm {
 public:
  OneForm(ChartPtr chart, std::vector<Expr> components);

  const ChartPtr& chart() const { return chart_; }
  std::size_t dim() const { return components_.size(); }
  const std::vector<Expr>& components() const { return components_; }
  const Expr& operator[](std::size_t i) const { return components_[i]; }

 private:
  ChartPtr chart_;
  std::vector<Expr> components_;
};

/// Multivector field of degree p stored sparsely over strictly increasing
/// index tuples. A degree above the chart dimension is allowed and is always
/// zero.
class Multivector {
 public:
  using Index = std::vector<std::size_t>;

  Multivector(ChartPtr chart, std::size_t degree);
  static Multivector scalar(ChartPtr chart, Expr value);
  static Multivector from_vector(const VectorField& x);

  const ChartPtr& chart() const { return chart_; }
  std::size_t degree() const { return degree_; }
  const std::map<Index, Expr>& components() const { return components_; }
  /// Component for a strictly increasing index tuple (zero if absent).
  Expr component(const Index& index) const;

  /// Adds coef * d_{i1}^...^d_{ip} for an arbitrary index tuple, reordering
  /// with the permutation sign and dropping tuples with repeats.
  void add_term(Index index, const Expr& coef);

  /// Components as a vector field; degree must be 1.
  VectorField to_vector_field() const;

 private:
  ChartPtr chart_;
  std::size_t degree_;
  std::map<Index, Expr> components_;
};

Multivector operator+(const Multivector& a, const Multivector& b);
Multivector operator-(const Multivector& a, const Multivector& b);
Multivector operator*(const Expr& f, const Multivector& a);

/// Throws ChartMismatch unless both charts have the same coordinates.
void require_same_chart(const Chart& a, const Chart& b);

Multivector wedge(const Multivector& a, const Multivector& b);
Multivector wedge(const VectorField& a, const VectorField& b);

OneForm differential(const ChartPtr& chart, const Expr& h);

/// X(h) = sum_i X^i dh/dx^i.
Expr apply(const VectorField& x, const Expr& h);

/// Contraction of `alpha` into the first slot of `a`; degree must be >= 1.
Multivector interior_product(const OneForm& alpha, const Multivector& a);

VectorField lie_bracket(const VectorField& x, const VectorField& y);

Multivector schouten(const Multivector& a, const Multivector& b);

Multivector lie_derivative(const VectorField& x, const Multivector& a);

ZeroVerdict multivector_is_zero(const Multivector& a, const ZeroPolicy& policy,
                                const FnBindings& bindings = {});
ZeroVerdict vector_field_is_zero(const VectorField& x, const ZeroPolicy& policy,
                                 const FnBindings& bindings = {});

std::string print(const VectorField& x);
std::string print(const Multivector& a);

}  // namespace qbhkit
