#pragma once

// Verification of singular quasi-bi-Hamiltonian structures built from three
// vector fields X1, X2, X3 and a Hamiltonian H:
//
//   J1 = X1^X2,  X_H = X1(H) X2 - X2(H) X1,  J2 = X_H^X3,  rho = -X3(F).
//
// Every relation is checked independently; nothing is assumed to follow
// from anything else.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qbhkit/poisson.hpp"
#include "qbhkit/report.hpp"

namespace qbhkit {

struct StructureCoefficients {
  std::optional<Expr> N1, N2, A1, A2, B1, B2, C1, C2, D1, D2, E1, E2;

  static constexpr std::array<std::string_view, 12> names{
      "N1", "N2", "A1", "A2", "B1", "B2", "C1", "C2", "D1", "D2", "E1", "E2"};

  /// Throws std::out_of_range for an unknown name.
  std::optional<Expr>& slot(std::string_view name);
  const std::optional<Expr>& slot(std::string_view name) const;
  /// Throws MissingCoefficient when absent.
  const Expr& require(std::string_view name) const;
};

struct SpanVerdict {
  ZeroVerdict verdict;
  /// Sample points where the basis had deficient rank (numeric mode only).
  std::size_t rank_deficient_points = 0;
};

/// Checks [x,y] in span(basis). With `coeffs`, the difference
/// [x,y] - sum coeffs_i basis_i is decided symbolically; without, the bracket
/// is projected onto the basis by least squares at each sample point and the
/// worst residual |b - Bc| / (1 + |b|) is reported.
SpanVerdict verify_span_closure(const VectorField& x, const VectorField& y,
                                const std::vector<VectorField>& basis,
                                const std::optional<std::vector<Expr>>& coeffs,
                                const ZeroPolicy& policy, const FnBindings& bindings = {});

/// Numeric span membership of an already computed vector field.
SpanVerdict verify_in_span(const VectorField& v, const std::vector<VectorField>& basis,
                           const ZeroPolicy& policy, const FnBindings& bindings = {});

struct AlgebraRelation {
  std::string id;
  std::string label;
  VectorField claimed;
  VectorField computed;
  ZeroVerdict verdict;
};

struct AlgebraWitness {
  std::vector<AlgebraRelation> relations;

  bool passed() const;
  const AlgebraRelation& at(std::string_view id) const;
  CheckReport report() const;
};

/// Relations checked literally (ids x1-x2, xh-x3, xh-x1, xh-x2, x3-x1, x3-x2):
///   [X1,X2] = N1 X1 + N2 X2        [X_H,X3] = A1 X_H + A2 X3
///   [X_H,X1] = -C2 X1 + B2 X2      [X_H,X2] = C1 X1 + C2 X2
///   [X3,X1] = D1 X_H + D2 X2       [X3,X2] = E1 X_H + E2 X1
AlgebraWitness verify_theorem1(const VectorField& x1, const VectorField& x2,
                               const VectorField& x3, const VectorField& xh,
                               const StructureCoefficients& c, const ZeroPolicy& policy,
                               const FnBindings& bindings = {});

struct Lemma4Free {
  Expr N1, D1, D2, E1, E2;
};

/// Free coefficients that make X3 act on X1, X2 like the Delta algebra:
/// N1 = E1 = E2 = 0, D1 = -1/X2(H), D2 = -1 + X1(H)/X2(H).
Lemma4Free delta_free_coefficients(const VectorField& x1, const VectorField& x2,
                                   const Expr& h);

/// The twelve coefficients with the dependent ones computed from the
/// closed formulas (a = X1(H), b = X2(H)):
///   C1 = b N1 - X2(b)             C2 = X1(b) - a N1          B1 = -C2
///   B2 = (a/b)(X1(b) - a N1) + X2(a)/b - X1(a)
///   N2 = X1(b)/b - (a/b) N1 + X2(a)/b
///   A1 = (a/b) E2 - b D1 - a E1 + X3(b)/b
///   A2 = -(b D2 + (a^2/b) E2 + X3(a) + X3(b) a/b)
/// Throws DomainError when b vanishes at a sample point of the chart.
StructureCoefficients compute_lemma4_coefficients(const VectorField& x1, const VectorField& x2,
                                                  const VectorField& x3, const Expr& h,
                                                  const Lemma4Free& free,
                                                  const ZeroPolicy& policy = {},
                                                  const FnBindings& bindings = {});

/// X_H = X1(H) X2 - X2(H) X1.
VectorField hamiltonian_field_of_pair(const VectorField& x1, const VectorField& x2,
                                      const Expr& h);

/// Items: reduced-x1-x2, reduced-x3-x1, reduced-x3-x2 (the reduced
/// three-field algebra), xh-x3-span (least-squares projection of [X_H,X3]
/// onto X_H, X3), xh-x3-coefficients (the same relation with the supplied
/// A1, A2), xh-x1 and xh-x2 with the supplied coefficients.
CheckReport verify_lemma4_reduction(const VectorField& x1, const VectorField& x2,
                                    const VectorField& x3, const Expr& h,
                                    const StructureCoefficients& c, const ZeroPolicy& policy,
                                    const FnBindings& bindings = {});

/// Items x1-x2 ([X1,X2] = 0), x3-x1 ([X3,X1] = X1), x3-x2 ([X3,X2] = X2)
/// and the informational independence
/// diagnostic (minimum normalized Gram determinant of X1, X2, X3).
CheckReport check_delta_algebra(const VectorField& x1, const VectorField& x2,
                                const VectorField& x3, const ZeroPolicy& policy,
                                const FnBindings& bindings = {});

struct HamiltonianCondition {
  /// X1 X2 (H) = 0.
  ZeroVerdict condition;
  /// (X1 X2 + X2 X1)(H) = 0.
  ZeroVerdict symmetrized;
};

HamiltonianCondition check_hamiltonian_condition(const VectorField& x1, const VectorField& x2,
                                                 const Expr& h, const ZeroPolicy& policy,
                                                 const FnBindings& bindings = {});

/// H = I1(xi1) + I2(xi2) with opaque I1, I2. Requires X1(xi1) = 0 and
/// X2(xi2) = 0; throws PreconditionError otherwise.
Expr build_separable_hamiltonian(const Expr& xi1, const Expr& xi2, const std::string& i1,
                                 const std::string& i2, const VectorField& x1,
                                 const VectorField& x2, const ZeroPolicy& policy,
                                 const FnBindings& bindings = {});

struct QbhSystem {
  ChartPtr chart;
  VectorField X1, X2, X3;
  Expr H, F;
  VectorField XH;
  Expr rho;
  PoissonCandidate J1, J2;
  Multivector P;
  /// X_F = dF _| J2.
  VectorField XF;
  CheckReport audit;
};

/// Audit ids: delta, hamiltonian-condition, jacobi-J1, jacobi-J2,
/// compatibility, automorphism, first-integral, scaled-hamiltonian,
/// rho-nonvanishing, jacobi-P; informational: independence, symmetrized,
/// casimir.
QbhSystem assemble_qbh(const VectorField& x1, const VectorField& x2, const VectorField& x3,
                       const Expr& h, const Expr& f, const ZeroPolicy& policy,
                       const FnBindings& bindings = {});

/// Items: conserved (X1(H) = 0), symmetry ([X3,X1] = X1), rho-constant
/// (X1(rho) = 0 with rho = X3(H)), informational contraction-sign
/// (dH _| (X1^X3) = s rho X1, value s = +1 or -1, 0 if neither).
CheckReport check_hojman_case(const VectorField& x1, const VectorField& x3, const Expr& h,
                              const ZeroPolicy& policy, const FnBindings& bindings = {});

/// Items: x3-dF (X3(F) + 1 = 0) and first-integral ({H,F} = 0).
CheckReport check_bihamiltonian_2d(const VectorField& x3, const Expr& h, const Expr& f,
                                   const PoissonCandidate& j, const ZeroPolicy& policy,
                                   const FnBindings& bindings = {});

}  // namespace qbhkit
