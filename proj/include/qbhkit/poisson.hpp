#pragma once

// Poisson bivectors: Jacobi identity, brackets of functions, Hamiltonian
// vector fields and the derived checks. Degenerate bivectors are allowed
// everywhere; no rank condition is ever imposed.

#include <optional>

#include "qbhkit/multivec.hpp"

namespace qbhkit {

class PoissonCandidate {
 public:
  /// Throws PreconditionError unless `bivector` has degree 2.
  explicit PoissonCandidate(Multivector bivector,
                            std::optional<ZeroVerdict> verified = std::nullopt);

  const Multivector& bivector() const { return bivector_; }
  const ChartPtr& chart() const { return bivector_.chart(); }
  /// Verdict on [J,J] = 0 if it has been computed.
  const std::optional<ZeroVerdict>& verified() const { return verified_; }

 private:
  Multivector bivector_;
  std::optional<ZeroVerdict> verified_;
};

struct HamiltonianSystem {
  HamiltonianSystem(PoissonCandidate j, Expr h);

  PoissonCandidate J;
  Expr H;
};

/// Verdict on [J,J] = 0.
ZeroVerdict check_jacobi_identity(const PoissonCandidate& j, const ZeroPolicy& policy,
                                  const FnBindings& bindings = {});

/// Copy of `j` carrying its Jacobi verdict.
PoissonCandidate verify_poisson(const PoissonCandidate& j, const ZeroPolicy& policy,
                                const FnBindings& bindings = {});

/// {F,G} = sum_{i,j} J^{ij} dF/dx^i dG/dx^j.
Expr poisson_bracket(const PoissonCandidate& j, const Expr& f, const Expr& g);

/// X_H = dH _| J, so that X_H(G) = {H,G}.
VectorField hamiltonian_vector_field(const PoissonCandidate& j, const Expr& h);

ZeroVerdict check_compatibility(const PoissonCandidate& j1, const PoissonCandidate& j2,
                                const ZeroPolicy& policy, const FnBindings& bindings = {});

ZeroVerdict check_infinitesimal_automorphism(const VectorField& x, const PoissonCandidate& j,
                                             const ZeroPolicy& policy,
                                             const FnBindings& bindings = {});

/// Verdict on {H,F} = 0.
ZeroVerdict check_first_integral(const PoissonCandidate& j, const Expr& h, const Expr& f,
                                 const ZeroPolicy& policy, const FnBindings& bindings = {});

/// Verdict on dF _| J = 0.
ZeroVerdict check_casimir(const PoissonCandidate& j, const Expr& f, const ZeroPolicy& policy,
                          const FnBindings& bindings = {});

}  // namespace qbhkit
