#include "qbhkit/poisson.hpp"

namespace qbhkit {

PoissonCandidate::PoissonCandidate(Multivector bivector, std::optional<ZeroVerdict> verified)
    : bivector_(std::move(bivector)), verified_(std::move(verified)) {
  if (bivector_.degree() != 2) {
    throw PreconditionError("a Poisson candidate must be a bivector, got degree " +
                            std::to_string(bivector_.degree()));
  }
}

HamiltonianSystem::HamiltonianSystem(PoissonCandidate j, Expr h)
    : J(std::move(j)), H(std::move(h)) {
  require_in_chart(H, *J.chart());
}

ZeroVerdict check_jacobi_identity(const PoissonCandidate& j, const ZeroPolicy& policy,
                                  const FnBindings& bindings) {
  return multivector_is_zero(schouten(j.bivector(), j.bivector()), policy, bindings);
}

PoissonCandidate verify_poisson(const PoissonCandidate& j, const ZeroPolicy& policy,
                                const FnBindings& bindings) {
  return PoissonCandidate(j.bivector(), check_jacobi_identity(j, policy, bindings));
}

Expr poisson_bracket(const PoissonCandidate& j, const Expr& f, const Expr& g) {
  require_in_chart(f, *j.chart());
  require_in_chart(g, *j.chart());
  std::vector<Expr> terms;
  for (const auto& [idx, coef] : j.bivector().components()) {
    Expr fi = differentiate(f, idx[0]);
    Expr fj = differentiate(f, idx[1]);
    Expr gi = differentiate(g, idx[0]);
    Expr gj = differentiate(g, idx[1]);
    terms.push_back(coef * (fi * gj - fj * gi));
  }
  return add(std::move(terms));
}

VectorField hamiltonian_vector_field(const PoissonCandidate& j, const Expr& h) {
  return interior_product(differential(j.chart(), h), j.bivector()).to_vector_field();
}

ZeroVerdict check_compatibility(const PoissonCandidate& j1, const PoissonCandidate& j2,
                                const ZeroPolicy& policy, const FnBindings& bindings) {
  return multivector_is_zero(schouten(j1.bivector(), j2.bivector()), policy, bindings);
}

ZeroVerdict check_infinitesimal_automorphism(const VectorField& x, const PoissonCandidate& j,
                                             const ZeroPolicy& policy,
                                             const FnBindings& bindings) {
  return multivector_is_zero(lie_derivative(x, j.bivector()), policy, bindings);
}

ZeroVerdict check_first_integral(const PoissonCandidate& j, const Expr& h, const Expr& f,
                                 const ZeroPolicy& policy, const FnBindings& bindings) {
  return decide_zero(poisson_bracket(j, h, f), *j.chart(), policy, bindings);
}

ZeroVerdict check_casimir(const PoissonCandidate& j, const Expr& f, const ZeroPolicy& policy,
                          const FnBindings& bindings) {
  return vector_field_is_zero(hamiltonian_vector_field(j, f), policy, bindings);
}

}  // namespace qbhkit
