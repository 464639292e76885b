#include "qbhkit/jacobi.hpp"

namespace qbhkit {

CheckReport check_jacobi_structure(const Multivector& lambda, const VectorField& e,
                                   const ZeroPolicy& policy, const FnBindings& bindings) {
  require_same_chart(*lambda.chart(), *e.chart());
  if (lambda.degree() != 2) throw PreconditionError("Lambda must be a bivector");
  Multivector ev = Multivector::from_vector(e);
  CheckReport out;
  out.add_verdict("self-bracket", "[Lambda,Lambda] = 2 E^Lambda",
                  multivector_is_zero(schouten(lambda, lambda) - Expr(2) * wedge(ev, lambda),
                                      policy, bindings));
  out.add_verdict("automorphism", "[E,Lambda] = 0",
                  multivector_is_zero(schouten(ev, lambda), policy, bindings));
  return out;
}

JacobiStructure make_jacobi_structure(const Multivector& lambda, const VectorField& e,
                                      const ZeroPolicy& policy, const FnBindings& bindings) {
  return {lambda.chart(), lambda, e, check_jacobi_structure(lambda, e, policy, bindings)};
}

CheckReport check_theorem3(const VectorField& x1, const VectorField& x2, const VectorField& xh,
                           const Expr& a, const Expr& b, const Expr& c, const ZeroPolicy& policy,
                           const FnBindings& bindings) {
  require_same_chart(*x1.chart(), *x2.chart());
  require_same_chart(*x1.chart(), *xh.chart());
  CheckReport out;
  out.add_verdict("x1-x2", "[X1,X2] = -X_H",
                  vector_field_is_zero(lie_bracket(x1, x2) + xh, policy, bindings));
  out.add_verdict("xh-x1", "[X_H,X1] = -A X1 + B X2",
                  vector_field_is_zero(lie_bracket(xh, x1) - (-a * x1 + b * x2), policy,
                                       bindings));
  out.add_verdict("xh-x2", "[X_H,X2] = C X1 + A X2",
                  vector_field_is_zero(lie_bracket(xh, x2) - (c * x1 + a * x2), policy,
                                       bindings));
  out.append(check_jacobi_structure(wedge(x1, x2), xh, policy, bindings), "consequence-");
  return out;
}

}  // namespace qbhkit
