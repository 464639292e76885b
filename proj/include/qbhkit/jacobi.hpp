#pragma once

// Jacobi structures (Lambda, E): [Lambda,Lambda] = 2 E^Lambda and
// [E,Lambda] = 0. With E = 0 this is the Poisson condition.

#include "qbhkit/qbh.hpp"

namespace qbhkit {

struct JacobiStructure {
  ChartPtr chart;
  Multivector Lambda;
  VectorField E;
  CheckReport audit;
};

/// Items: self-bracket ([Lambda,Lambda] - 2 E^Lambda = 0) and
/// automorphism ([E,Lambda] = 0).
CheckReport check_jacobi_structure(const Multivector& lambda, const VectorField& e,
                                   const ZeroPolicy& policy, const FnBindings& bindings = {});

JacobiStructure make_jacobi_structure(const Multivector& lambda, const VectorField& e,
                                      const ZeroPolicy& policy, const FnBindings& bindings = {});

/// Items x1-x2 ([X1,X2] = -X_H), xh-x1 ([X_H,X1] = -A X1 + B X2),
/// xh-x2 ([X_H,X2] = C X1 + A X2), then consequence-self-bracket and
/// consequence-automorphism from check_jacobi_structure(X1^X2, X_H).
CheckReport check_theorem3(const VectorField& x1, const VectorField& x2, const VectorField& xh,
                           const Expr& a, const Expr& b, const Expr& c, const ZeroPolicy& policy,
                           const FnBindings& bindings = {});

}  // namespace qbhkit
