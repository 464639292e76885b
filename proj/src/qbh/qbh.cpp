#include "qbhkit/qbh.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qbhkit {

namespace {

std::string point_text(const std::vector<double>& p) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i > 0) out << ", ";
    out << p[i];
  }
  out << ')';
  return out.str();
}

Eigen::VectorXd values_at(const VectorField& x, std::span<const double> p,
                          const FnBindings& bindings) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(x.dim()));
  for (std::size_t i = 0; i < x.dim(); ++i) {
    v(static_cast<Eigen::Index>(i)) = evaluate_unchecked(x[i], p, bindings);
  }
  return v;
}

VectorField combination(const ChartPtr& chart, const std::vector<Expr>& coeffs,
                        const std::vector<VectorField>& fields) {
  VectorField out = VectorField::zero(chart);
  for (std::size_t i = 0; i < fields.size(); ++i) out = out + coeffs[i] * fields[i];
  return out;
}

ZeroVerdict fields_equal(const VectorField& a, const VectorField& b, const ZeroPolicy& policy,
                         const FnBindings& bindings) {
  return vector_field_is_zero(a - b, policy, bindings);
}

// Minimum |e| over the sample points together with the point attaining it.
std::pair<double, std::vector<double>> sampled_minimum(const Expr& e, const Chart& chart,
                                                       const ZeroPolicy& policy,
                                                       const FnBindings& bindings) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> where;
  for_each_sample(chart, policy, [&](std::span<const double> p) {
    double v = std::abs(evaluate_unchecked(e, p, bindings));
    if (v < best) {
      best = v;
      where.assign(p.begin(), p.end());
    }
  });
  return {best, where};
}

}  // namespace

std::optional<Expr>& StructureCoefficients::slot(std::string_view name) {
  if (name == "N1") return N1;
  if (name == "N2") return N2;
  if (name == "A1") return A1;
  if (name == "A2") return A2;
  if (name == "B1") return B1;
  if (name == "B2") return B2;
  if (name == "C1") return C1;
  if (name == "C2") return C2;
  if (name == "D1") return D1;
  if (name == "D2") return D2;
  if (name == "E1") return E1;
  if (name == "E2") return E2;
  throw std::out_of_range("unknown structure coefficient '" + std::string(name) + "'");
}

const std::optional<Expr>& StructureCoefficients::slot(std::string_view name) const {
  return const_cast<StructureCoefficients*>(this)->slot(name);
}

const Expr& StructureCoefficients::require(std::string_view name) const {
  const auto& s = slot(name);
  if (!s) throw MissingCoefficient("structure coefficient " + std::string(name) + " is missing");
  return *s;
}

SpanVerdict verify_in_span(const VectorField& v, const std::vector<VectorField>& basis,
                           const ZeroPolicy& policy, const FnBindings& bindings) {
  for (const auto& b : basis) require_same_chart(*v.chart(), *b.chart());
  SpanVerdict out;
  bool all_polynomial_zero = true;
  for (const auto& c : v.components()) {
    auto pnf = polynomial_normal_form(c);
    if (!pnf || !pnf->is_zero()) all_polynomial_zero = false;
  }
  if (all_polynomial_zero) {
    out.verdict = ZeroVerdict::exact();
    return out;
  }

  const auto n = static_cast<Eigen::Index>(v.dim());
  const auto k = static_cast<Eigen::Index>(basis.size());
  double worst = -1.0;
  std::vector<double> witness;
  for_each_sample(*v.chart(), policy, [&](std::span<const double> p) {
    Eigen::VectorXd b = values_at(v, p, bindings);
    Eigen::MatrixXd m(n, k);
    for (Eigen::Index j = 0; j < k; ++j) {
      m.col(j) = values_at(basis[static_cast<std::size_t>(j)], p, bindings);
    }
    double residual = b.norm();
    if (k > 0) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
      svd.setThreshold(1e-10);
      if (svd.rank() < k) ++out.rank_deficient_points;
      Eigen::VectorXd c = svd.solve(b);
      residual = (b - m * c).norm();
    }
    double r = residual / (1.0 + b.norm());
    if (r > worst) {
      worst = r;
      witness.assign(p.begin(), p.end());
    }
  });
  if (worst > policy.tolerance) {
    out.verdict = ZeroVerdict::nonzero(std::move(witness), worst, policy.sample_count);
  } else {
    out.verdict = ZeroVerdict::numeric(worst, policy.sample_count);
  }
  return out;
}

SpanVerdict verify_span_closure(const VectorField& x, const VectorField& y,
                                const std::vector<VectorField>& basis,
                                const std::optional<std::vector<Expr>>& coeffs,
                                const ZeroPolicy& policy, const FnBindings& bindings) {
  VectorField bracket = lie_bracket(x, y);
  if (!coeffs) return verify_in_span(bracket, basis, policy, bindings);
  if (coeffs->size() != basis.size()) {
    throw PreconditionError("span coefficients and basis differ in length");
  }
  for (const auto& b : basis) require_same_chart(*x.chart(), *b.chart());
  SpanVerdict out;
  out.verdict = fields_equal(bracket, combination(x.chart(), *coeffs, basis), policy, bindings);
  return out;
}

bool AlgebraWitness::passed() const {
  for (const auto& r : relations) {
    if (!r.verdict.is_zero()) return false;
  }
  return true;
}

const AlgebraRelation& AlgebraWitness::at(std::string_view id) const {
  for (const auto& r : relations) {
    if (r.id == id) return r;
  }
  throw std::out_of_range("no relation '" + std::string(id) + "'");
}

CheckReport AlgebraWitness::report() const {
  CheckReport out;
  for (const auto& r : relations) out.add_verdict(r.id, r.label, r.verdict);
  return out;
}

AlgebraWitness verify_theorem1(const VectorField& x1, const VectorField& x2,
                               const VectorField& x3, const VectorField& xh,
                               const StructureCoefficients& c, const ZeroPolicy& policy,
                               const FnBindings& bindings) {
  require_same_chart(*x1.chart(), *x2.chart());
  require_same_chart(*x1.chart(), *x3.chart());
  require_same_chart(*x1.chart(), *xh.chart());
  struct Spec {
    const char* id;
    const char* label;
    const VectorField& a;
    const VectorField& b;
    Expr c1;
    const VectorField& v1;
    Expr c2;
    const VectorField& v2;
  };
  const Spec specs[] = {
      {"x1-x2", "[X1,X2] = N1 X1 + N2 X2", x1, x2, c.require("N1"), x1, c.require("N2"), x2},
      {"xh-x3", "[X_H,X3] = A1 X_H + A2 X3", xh, x3, c.require("A1"), xh, c.require("A2"), x3},
      {"xh-x1", "[X_H,X1] = -C2 X1 + B2 X2", xh, x1, -c.require("C2"), x1, c.require("B2"), x2},
      {"xh-x2", "[X_H,X2] = C1 X1 + C2 X2", xh, x2, c.require("C1"), x1, c.require("C2"), x2},
      {"x3-x1", "[X3,X1] = D1 X_H + D2 X2", x3, x1, c.require("D1"), xh, c.require("D2"), x2},
      {"x3-x2", "[X3,X2] = E1 X_H + E2 X1", x3, x2, c.require("E1"), xh, c.require("E2"), x1},
  };
  AlgebraWitness out;
  for (const auto& s : specs) {
    VectorField computed = lie_bracket(s.a, s.b);
    VectorField claimed = s.c1 * s.v1 + s.c2 * s.v2;
    ZeroVerdict v = fields_equal(computed, claimed, policy, bindings);
    out.relations.push_back({s.id, s.label, claimed, computed, v});
  }
  return out;
}

VectorField hamiltonian_field_of_pair(const VectorField& x1, const VectorField& x2,
                                      const Expr& h) {
  require_same_chart(*x1.chart(), *x2.chart());
  return apply(x1, h) * x2 - apply(x2, h) * x1;
}

Lemma4Free delta_free_coefficients(const VectorField& x1, const VectorField& x2,
                                   const Expr& h) {
  Expr a = apply(x1, h);
  Expr b = apply(x2, h);
  return {Expr(), -pow(b, -1), Expr(-1) + a / b, Expr(), Expr()};
}

StructureCoefficients compute_lemma4_coefficients(const VectorField& x1, const VectorField& x2,
                                                  const VectorField& x3, const Expr& h,
                                                  const Lemma4Free& free,
                                                  const ZeroPolicy& policy,
                                                  const FnBindings& bindings) {
  require_same_chart(*x1.chart(), *x2.chart());
  require_same_chart(*x1.chart(), *x3.chart());
  const Expr a = apply(x1, h);
  const Expr b = apply(x2, h);
  auto pnf = polynomial_normal_form(b);
  if (pnf && pnf->is_zero()) throw DomainError("X2(H) vanishes identically");
  auto [min_b, where] = sampled_minimum(b, *x1.chart(), policy, bindings);
  if (!(min_b > policy.tolerance)) {
    throw DomainError("X2(H) vanishes at sample point " + point_text(where));
  }
  // A sign change between samples means a zero in between (on a connected
  // domain), even when no sample lands on it.
  bool positive = false, negative = false;
  std::vector<double> pos_at, neg_at;
  for_each_sample(*x1.chart(), policy, [&](std::span<const double> p) {
    double v = evaluate_unchecked(b, p, bindings);
    if (v > 0 && !positive) {
      positive = true;
      pos_at.assign(p.begin(), p.end());
    }
    if (v < 0 && !negative) {
      negative = true;
      neg_at.assign(p.begin(), p.end());
    }
  });
  if (positive && negative) {
    throw DomainError("X2(H) changes sign between " + point_text(pos_at) + " and " +
                      point_text(neg_at));
  }

  const Expr& n1 = free.N1;
  const Expr inv_b = pow(b, -1);
  const Expr x1a = apply(x1, a);
  const Expr x1b = apply(x1, b);
  const Expr x2a = apply(x2, a);
  const Expr x2b = apply(x2, b);
  const Expr x3a = apply(x3, a);
  const Expr x3b = apply(x3, b);

  StructureCoefficients c;
  c.N1 = n1;
  c.D1 = free.D1;
  c.D2 = free.D2;
  c.E1 = free.E1;
  c.E2 = free.E2;
  c.C1 = b * n1 - x2b;
  c.C2 = x1b - a * n1;
  c.B1 = -*c.C2;
  c.B2 = a * inv_b * (x1b - a * n1) + x2a * inv_b - x1a;
  c.N2 = x1b * inv_b - a * inv_b * n1 + x2a * inv_b;
  c.A1 = a * inv_b * free.E2 - b * free.D1 - a * free.E1 + x3b * inv_b;
  c.A2 = -(b * free.D2 + pow(a, 2) * inv_b * free.E2 + x3a + x3b * a * inv_b);
  return c;
}

CheckReport verify_lemma4_reduction(const VectorField& x1, const VectorField& x2,
                                    const VectorField& x3, const Expr& h,
                                    const StructureCoefficients& c, const ZeroPolicy& policy,
                                    const FnBindings& bindings) {
  require_same_chart(*x1.chart(), *x2.chart());
  require_same_chart(*x1.chart(), *x3.chart());
  const Expr a = apply(x1, h);
  const Expr b = apply(x2, h);
  const VectorField xh = hamiltonian_field_of_pair(x1, x2, h);
  const Expr& d1 = c.require("D1");
  const Expr& e1 = c.require("E1");

  CheckReport out;
  out.add_verdict("reduced-x1-x2", "[X1,X2] = N1 X1 + N2 X2",
                  fields_equal(lie_bracket(x1, x2), c.require("N1") * x1 + c.require("N2") * x2,
                               policy, bindings));
  out.add_verdict("reduced-x3-x1", "[X3,X1] = (D1 X1(H) + D2) X2 - D1 X2(H) X1",
                  fields_equal(lie_bracket(x3, x1), (d1 * a + c.require("D2")) * x2 - d1 * b * x1,
                               policy, bindings));
  out.add_verdict("reduced-x3-x2", "[X3,X2] = (E2 - E1 X2(H)) X1 - E1 X1(H) X2",
                  fields_equal(lie_bracket(x3, x2), (c.require("E2") - e1 * b) * x1 - e1 * a * x2,
                               policy, bindings));
  VectorField hx3 = lie_bracket(xh, x3);
  SpanVerdict span = verify_in_span(hx3, {xh, x3}, policy, bindings);
  CheckItem& item = out.add_verdict("xh-x3-span", "[X_H,X3] in span{X_H, X3}", span.verdict);
  if (span.rank_deficient_points > 0) {
    item.note = std::to_string(span.rank_deficient_points) + " rank-deficient sample points";
  }
  out.add_verdict("xh-x3-coefficients", "[X_H,X3] = A1 X_H + A2 X3",
                  fields_equal(hx3, c.require("A1") * xh + c.require("A2") * x3, policy,
                               bindings));
  out.add_verdict("xh-x1", "[X_H,X1] = -C2 X1 + B2 X2",
                  fields_equal(lie_bracket(xh, x1), -c.require("C2") * x1 + c.require("B2") * x2,
                               policy, bindings));
  out.add_verdict("xh-x2", "[X_H,X2] = C1 X1 + C2 X2",
                  fields_equal(lie_bracket(xh, x2), c.require("C1") * x1 + c.require("C2") * x2,
                               policy, bindings));
  return out;
}

CheckReport check_delta_algebra(const VectorField& x1, const VectorField& x2,
                                const VectorField& x3, const ZeroPolicy& policy,
                                const FnBindings& bindings) {
  require_same_chart(*x1.chart(), *x2.chart());
  require_same_chart(*x1.chart(), *x3.chart());
  CheckReport out;
  out.add_verdict("x1-x2", "[X1,X2] = 0",
                  vector_field_is_zero(lie_bracket(x1, x2), policy, bindings));
  out.add_verdict("x3-x1", "[X3,X1] = X1 - X2",
                  fields_equal(lie_bracket(x3, x1), x1 - x2, policy, bindings));
  out.add_verdict("x3-x2", "[X3,X2] = 0",
                  vector_field_is_zero(lie_bracket(x3, x2), policy, bindings));

  double min_ratio = std::numeric_limits<double>::infinity();
  const VectorField* fields[] = {&x1, &x2, &x3};
  for_each_sample(*x1.chart(), policy, [&](std::span<const double> p) {
    Eigen::MatrixXd v(3, static_cast<Eigen::Index>(x1.dim()));
    for (Eigen::Index r = 0; r < 3; ++r) {
      v.row(r) = values_at(*fields[r], p, bindings).transpose();
    }
    Eigen::Matrix3d g = v * v.transpose();
    double diag = g(0, 0) * g(1, 1) * g(2, 2);
    double ratio = diag > 0.0 ? std::max(0.0, g.determinant() / diag) : 0.0;
    min_ratio = std::min(min_ratio, ratio);
  });
  out.add_flag("independence", "X1, X2, X3 pointwise linearly independent",
               min_ratio > policy.tolerance, min_ratio, false)
      .note = "minimum normalized Gram determinant over the samples";
  return out;
}

HamiltonianCondition check_hamiltonian_condition(const VectorField& x1, const VectorField& x2,
                                                 const Expr& h, const ZeroPolicy& policy,
                                                 const FnBindings& bindings) {
  require_same_chart(*x1.chart(), *x2.chart());
  Expr x1x2 = apply(x1, apply(x2, h));
  Expr x2x1 = apply(x2, apply(x1, h));
  return {decide_zero(x1x2, *x1.chart(), policy, bindings),
          decide_zero(x1x2 + x2x1, *x1.chart(), policy, bindings)};
}

Expr build_separable_hamiltonian(const Expr& xi1, const Expr& xi2, const std::string& i1,
                                 const std::string& i2, const VectorField& x1,
                                 const VectorField& x2, const ZeroPolicy& policy,
                                 const FnBindings& bindings) {
  require_same_chart(*x1.chart(), *x2.chart());
  ZeroVerdict v1 = decide_zero(apply(x1, xi1), *x1.chart(), policy, bindings);
  if (!v1.is_zero()) {
    throw PreconditionError("xi1 is not invariant under X1 (witness " + point_text(v1.witness) +
                            ")");
  }
  ZeroVerdict v2 = decide_zero(apply(x2, xi2), *x1.chart(), policy, bindings);
  if (!v2.is_zero()) {
    throw PreconditionError("xi2 is not invariant under X2 (witness " + point_text(v2.witness) +
                            ")");
  }
  return Expr::opaque(i1, xi1) + Expr::opaque(i2, xi2);
}

QbhSystem assemble_qbh(const VectorField& x1, const VectorField& x2, const VectorField& x3,
                       const Expr& h, const Expr& f, const ZeroPolicy& policy,
                       const FnBindings& bindings) {
  require_same_chart(*x1.chart(), *x2.chart());
  require_same_chart(*x1.chart(), *x3.chart());
  const ChartPtr& chart = x1.chart();
  require_in_chart(h, *chart);
  require_in_chart(f, *chart);

  PoissonCandidate j1(wedge(x1, x2));
  VectorField xh = hamiltonian_vector_field(j1, h);
  PoissonCandidate j2(wedge(xh, x3));
  Multivector p = j1.bivector() + j2.bivector();
  Expr rho = -apply(x3, f);
  VectorField xf = hamiltonian_vector_field(j2, f);

  CheckReport audit;
  CheckReport delta = check_delta_algebra(x1, x2, x3, policy, bindings);
  {
    std::string failed;
    for (const auto& item : delta.items()) {
      if (item.gating && !item.passed) failed += (failed.empty() ? "" : ", ") + item.id;
    }
    CheckItem& it = audit.add_verdict("delta", "Delta algebra relations",
                                      delta.worst_verdict());
    if (!failed.empty()) it.note = "failing: " + failed;
  }
  {
    const CheckItem& ind = delta.at("independence");
    audit.add_flag("independence", ind.label, ind.passed, ind.value, false).note = ind.note;
  }
  HamiltonianCondition hc = check_hamiltonian_condition(x1, x2, h, policy, bindings);
  audit.add_verdict("hamiltonian-condition", "X1 X2 (H) = 0", hc.condition);
  audit.add_verdict("symmetrized", "(X1 X2 + X2 X1)(H) = 0", hc.symmetrized, false);
  j1 = verify_poisson(j1, policy, bindings);
  j2 = verify_poisson(j2, policy, bindings);
  audit.add_verdict("jacobi-J1", "[J1,J1] = 0", *j1.verified());
  audit.add_verdict("jacobi-J2", "[J2,J2] = 0", *j2.verified());
  audit.add_verdict("compatibility", "[J1,J2] = 0",
                    check_compatibility(j1, j2, policy, bindings));
  audit.add_verdict("automorphism", "L_{X_H} J1 = 0",
                    check_infinitesimal_automorphism(xh, j1, policy, bindings));
  audit.add_verdict("first-integral", "{H,F} = 0",
                    check_first_integral(j1, h, f, policy, bindings));
  audit.add_verdict("casimir", "dF _| J1 = 0", check_casimir(j1, f, policy, bindings), false);
  audit.add_verdict("scaled-hamiltonian", "dF _| J2 = rho X_H",
                    fields_equal(xf, rho * xh, policy, bindings));
  {
    auto [min_rho, where] = sampled_minimum(rho, *chart, policy, bindings);
    CheckItem& it = audit.add_flag("rho-nonvanishing", "rho = -X3(F) does not vanish",
                                   min_rho > policy.tolerance, min_rho);
    it.note = "minimum |rho| over the samples, attained at " + point_text(where);
  }
  audit.add_verdict("jacobi-P", "[P,P] = 0 for P = J1 + J2",
                    check_jacobi_identity(PoissonCandidate(p), policy, bindings));

  return QbhSystem{chart, x1, x2, x3, h, f, xh, rho, j1, j2, p, xf, std::move(audit)};
}

CheckReport check_hojman_case(const VectorField& x1, const VectorField& x3, const Expr& h,
                              const ZeroPolicy& policy, const FnBindings& bindings) {
  require_same_chart(*x1.chart(), *x3.chart());
  const Chart& chart = *x1.chart();
  CheckReport out;
  out.add_verdict("conserved", "X1(H) = 0", decide_zero(apply(x1, h), chart, policy, bindings));
  out.add_verdict("symmetry", "[X3,X1] = X1",
                  fields_equal(lie_bracket(x3, x1), x1, policy, bindings));
  Expr rho = apply(x3, h);
  out.add_verdict("rho-constant", "X1(rho) = 0 for rho = X3(H)",
                  decide_zero(apply(x1, rho), chart, policy, bindings));

  Multivector contracted = interior_product(differential(x1.chart(), h), wedge(x1, x3));
  VectorField xh = contracted.to_vector_field();
  bool plus = fields_equal(xh, rho * x1, policy, bindings).is_zero();
  bool minus = fields_equal(xh, -(rho * x1), policy, bindings).is_zero();
  double sign = plus && minus ? 0.0 : (plus ? 1.0 : (minus ? -1.0 : 0.0));
  CheckItem& it = out.add_flag("contraction-sign", "dH _| (X1^X3) = s rho X1", plus || minus,
                               sign, false);
  if (plus && minus) {
    it.note = "rho X1 vanishes; sign undetermined";
  } else if (plus || minus) {
    it.note = plus ? "s = +1" : "s = -1";
  } else {
    it.note = "neither sign matches";
  }
  return out;
}

CheckReport check_bihamiltonian_2d(const VectorField& x3, const Expr& h, const Expr& f,
                                   const PoissonCandidate& j, const ZeroPolicy& policy,
                                   const FnBindings& bindings) {
  require_same_chart(*x3.chart(), *j.chart());
  CheckReport out;
  out.add_verdict("x3-dF", "X3(F) + 1 = 0",
                  decide_zero(apply(x3, f) + Expr(1), *x3.chart(), policy, bindings));
  out.add_verdict("first-integral", "{H,F} = 0",
                  check_first_integral(j, h, f, policy, bindings));
  return out;
}

}  // namespace qbhkit
