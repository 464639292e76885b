#include <gtest/gtest.h>

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <map>

#include "qbhkit/fixtures.hpp"
#include "qbhkit/qbh.hpp"
#include "support/oracles.hpp"
#include "support/pinned.hpp"

namespace qbhkit {
namespace {

using testing::central_difference;
using testing::sample_points;

QbhSystem flagship_system(const Fixture& fx, const ZeroPolicy& policy) {
  return assemble_qbh(fx.field("X1").field, fx.field("X2").field, fx.field("X3").field,
                      fx.scalar("H").expr, fx.scalar("F").expr, policy, fx.bindings);
}

double eval_at(const Fixture& fx, const Expr& e, std::span<const double> p) {
  return evaluate(e, *fx.chart, p, fx.bindings);
}

TEST(Fixtures, SixBuiltinsAllMatch) {
  ASSERT_EQ(builtin_demos().size(), 6u);
  for (const auto& run : run_all_fixtures()) {
    EXPECT_TRUE(run.matched) << run.name << "\n" << render_text(run.report);
  }
}

TEST(Fixtures, TightToleranceIsReportedNotThrown) {
  ZeroPolicy tight;
  tight.tolerance = 1e-14;
  std::vector<FixtureRun> runs;
  ASSERT_NO_THROW(runs = run_all_fixtures(tight));
  EXPECT_EQ(runs.size(), 6u);
  for (const auto& run : runs) {
    for (const auto& c : run.report.checks) EXPECT_NE(c.verdict, "error") << run.name << " " << c.id;
  }
}

TEST(Fixtures, UnknownDemo) { EXPECT_THROW(find_demo("nope"), ValidationError); }

TEST(Flagship, AuditPassesForSeedsOneToFive) {
  Fixture fx = fixture_example2_derived();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ZeroPolicy policy;
    policy.seed = seed;
    QbhSystem sys = flagship_system(fx, policy);
    std::size_t gating = 0;
    for (const auto& item : sys.audit.items()) {
      if (!item.gating) continue;
      ++gating;
      EXPECT_TRUE(item.passed) << "seed " << seed << " " << item.id;
    }
    EXPECT_EQ(gating, 10u);
  }
}

// rho, X_H and X_F from their defining contractions, with directional
// derivatives taken by finite differences.
TEST(Flagship, ContractionOracle) {
  Fixture fx = fixture_example2_derived();
  QbhSystem sys = flagship_system(fx, ZeroPolicy{});
  const Expr& h = fx.scalar("H").expr;
  const Expr& f = fx.scalar("F").expr;
  auto directional = [&](const VectorField& v, const Expr& g, std::span<const double> p) {
    double s = 0;
    for (std::size_t i = 0; i < 3; ++i) s += eval_at(fx, v[i], p) * central_difference(g, i, p);
    return s;
  };
  const auto& x1 = sys.X1;
  const auto& x2 = sys.X2;
  const auto& x3 = sys.X3;
  for (const auto& p : sample_points(*fx.chart, 200, 3)) {
    const double r2 = p[0] * p[0] + p[1] * p[1];
    EXPECT_NEAR(eval_at(fx, sys.rho, p), -2 * r2, 1e-12);
    EXPECT_NEAR(-directional(x3, f, p), -2 * r2, 1e-8);
    // dH _| (X1^X2) = X1(H) X2 - X2(H) X1.
    const double a = directional(x1, h, p), b = directional(x2, h, p);
    double scale = 1, resid = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      const double want = a * eval_at(fx, x2[i], p) - b * eval_at(fx, x1[i], p);
      EXPECT_NEAR(eval_at(fx, sys.XH[i], p), want, 1e-8);
      const double xf = eval_at(fx, sys.XF[i], p);
      const double rxh = eval_at(fx, sys.rho, p) * eval_at(fx, sys.XH[i], p);
      resid = std::max(resid, std::abs(xf - rxh));
      scale = std::max({scale, std::abs(xf), std::abs(rxh)});
    }
    EXPECT_LT(resid / scale, 1e-9);
  }
  double min_rho = 1e300;
  for (const auto& p : sample_points(*fx.chart, 200, 42)) {
    min_rho = std::min(min_rho, std::abs(eval_at(fx, sys.rho, p)));
  }
  EXPECT_GE(min_rho, 0.72);
}

// In polar coordinates X1 = d_theta and X2 = d3, and the Delta relations
// for X3 = p_r d_r + p_theta d_theta + p3 d3 reduce to d_theta p_r = 0,
// d_theta p_theta = -1, d_theta p3 = 1. Convert the stored X3 to polar
// components and differentiate along theta numerically.
TEST(Flagship, PolarCharacteristicsOracle) {
  Fixture fx = fixture_example2_derived();
  const VectorField& x3 = fx.field("X3").field;
  auto polar = [&](double r, double th, double z) {
    const double p[3] = {r * std::cos(th), r * std::sin(th), z};
    const double v1 = eval_at(fx, x3[0], p), v2 = eval_at(fx, x3[1], p),
                 v3 = eval_at(fx, x3[2], p);
    return std::array<double, 3>{(p[0] * v1 + p[1] * v2) / r, (p[0] * v2 - p[1] * v1) / (r * r),
                                 v3};
  };
  const double h = 1e-5;
  for (double r : {0.8, 1.0, 1.5, 1.9}) {
    for (double th : {-0.9, -0.3, 0.0, 0.4, 1.0}) {
      for (double z : {-1.0, 0.5}) {
        auto plus = polar(r, th + h, z), minus = polar(r, th - h, z);
        EXPECT_NEAR((plus[0] - minus[0]) / (2 * h), 0.0, 1e-6);
        EXPECT_NEAR((plus[1] - minus[1]) / (2 * h), -1.0, 1e-6);
        EXPECT_NEAR((plus[2] - minus[2]) / (2 * h), 1.0, 1e-6);
        // The chosen integration functions: p_r = r, p_theta = -theta, p3 = theta.
        auto at = polar(r, th, z);
        EXPECT_NEAR(at[0], r, 1e-12);
        EXPECT_NEAR(at[1], -th, 1e-12);
        EXPECT_NEAR(at[2], th, 1e-12);
      }
    }
  }
}

TEST(Negative, FailureLocalized) {
  Fixture fx = fixture_negative_theorem2();
  QbhSystem sys = flagship_system(fx, ZeroPolicy{});
  const auto& j2 = sys.audit.at("jacobi-J2");
  ASSERT_TRUE(j2.verdict);
  EXPECT_EQ(j2.verdict->kind, ZeroKind::NonZero);
  EXPECT_GT(j2.verdict->residual, 0.1);
  for (auto id : {"delta", "hamiltonian-condition", "jacobi-J1", "compatibility", "automorphism",
                  "first-integral", "rho-nonvanishing"}) {
    EXPECT_TRUE(sys.audit.at(id).passed) << id;
  }
  const auto& x1 = fx.field("X1").field;
  const auto& x2 = fx.field("X2").field;
  const auto& x3 = fx.field("X3").field;
  const Expr& h = fx.scalar("H").expr;
  StructureCoefficients c = compute_lemma4_coefficients(
      x1, x2, x3, h, delta_free_coefficients(x1, x2, h), ZeroPolicy{}, fx.bindings);
  CheckReport red = verify_lemma4_reduction(x1, x2, x3, h, c, ZeroPolicy{}, fx.bindings);
  EXPECT_FALSE(red.at("xh-x3-span").passed);
  EXPECT_TRUE(red.at("xh-x1").passed);
  EXPECT_TRUE(red.at("xh-x2").passed);
}

// x1 P1' = P1 - x1 and x1 P2' = 1 integrated from x1 = 1, where both
// stored solutions vanish.
TEST(LinearAbelian, OdeOracle) {
  namespace ode = boost::numeric::odeint;
  Fixture fx = fixture_linear_abelian();
  using State = std::array<double, 2>;
  auto rhs = [](const State& p, State& dp, double x) {
    dp[0] = (p[0] - x) / x;
    dp[1] = 1.0 / x;
  };
  for (double target : {0.6, 0.75, 1.3, 1.7, 2.0}) {
    State p{0.0, 0.0};
    ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<State>>(1e-12, 1e-12),
                            rhs, p, 1.0, target, target > 1 ? 1e-3 : -1e-3);
    const double pt[2] = {target, 0.3};
    EXPECT_NEAR(eval_at(fx, fx.scalar("P1").expr, pt), p[0], 1e-9) << target;
    EXPECT_NEAR(eval_at(fx, fx.scalar("P2").expr, pt), p[1], 1e-9) << target;
  }
}

TEST(LinearAbelian, DeltaPassesAtTolerance) {
  Fixture fx = fixture_linear_abelian();
  CheckReport r = check_delta_algebra(fx.field("XA").field, fx.field("Xa").field,
                                      fx.field("X3").field, ZeroPolicy{}, fx.bindings);
  for (auto id : {"x1-x2", "x3-x1", "x3-x2"}) EXPECT_TRUE(r.at(id).passed) << id;
}

TEST(Published, PinnedVerdicts) {
  const auto& pinned = testing::pinned_published_verdicts();

  for (int run = 0; run < 2; ++run) {
    RunReport r = run_definition(fixture_example2_published());
    ASSERT_EQ(r.checks.size(), pinned.size());
    for (const auto& c : r.checks) {
      auto it = pinned.find(c.id);
      ASSERT_NE(it, pinned.end()) << c.id;
      EXPECT_EQ(c.verdict, it->second.first) << c.id;
      EXPECT_EQ(c.failing, it->second.second) << c.id;
    }
  }
}

// Every scalar and field component of every fixture, and their first
// partials, differentiated symbolically and by central differences.
TEST(Fixtures, DerivativeOracle) {
  for (const auto& demo : builtin_demos()) {
    Fixture fx = load_demo(demo.name);
    std::vector<Expr> exprs;
    for (const auto& s : fx.scalars) exprs.push_back(s.expr);
    for (const auto& f : fx.fields) {
      for (const auto& c : f.field.components()) exprs.push_back(c);
    }
    const std::size_t n = fx.chart->dim();
    const std::size_t base = exprs.size();
    for (std::size_t k = 0; k < base; ++k) {
      for (std::size_t i = 0; i < n; ++i) exprs.push_back(differentiate(exprs[k], i));
    }
    for (const auto& p : sample_points(*fx.chart, 20, 11)) {
      for (const auto& e : exprs) {
        for (std::size_t i = 0; i < n; ++i) {
          const double sym = eval_at(fx, differentiate(e, i), p);
          const double fd = central_difference(e, i, p, fx.bindings, 1e-5);
          EXPECT_NEAR(sym, fd, 1e-6 * std::max(1.0, std::abs(sym)))
              << demo.name << " " << print(e, *fx.chart) << " d" << i;
        }
      }
    }
  }
}

}  // namespace
}  // namespace qbhkit
