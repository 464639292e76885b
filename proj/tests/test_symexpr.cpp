#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "support/oracles.hpp"

namespace qbhkit {
namespace {

using testing::central_difference;
using testing::random_polynomial;

class SymexprTest : public ::testing::Test {
 protected:
  ChartPtr chart = make_chart({"x1", "x2", "x3"});
  ParseScope scope{{"k"}, {"f", "g"}, {}};

  Expr parse(std::string_view text) const { return parse_expr(text, *chart, scope); }
  std::string show(const Expr& e) const { return print(e, *chart); }
};

TEST_F(SymexprTest, ParsesSumOfPowerAndVariable) {
  Expr e = parse("x1^2 + x2");
  ASSERT_EQ(e.kind(), NodeKind::Sum);
  ASSERT_EQ(e.operands().size(), 2u);
  EXPECT_EQ(e.operands()[0], pow(Expr::var(0), 2));
  EXPECT_EQ(e.operands()[1], Expr::var(1));
}

TEST_F(SymexprTest, ParsesAtanOfQuotient) {
  Expr e = parse("atan(x2/x1)");
  ASSERT_EQ(e.kind(), NodeKind::Func);
  EXPECT_EQ(e.fn(), Fn::Atan);
  EXPECT_EQ(e.operands()[0], Expr::var(1) * pow(Expr::var(0), -1));
}

TEST_F(SymexprTest, EvaluatesProductOfSum) {
  std::vector<double> p{1, 2, 3};
  EXPECT_DOUBLE_EQ(evaluate(parse("x1*(x2+x3)"), *chart, p), 5.0);
}

TEST_F(SymexprTest, UnaryMinusBindsLooserThanPower) {
  std::vector<double> p{3, 0, 0};
  EXPECT_DOUBLE_EQ(evaluate(parse("-x1^2"), *chart, p), -9.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("2^-1*x1"), *chart, p), 1.5);
  EXPECT_DOUBLE_EQ(evaluate(parse("x1^(-2)"), *chart, p), 1.0 / 9.0);
}

TEST_F(SymexprTest, DecimalLiteralsAreExact) {
  Expr e = parse("0.6");
  ASSERT_TRUE(e.is_constant());
  EXPECT_EQ(e.constant(), Rational(3, 5));
  EXPECT_EQ(parse("3/6"), Expr(Rational(1, 2)));
}

TEST_F(SymexprTest, OpaqueSymbolsWithPrimes) {
  Expr e = parse("f''(x1^2)");
  ASSERT_EQ(e.kind(), NodeKind::Opaque);
  EXPECT_EQ(e.order(), 2);
  EXPECT_EQ(show(e), "f''(x1^2)");
}

TEST_F(SymexprTest, ParseErrorsCarryPosition) {
  try {
    parse("x1 + y");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 5u);
    EXPECT_NE(std::string(e.what()).find("unknown identifier 'y'"), std::string::npos);
  }
  EXPECT_THROW(parse("x1 +"), ParseError);
  EXPECT_THROW(parse("(x1"), ParseError);
  EXPECT_THROW(parse("x1 x2"), ParseError);
  EXPECT_THROW(parse("x1^x2"), ParseError);
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("sin x1"), ParseError);
  EXPECT_THROW(parse("x1/0"), ParseError);
}

TEST_F(SymexprTest, SimplifyBasicExamples) {
  Expr x1 = Expr::var(0);
  Expr x2 = Expr::var(1);
  Expr raw = Expr::raw_sum({Expr::raw_product({Expr(0), x1}), x2});
  EXPECT_EQ(simplify_basic(raw), x2);
  EXPECT_EQ(simplify_basic(Expr::raw_power(x1, 1)), x1);
  EXPECT_EQ(simplify_basic(Expr::raw_sum({Expr(2), Expr(3)})), Expr(5));
}

TEST_F(SymexprTest, DifferentiatesMonomial) {
  Expr d = differentiate(parse("x1^2*x2"), *chart, "x1");
  EXPECT_EQ(d, parse("2*x1*x2"));
}

TEST_F(SymexprTest, DifferentiatesAtanAgainstClosedForm) {
  Expr d = differentiate(parse("atan(x2/x1)"), 0);
  Expr expected = parse("-x2/(x1^2+x2^2)");
  ZeroPolicy policy;
  auto guarded = make_chart({"x1", "x2", "x3"}, {{0.6, 2}, {-2, 2}, {-2, 2}}, {"x1"});
  ZeroVerdict v = decide_zero(d - expected, *guarded, policy);
  EXPECT_TRUE(v.is_zero()) << v.residual;

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.6, 2.0);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> p{u(rng), u(rng) - 1.3, u(rng)};
    EXPECT_NEAR(evaluate_unchecked(d, p), central_difference(parse("atan(x2/x1)"), 0, p), 1e-6);
  }
}

TEST_F(SymexprTest, ChainRuleThroughOpaque) {
  auto uchart = make_chart({"u", "v"});
  ParseScope s{{}, {"f"}, {}};
  Expr d = differentiate(parse_expr("f(u^2)", *uchart, s), 0);
  EXPECT_EQ(d, parse_expr("2*u*f'(u^2)", *uchart, s));
}

TEST_F(SymexprTest, EvaluationExamples) {
  std::vector<double> p{std::numbers::pi / 2, 0, 0};
  EXPECT_NEAR(evaluate(parse("sin(x1)"), *chart, p), 1.0, 1e-15);

  FnBindings b;
  b.functions.emplace("f", OpaqueFunction::square());
  std::vector<double> q{3, 0, 0};
  EXPECT_DOUBLE_EQ(evaluate(parse("f(x1)"), *chart, q, b), 9.0);

  std::vector<double> r{1, 1, 0};
  EXPECT_DOUBLE_EQ(evaluate(parse("-x2/(x1^2+x2^2)"), *chart, r), -0.5);
}

TEST_F(SymexprTest, EvaluationErrors) {
  std::vector<double> p{-1, 0, 0};
  EXPECT_THROW(evaluate(parse("ln(x1)"), *chart, p), DomainError);
  EXPECT_THROW(evaluate(parse("sqrt(x1)"), *chart, p), DomainError);
  EXPECT_THROW(evaluate(parse("x2^(-1)"), *chart, p), DomainError);
  EXPECT_THROW(evaluate(parse("f(x1)"), *chart, p), MissingBinding);
  EXPECT_THROW(evaluate(parse("k*x1"), *chart, p), MissingBinding);
  std::vector<double> short_point{1, 2};
  EXPECT_THROW(evaluate(parse("x1"), *chart, short_point), ChartMismatch);

  auto guarded = make_chart({"x1", "x2"}, {}, {"x1 - 1/2"});
  std::vector<double> bad{0.1, 0};
  EXPECT_THROW(evaluate(Expr::var(0), *guarded, bad), DomainError);
}

TEST_F(SymexprTest, ParamsEvaluateFromBindings) {
  FnBindings b;
  b.params["k"] = 2.5;
  std::vector<double> p{2, 0, 0};
  EXPECT_DOUBLE_EQ(evaluate(parse("k*x1"), *chart, p, b), 5.0);
}

TEST_F(SymexprTest, PolynomialNormalForm) {
  auto zero = polynomial_normal_form(parse("x1*(x1+x2) - x1^2 - x1*x2"));
  ASSERT_TRUE(zero);
  EXPECT_TRUE(zero->is_zero());
  EXPECT_FALSE(polynomial_normal_form(parse("sin(x1)")));
  auto sq = polynomial_normal_form(parse("(x1+x2)^2"));
  ASSERT_TRUE(sq);
  Polynomial expected = Polynomial::variable(0) * Polynomial::variable(0) +
                        Polynomial(2) * Polynomial::variable(0) * Polynomial::variable(1) +
                        Polynomial::variable(1) * Polynomial::variable(1);
  EXPECT_EQ(*sq, expected);
  EXPECT_EQ(sq->str(chart->names()), "x1^2 + 2*x1*x2 + x2^2");
  EXPECT_FALSE(polynomial_normal_form(parse("x1^(-1)")));
  EXPECT_FALSE(polynomial_normal_form(parse("k*x1")));
}

TEST_F(SymexprTest, DecideZeroExamples) {
  ZeroPolicy policy;
  EXPECT_EQ(decide_zero(parse("x1^2 - x1*x1"), *chart, policy).kind, ZeroKind::ExactZero);

  ZeroVerdict trig = decide_zero(parse("sin(x1)^2 + cos(x1)^2 - 1"), *chart, policy);
  EXPECT_EQ(trig.kind, ZeroKind::NumericallyZero);
  EXPECT_LT(trig.residual, 1e-12);
  EXPECT_EQ(trig.samples, 200u);

  ZeroVerdict diff = decide_zero(parse("x1 - x2"), *chart, policy);
  ASSERT_EQ(diff.kind, ZeroKind::NonZero);
  ASSERT_EQ(diff.witness.size(), 3u);
  EXPECT_GT(std::abs(diff.witness[0] - diff.witness[1]), 0.0);
}

TEST_F(SymexprTest, DecideZeroPreconditions) {
  ZeroPolicy bad;
  bad.tolerance = 0;
  EXPECT_THROW(decide_zero(parse("x1"), *chart, bad), PreconditionError);
  ZeroPolicy none;
  none.sample_count = 0;
  EXPECT_THROW(decide_zero(parse("x1"), *chart, none), PreconditionError);
}

TEST_F(SymexprTest, ImpossibleGuardsRaiseSamplingError) {
  auto chart2 = make_chart({"x1", "x2"}, {}, {"-1 - x1^2"});
  EXPECT_THROW(decide_zero(parse_expr("sin(x1)", *chart2), *chart2, ZeroPolicy{}), SamplingError);
}

TEST_F(SymexprTest, SamplingIsDeterministicAndRespectsGuards) {
  auto annulus = make_chart({"x1", "x2"}, {{-2, 2}, {-2, 2}}, {"x1^2 + x2^2 - 1"});
  auto a = testing::sample_points(*annulus, 50, 3);
  auto b = testing::sample_points(*annulus, 50, 3);
  EXPECT_EQ(a, b);
  for (const auto& p : a) EXPECT_GT(p[0] * p[0] + p[1] * p[1], 1.0);
  EXPECT_NE(a, testing::sample_points(*annulus, 50, 4));
}

TEST_F(SymexprTest, ChartInvariants) {
  EXPECT_THROW(make_chart({"x1"}), PreconditionError);
  EXPECT_THROW(make_chart({"x1", "x1"}), PreconditionError);
  EXPECT_THROW(make_chart({"x1", "x2"}, {}, {"x3"}), ParseError);
  EXPECT_THROW(require_in_chart(Expr::var(5), *chart), ChartMismatch);
}

TEST_F(SymexprTest, MergeVerdictsIsWorstCase) {
  std::vector<ZeroVerdict> v{ZeroVerdict::exact(), ZeroVerdict::numeric(1e-12, 200)};
  EXPECT_EQ(merge_verdicts(v).kind, ZeroKind::NumericallyZero);
  v.push_back(ZeroVerdict::nonzero({1, 2}, 0.5, 200));
  EXPECT_EQ(merge_verdicts(v).kind, ZeroKind::NonZero);
  EXPECT_EQ(merge_verdicts({}).kind, ZeroKind::ExactZero);
}

// Random expression trees built from every node kind except parameters.
Expr random_tree(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 7);
  std::uniform_int_distribution<int> small(-3, 3);
  std::uniform_int_distribution<std::size_t> var(0, 2);
  switch (pick(rng)) {
    case 0: return Expr(Rational(small(rng), 1 + std::abs(small(rng))));
    case 1: return Expr::var(var(rng));
    case 2: return Expr::raw_sum({random_tree(rng, depth - 1), random_tree(rng, depth - 1)});
    case 3:
      return Expr::raw_product({random_tree(rng, depth - 1), random_tree(rng, depth - 1)});
    case 4: {
      std::uniform_int_distribution<long> e(-2, 3);
      return Expr::raw_power(Expr::raw_sum({Expr(2), Expr::raw_power(random_tree(rng, depth - 1), 2)}),
                             e(rng));
    }
    case 5: {
      std::uniform_int_distribution<int> f(0, 3);
      const Fn fns[] = {Fn::Sin, Fn::Cos, Fn::Atan, Fn::Exp};
      return Expr::func(fns[f(rng)], random_tree(rng, depth - 1));
    }
    case 6:
      return Expr::opaque("f", random_tree(rng, depth - 1), static_cast<int>(var(rng)));
    default:
      return Expr::func(Fn::Ln, Expr::raw_sum({Expr(3), Expr::raw_power(random_tree(rng, depth - 1), 2)}));
  }
}

TEST_F(SymexprTest, DerivativeMatchesCentralDifferenceOnRandomTrees) {
  std::mt19937_64 rng(2024);
  FnBindings b;
  b.functions.emplace("f", OpaqueFunction::sine());
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  int checked = 0;
  for (int t = 0; t < 60; ++t) {
    Expr e = simplify_basic(random_tree(rng, 3));
    for (std::size_t v = 0; v < 3; ++v) {
      Expr d = differentiate(e, v);
      for (int k = 0; k < 5; ++k) {
        std::vector<double> p{u(rng), u(rng), u(rng)};
        double exact = evaluate_unchecked(d, p, b);
        double fd = central_difference(e, v, p, b);
        EXPECT_NEAR(exact, fd, 1e-6 * (1.0 + std::abs(exact))) << show(e) << " d/d" << v;
        ++checked;
      }
    }
  }
  EXPECT_EQ(checked, 900);
}

TEST_F(SymexprTest, SimplifyBasicPreservesValues) {
  std::mt19937_64 rng(99);
  FnBindings b;
  b.functions.emplace("f", OpaqueFunction::sine());
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (int t = 0; t < 60; ++t) {
    Expr raw = random_tree(rng, 3);
    Expr s = simplify_basic(raw);
    for (int k = 0; k < 100; ++k) {
      std::vector<double> p{u(rng), u(rng), u(rng)};
      double a = evaluate_unchecked(raw, p, b);
      double c = evaluate_unchecked(s, p, b);
      EXPECT_NEAR(a, c, 1e-12 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_F(SymexprTest, ParsePrintRoundTrip) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 300; ++t) {
    Expr raw = random_tree(rng, 4);
    Expr s = simplify_basic(raw);
    std::string text = show(s);
    Expr back = parse(text);
    EXPECT_EQ(back, s) << text << "  ->  " << show(back);
    EXPECT_EQ(show(back), text);
  }
}

TEST_F(SymexprTest, PolynomialZeroDecisionMatchesNormalForm) {
  std::mt19937_64 rng(17);
  ZeroPolicy policy;
  for (int t = 0; t < 50; ++t) {
    Expr p = random_polynomial(rng, 3, 3);
    Expr q = random_polynomial(rng, 3, 3);
    // (p + q)^2 - p^2 - 2pq - q^2 is identically zero.
    Expr zero = pow(p + q, 2) - pow(p, 2) - Expr(2) * p * q - pow(q, 2);
    EXPECT_EQ(decide_zero(zero, *chart, policy).kind, ZeroKind::ExactZero);
    Expr other = zero + Expr::var(0) * q;
    ZeroKind expected = polynomial_normal_form(Expr::var(0) * q)->is_zero()
                            ? ZeroKind::ExactZero
                            : ZeroKind::NonZero;
    EXPECT_EQ(decide_zero(other, *chart, policy).kind, expected);
  }
  // Not a polynomial: never certified exactly even when zero.
  EXPECT_NE(decide_zero(parse("sin(x1)^2 + cos(x1)^2 - 1"), *chart, policy).kind,
            ZeroKind::ExactZero);
}

TEST(OpaqueFunctionTest, Selectors) {
  EXPECT_DOUBLE_EQ(OpaqueFunction::from_selector("identity")(0, 3.0), 3.0);
  EXPECT_DOUBLE_EQ(OpaqueFunction::from_selector("square")(1, 3.0), 6.0);
  EXPECT_DOUBLE_EQ(OpaqueFunction::from_selector("sin")(2, 0.5), -std::sin(0.5));
  EXPECT_DOUBLE_EQ(OpaqueFunction::from_selector("const(2.5)")(0, 9.0), 2.5);
  EXPECT_DOUBLE_EQ(OpaqueFunction::from_selector("const(2.5)")(1, 9.0), 0.0);
  EXPECT_THROW(OpaqueFunction::from_selector("cube"), MissingBinding);
  EXPECT_THROW(OpaqueFunction::from_selector("const(x)"), MissingBinding);
}

}  // namespace
}  // namespace qbhkit
