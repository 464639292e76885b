#pragma once

// Exact symbolic scalar expressions over the coordinates of a chart.
//
// An `Expr` is an immutable tree shared by reference counting. Arithmetic
// through the free functions and operators below keeps trees in a canonical
// shape: constants folded, sums and products flattened, like terms and like
// factors merged, product factors sorted. `raw_*` constructors only flatten.

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qbhkit/errors.hpp"

namespace qbhkit {

using Rational = boost::multiprecision::cpp_rational;

enum class Fn { Sin, Cos, Exp, Ln, Atan, Sqrt };

std::string_view fn_name(Fn fn);
std::optional<Fn> fn_from_name(std::string_view name);

enum class NodeKind { Const, Var, Param, Sum, Product, Power, Func, Opaque };

struct Node;

class Expr {
 public:
  /// The constant zero.
  Expr();
  Expr(int value);  // NOLINT(google-explicit-constructor)
  Expr(const Rational& value);  // NOLINT(google-explicit-constructor)

  static Expr var(std::size_t index);
  static Expr param(std::string name);
  static Expr func(Fn fn, Expr arg);
  /// Opaque function symbol `name` applied to `arg`, differentiated `order` times.
  static Expr opaque(std::string name, Expr arg, int order = 0);

  static Expr raw_sum(std::vector<Expr> terms);
  static Expr raw_product(std::vector<Expr> factors);
  static Expr raw_power(Expr base, long exponent);

  NodeKind kind() const;
  const Node& node() const { return *node_; }

  bool is_constant() const { return kind() == NodeKind::Const; }
  bool is_zero() const;
  bool is_one() const;
  const Rational& constant() const;
  std::size_t var_index() const;
  /// Parameter or opaque symbol name.
  const std::string& name() const;
  /// Terms of a sum, factors of a product, or the single argument of a
  /// power base, function or opaque application.
  const std::vector<Expr>& operands() const;
  long exponent() const;
  Fn fn() const;
  int order() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

struct Node {
  NodeKind kind = NodeKind::Const;
  Rational value;
  std::size_t index = 0;
  std::string name;
  std::vector<Expr> args;
  long exponent = 0;
  Fn fn = Fn::Sin;
  int order = 0;
};

/// Total structural order, used to sort product factors.
std::strong_ordering compare(const Expr& a, const Expr& b);

Expr add(std::vector<Expr> terms);
Expr mul(std::vector<Expr> factors);
Expr pow(const Expr& base, long exponent);
Expr apply_fn(Fn fn, const Expr& arg);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);

/// Constant folding, 0/1 absorption and flattening applied bottom-up.
Expr simplify_basic(const Expr& e);

struct ExprSymbols {
  std::set<std::size_t> vars;
  std::set<std::string> params;
  std::set<std::string> opaque;
};

ExprSymbols collect_symbols(const Expr& e);

// ---------------------------------------------------------------------------
// Charts

struct Interval {
  double lo = -1.0;
  double hi = 1.0;
};

/// Coordinate chart: named coordinates, a sampling box and guard
/// inequalities `g(x) > 0` that exclude singular loci from sampling.
class Chart {
 public:
  explicit Chart(std::vector<std::string> names, std::vector<Interval> box = {},
                 std::vector<Expr> guards = {});

  std::size_t dim() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Interval>& box() const { return box_; }
  const std::vector<Expr>& guards() const { return guards_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  /// Same coordinate names in the same order.
  bool same_coordinates(const Chart& other) const { return names_ == other.names_; }

  bool satisfies_guards(std::span<const double> point) const;

 private:
  std::vector<std::string> names_;
  std::vector<Interval> box_;
  std::vector<Expr> guards_;
};

using ChartPtr = std::shared_ptr<const Chart>;

/// Builds a chart, parsing each guard text against the coordinates.
ChartPtr make_chart(std::vector<std::string> names, std::vector<Interval> box = {},
                    const std::vector<std::string>& guards = {});

/// Throws ChartMismatch if `e` uses a variable index outside `chart`.
void require_in_chart(const Expr& e, const Chart& chart);

// ---------------------------------------------------------------------------
// Parsing and printing

/// Identifiers known to the parser besides the chart coordinates.
struct ParseScope {
  std::vector<std::string> params;
  std::vector<std::string> opaque;
  /// Identifiers that expand to a previously built expression.
  std::map<std::string, Expr, std::less<>> named;
};

/// Parses `text` and returns its canonical (simplified) tree.
///
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-' factor | base ('^' integer)?
///   base   := number | identifier | function '(' expr ')' | '(' expr ')'
///
/// The exponent may be written `^-2` or `^(-2)`. Numbers are decimal
/// literals and are converted to exact rationals. Opaque symbols may carry
/// primes, as in `f''(x1)`.
Expr parse_expr(std::string_view text, const Chart& chart, const ParseScope& scope = {});

std::string print(const Expr& e, const std::vector<std::string>& names);
inline std::string print(const Expr& e, const Chart& chart) { return print(e, chart.names()); }

// ---------------------------------------------------------------------------
// Differentiation and evaluation

/// Exact partial derivative with respect to coordinate `index`.
Expr differentiate(const Expr& e, std::size_t index);
Expr differentiate(const Expr& e, const Chart& chart, std::string_view coordinate);

/// Numeric interpretation of an opaque symbol: value and derivatives.
class OpaqueFunction {
 public:
  using Impl = std::function<double(int order, double x)>;

  OpaqueFunction(std::string description, int max_order, Impl impl);

  double operator()(int order, double x) const;
  const std::string& description() const { return description_; }
  int max_order() const { return max_order_; }

  static OpaqueFunction identity();
  static OpaqueFunction square();
  static OpaqueFunction sine();
  static OpaqueFunction constant(double c);
  /// One of `identity`, `square`, `sin`, `const(c)`.
  static OpaqueFunction from_selector(std::string_view selector);

 private:
  std::string description_;
  int max_order_;
  Impl impl_;
};

struct FnBindings {
  std::map<std::string, OpaqueFunction, std::less<>> functions;
  std::map<std::string, double, std::less<>> params;
};

/// Evaluates `e` at `point`, which must have the chart's dimension and
/// satisfy every chart guard.
double evaluate(const Expr& e, const Chart& chart, std::span<const double> point,
                const FnBindings& bindings = {});

/// Evaluation without the dimension and guard checks.
double evaluate_unchecked(const Expr& e, std::span<const double> point,
                          const FnBindings& bindings = {});

// ---------------------------------------------------------------------------
// Polynomial normal form

class Polynomial {
 public:
  /// Exponent per variable index, trailing zeros trimmed.
  using Monomial = std::vector<unsigned>;

  Polynomial() = default;
  explicit Polynomial(const Rational& c);
  static Polynomial variable(std::size_t index);

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Polynomial& operator+=(const Polynomial& other);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) = default;

  double evaluate(std::span<const double> point) const;
  /// Graded order, highest degree first.
  std::string str(const std::vector<std::string>& names) const;

 private:
  std::map<Monomial, Rational> terms_;
};

/// Expanded polynomial if `e` is built only from rationals, variables, sums,
/// products and nonnegative integer powers.
std::optional<Polynomial> polynomial_normal_form(const Expr& e);

// ---------------------------------------------------------------------------
// Zero decision

struct ZeroPolicy {
  double tolerance = 1e-9;
  std::size_t sample_count = 200;
  std::uint64_t seed = 42;
};

enum class ZeroKind { ExactZero, NumericallyZero, NonZero };

std::string_view to_string(ZeroKind kind);

struct ZeroVerdict {
  ZeroKind kind = ZeroKind::ExactZero;
  /// Largest normalized residual seen (at the witness for NonZero).
  double residual = 0.0;
  std::size_t samples = 0;
  std::vector<double> witness;

  bool is_zero() const { return kind != ZeroKind::NonZero; }

  static ZeroVerdict exact() { return {}; }
  static ZeroVerdict numeric(double residual, std::size_t samples);
  static ZeroVerdict nonzero(std::vector<double> witness, double residual, std::size_t samples);
};

/// Worst-case combination: NonZero dominates NumericallyZero dominates ExactZero.
ZeroVerdict merge_verdicts(std::span<const ZeroVerdict> verdicts);

/// |e(p)| / (1 + largest absolute additive term of e at p).
double normalized_residual(const Expr& e, std::span<const double> point,
                           const FnBindings& bindings = {});

/// Deterministic point `index` (retry `attempt`) inside the chart box.
std::vector<double> draw_point(const Chart& chart, std::uint64_t seed, std::size_t index,
                               std::size_t attempt);

/// Calls `visit` on `policy.sample_count` admissible points. A point is
/// rejected and redrawn when it violates a guard or `visit` throws
/// DomainError. Throws SamplingError when a point cannot be placed.
void for_each_sample(const Chart& chart, const ZeroPolicy& policy,
                     const std::function<void(std::span<const double>)>& visit);

ZeroVerdict decide_zero(const Expr& e, const Chart& chart, const ZeroPolicy& policy,
                        const FnBindings& bindings = {});

}  // namespace qbhkit
