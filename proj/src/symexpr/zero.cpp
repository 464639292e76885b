#include <algorithm>
#include <cmath>
#include <random>

#include "qbhkit/symexpr.hpp"

namespace qbhkit {

namespace {

constexpr std::size_t kMaxAttempts = 1000;

std::uint32_t lo32(std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffU); }
std::uint32_t hi32(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

int severity(ZeroKind k) {
  switch (k) {
    case ZeroKind::ExactZero: return 0;
    case ZeroKind::NumericallyZero: return 1;
    case ZeroKind::NonZero: return 2;
  }
  return 2;
}

}  // namespace

std::string_view to_string(ZeroKind kind) {
  switch (kind) {
    case ZeroKind::ExactZero: return "exact-zero";
    case ZeroKind::NumericallyZero: return "numerically-zero";
    case ZeroKind::NonZero: return "nonzero";
  }
  return "?";
}

ZeroVerdict ZeroVerdict::numeric(double residual, std::size_t samples) {
  ZeroVerdict v;
  v.kind = ZeroKind::NumericallyZero;
  v.residual = residual;
  v.samples = samples;
  return v;
}

ZeroVerdict ZeroVerdict::nonzero(std::vector<double> witness, double residual,
                                 std::size_t samples) {
  ZeroVerdict v;
  v.kind = ZeroKind::NonZero;
  v.residual = residual;
  v.samples = samples;
  v.witness = std::move(witness);
  return v;
}

ZeroVerdict merge_verdicts(std::span<const ZeroVerdict> verdicts) {
  ZeroVerdict out = ZeroVerdict::exact();
  for (const auto& v : verdicts) {
    int sv = severity(v.kind);
    int so = severity(out.kind);
    out.samples = std::max(out.samples, v.samples);
    if (sv > so || (sv == so && v.residual > out.residual)) {
      std::size_t samples = out.samples;
      out = v;
      out.samples = samples;
    }
  }
  return out;
}

double normalized_residual(const Expr& e, std::span<const double> point,
                           const FnBindings& bindings) {
  double value = 0.0;
  double scale = 0.0;
  if (e.kind() == NodeKind::Sum) {
    for (const auto& t : e.operands()) {
      double v = evaluate_unchecked(t, point, bindings);
      value += v;
      scale = std::max(scale, std::abs(v));
    }
  } else {
    value = evaluate_unchecked(e, point, bindings);
    scale = std::abs(value);
  }
  return std::abs(value) / (1.0 + scale);
}

std::vector<double> draw_point(const Chart& chart, std::uint64_t seed, std::size_t index,
                               std::size_t attempt) {
  std::seed_seq seq{lo32(seed), hi32(seed), lo32(index), hi32(index), lo32(attempt),
                    hi32(attempt)};
  std::mt19937_64 gen(seq);
  std::vector<double> p(chart.dim());
  for (std::size_t i = 0; i < p.size(); ++i) {
    double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    const Interval& iv = chart.box()[i];
    p[i] = iv.lo + u * (iv.hi - iv.lo);
  }
  return p;
}

void for_each_sample(const Chart& chart, const ZeroPolicy& policy,
                     const std::function<void(std::span<const double>)>& visit) {
  for (std::size_t i = 0; i < policy.sample_count; ++i) {
    bool placed = false;
    for (std::size_t attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      std::vector<double> p = draw_point(chart, policy.seed, i, attempt);
      if (!chart.satisfies_guards(p)) continue;
      try {
        visit(p);
        placed = true;
      } catch (const DomainError&) {
      }
    }
    if (!placed) {
      throw SamplingError("no admissible sample point found after " +
                          std::to_string(kMaxAttempts) + " attempts (sample " +
                          std::to_string(i) + ")");
    }
  }
}

ZeroVerdict decide_zero(const Expr& e, const Chart& chart, const ZeroPolicy& policy,
                        const FnBindings& bindings) {
  if (!(policy.tolerance > 0.0)) throw PreconditionError("tolerance must be positive");
  if (policy.sample_count < 1) throw PreconditionError("sample_count must be at least 1");
  require_in_chart(e, chart);

  auto pnf = polynomial_normal_form(e);
  if (pnf && pnf->is_zero()) return ZeroVerdict::exact();

  double worst = -1.0;
  std::vector<double> witness;
  for_each_sample(chart, policy, [&](std::span<const double> p) {
    double r = normalized_residual(e, p, bindings);
    if (r > worst) {
      worst = r;
      witness.assign(p.begin(), p.end());
    }
  });
  if (pnf || worst > policy.tolerance) {
    return ZeroVerdict::nonzero(std::move(witness), worst, policy.sample_count);
  }
  return ZeroVerdict::numeric(worst, policy.sample_count);
}

}  // namespace qbhkit
