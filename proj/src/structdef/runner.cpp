#include "qbhkit/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "qbhkit/errors.hpp"
#include "qbhkit/jacobi.hpp"
#include "qbhkit/qbh.hpp"

namespace qbhkit {
namespace {

CheckReport single(const std::string& id, const std::string& label, ZeroVerdict v) {
  CheckReport out;
  out.add_verdict(id, label, std::move(v));
  return out;
}

CheckReport evaluate_check(const StructureDefinition& def, const CheckSpec& spec,
                           const ZeroPolicy& policy) {
  const CheckArgs& a = spec.args;
  const FnBindings& b = def.bindings;
  const std::string& k = spec.kind;

  if (k == "jacobi") {
    return single(k, "[J,J] = 0",
                  check_jacobi_identity(PoissonCandidate(a.tensor("tensor")), policy, b));
  }
  if (k == "compat") {
    return single(k, "[J1,J2] = 0",
                  check_compatibility(PoissonCandidate(a.tensor("tensor1")),
                                      PoissonCandidate(a.tensor("tensor2")), policy, b));
  }
  if (k == "automorphism") {
    return single(k, "L_X J = 0",
                  check_infinitesimal_automorphism(
                      a.field("field"), PoissonCandidate(a.tensor("tensor")), policy, b));
  }
  if (k == "bracket-span") {
    std::optional<std::vector<Expr>> coeffs;
    if (auto it = a.scalar_lists.find("coeffs"); it != a.scalar_lists.end()) {
      coeffs = it->second;
    }
    SpanVerdict sv = verify_span_closure(a.field("x"), a.field("y"), a.field_lists.at("basis"),
                                         coeffs, policy, b);
    CheckReport out;
    CheckItem& it = out.add_verdict(k, coeffs ? "[x,y] = sum coeffs_i basis_i"
                                              : "[x,y] in span(basis)",
                                    sv.verdict);
    if (sv.rank_deficient_points > 0) {
      it.note = std::to_string(sv.rank_deficient_points) + " rank-deficient sample points";
    }
    return out;
  }
  if (k == "delta") {
    return check_delta_algebra(a.field("X1"), a.field("X2"), a.field("X3"), policy, b);
  }
  if (k == "hamiltonian-pde") {
    HamiltonianCondition hc =
        check_hamiltonian_condition(a.field("X1"), a.field("X2"), a.scalar("H"), policy, b);
    CheckReport out;
    out.add_verdict(k, "X1 X2 (H) = 0", hc.condition);
    out.add_verdict("symmetrized", "(X1 X2 + X2 X1)(H) = 0", hc.symmetrized, false);
    return out;
  }
  if (k == "lemma4") {
    const VectorField& x1 = a.field("X1");
    const VectorField& x2 = a.field("X2");
    const Expr& h = a.scalar("H");
    Lemma4Free free = delta_free_coefficients(x1, x2, h);
    auto pick = [&](const char* name, Expr& slot) {
      if (auto it = a.scalars.find(name); it != a.scalars.end()) slot = it->second;
    };
    pick("N1", free.N1);
    pick("D1", free.D1);
    pick("D2", free.D2);
    pick("E1", free.E1);
    pick("E2", free.E2);
    StructureCoefficients c =
        compute_lemma4_coefficients(x1, x2, a.field("X3"), h, free, policy, b);
    return verify_lemma4_reduction(x1, x2, a.field("X3"), h, c, policy, b);
  }
  if (k == "theorem1") {
    StructureCoefficients c;
    for (auto name : StructureCoefficients::names) c.slot(name) = a.scalar(name);
    return verify_theorem1(a.field("X1"), a.field("X2"), a.field("X3"), a.field("XH"), c,
                           policy, b)
        .report();
  }
  if (k == "qbh") {
    return assemble_qbh(a.field("X1"), a.field("X2"), a.field("X3"), a.scalar("H"),
                        a.scalar("F"), policy, b)
        .audit;
  }
  if (k == "hojman") {
    return check_hojman_case(a.field("X1"), a.field("X3"), a.scalar("H"), policy, b);
  }
  if (k == "bih2d") {
    return check_bihamiltonian_2d(a.field("X3"), a.scalar("H"), a.scalar("F"),
                                  PoissonCandidate(a.tensor("tensor")), policy, b);
  }
  if (k == "jacobi-structure") {
    return check_jacobi_structure(a.tensor("tensor"), a.field("E"), policy, b);
  }
  if (k == "theorem3") {
    return check_theorem3(a.field("X1"), a.field("X2"), a.field("XH"), a.scalar("A"),
                          a.scalar("B"), a.scalar("C"), policy, b);
  }
  if (k == "field-pde") {
    const VectorField& d = a.field("field");
    long order = a.integers.contains("order") ? a.integers.at("order") : 1;
    Expr lhs = a.scalar("of");
    for (long n = 0; n < order; ++n) lhs = apply(d, lhs);
    require_in_chart(lhs, *def.chart);
    return single(k, "D^" + std::to_string(order) + "(of) = rhs",
                  decide_zero(lhs - a.scalar("rhs"), *def.chart, policy, b));
  }
  throw ValidationError("unknown check kind '" + k + "'");
}

std::string classify(const CheckReport& report, const std::vector<std::string>& failing) {
  if (!failing.empty()) {
    for (const auto& item : report.items()) {
      if (item.gating && !item.passed && item.verdict) return "nonzero";
    }
    return "fail";
  }
  bool any_verdict = false;
  for (const auto& item : report.items()) any_verdict |= item.gating && item.verdict.has_value();
  if (!any_verdict) return "pass";
  return report.worst_verdict().kind == ZeroKind::ExactZero ? "exact" : "numeric";
}

bool expectation_holds(const std::string& expected, const std::string& verdict) {
  if (expected == "pass") return verdict == "exact" || verdict == "numeric" || verdict == "pass";
  if (expected == "fail") return verdict == "nonzero" || verdict == "fail";
  return expected == verdict;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out.empty() ? "none" : out;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json point_or_null(const std::vector<double>& p) {
  if (p.empty()) return nullptr;
  Json out = Json::array();
  for (double v : p) out.push_back(number_or_null(v));
  return out;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

bool RunReport::all_matched() const {
  return skipped == 0 &&
         std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.matched; });
}

CheckOutcome run_check(const StructureDefinition& def, const CheckSpec& spec,
                       const ZeroPolicy& policy) {
  CheckOutcome out;
  out.id = spec.id;
  out.kind = spec.kind;
  out.label = spec.label;
  out.expected = spec.expect;
  out.expected_failures = spec.expect_fail;

  const auto start = std::chrono::steady_clock::now();
  try {
    out.report = evaluate_check(def, spec, policy);
  } catch (const Error& e) {
    out.error = e.what();
  }
  out.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();

  if (!out.error.empty()) {
    out.verdict = "error";
    out.matched = spec.expect == "error";
    if (!out.matched) out.mismatch = "error: " + out.error;
    return out;
  }

  for (const auto& item : out.report.items()) {
    if (item.gating && !item.passed) out.failing.push_back(item.id);
  }
  out.passed = out.failing.empty();
  out.verdict = classify(out.report, out.failing);
  out.matched = expectation_holds(spec.expect, out.verdict);
  if (!out.matched) {
    out.mismatch = "expected " + spec.expect + ", got " + out.verdict;
  }
  if (out.matched && !spec.expect_fail.empty()) {
    std::set<std::string> want(spec.expect_fail.begin(), spec.expect_fail.end());
    std::set<std::string> got(out.failing.begin(), out.failing.end());
    if (want != got) {
      out.matched = false;
      out.mismatch =
          "expected failing items {" + join(spec.expect_fail) + "}, got {" + join(out.failing) + "}";
    }
  }
  return out;
}

RunReport run_definition(const StructureDefinition& def, const RunOptions& options) {
  RunReport report;
  report.definition = def.name;
  report.policy = options.policy;
  for (std::size_t n = 0; n < def.checks.size(); ++n) {
    report.checks.push_back(run_check(def, def.checks[n], options.policy));
    if (options.fail_fast && !report.checks.back().matched) {
      report.skipped = def.checks.size() - n - 1;
      break;
    }
  }
  return report;
}

Json to_json(const RunReport& report) {
  Json doc = Json::object();
  doc["version"] = {{"tool", kToolVersion}, {"schema", kReportSchemaVersion}};
  doc["policy"] = {{"tolerance", number_or_null(report.policy.tolerance)},
                   {"samples", report.policy.sample_count},
                   {"seed", report.policy.seed}};
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    Json items = Json::array();
    double max_residual = 0.0;
    bool any_residual = false;
    std::vector<double> witness;
    double worst = -1.0;
    for (const auto& item : c.report.items()) {
      Json j = Json::object();
      j["id"] = item.id;
      j["label"] = item.label;
      j["gating"] = item.gating;
      j["passed"] = item.passed;
      j["verdict"] = std::string(to_string(item.verdict_class()));
      if (item.verdict) {
        j["residual"] = number_or_null(item.verdict->residual);
        j["samples"] = item.verdict->samples;
        j["witness"] = point_or_null(item.verdict->witness);
        if (item.gating) {
          any_residual = true;
          max_residual = std::max(max_residual, item.verdict->residual);
          if (!item.verdict->is_zero() && item.verdict->residual > worst) {
            worst = item.verdict->residual;
            witness = item.verdict->witness;
          }
        }
      } else {
        j["residual"] = nullptr;
        j["samples"] = nullptr;
        j["witness"] = nullptr;
      }
      j["value"] = item.value ? number_or_null(*item.value) : Json(nullptr);
      j["note"] = item.note;
      items.push_back(std::move(j));
    }
    Json jc = Json::object();
    jc["id"] = c.id;
    jc["kind"] = c.kind;
    jc["label"] = c.label;
    jc["verdict"] = c.verdict;
    jc["passed"] = c.passed;
    jc["expected"] = c.expected;
    jc["expected_failures"] = c.expected_failures;
    jc["failing"] = c.failing;
    jc["matched"] = c.matched;
    jc["mismatch"] = c.mismatch;
    jc["error"] = c.error.empty() ? Json(nullptr) : Json(c.error);
    jc["max_residual"] = any_residual ? number_or_null(max_residual) : Json(nullptr);
    jc["witness"] = point_or_null(witness);
    jc["wall_time_ms"] = number_or_null(c.wall_time_ms);
    jc["items"] = std::move(items);
    checks.push_back(std::move(jc));
  }
  doc["checks"] = std::move(checks);
  std::size_t matched = 0;
  for (const auto& c : report.checks) matched += c.matched ? 1 : 0;
  doc["overall"] = {{"status", report.all_matched() ? "pass" : "fail"},
                    {"definition", report.definition},
                    {"checks", report.checks.size() + report.skipped},
                    {"matched", matched},
                    {"skipped", report.skipped}};
  return doc;
}

std::string render_text(const RunReport& report) {
  std::ostringstream os;
  os << "qbhkit " << kToolVersion << "  " << report.definition << "  (tol "
     << fmt("%g", report.policy.tolerance) << ", samples " << report.policy.sample_count
     << ", seed " << report.policy.seed << ")\n\n";
  std::size_t matched = 0;
  for (const auto& c : report.checks) {
    matched += c.matched ? 1 : 0;
    char head[256];
    std::snprintf(head, sizeof head, "%-8s %-26s %-16s %-8s expected %s", c.matched ? "ok" : "MISMATCH",
                  c.id.c_str(), c.kind.c_str(), c.verdict.c_str(), c.expected.c_str());
    os << head;
    if (!c.expected_failures.empty()) os << " (failing: " << join(c.expected_failures) << ")";
    os << "\n";
    if (!c.error.empty()) os << "         error: " << c.error << "\n";
    for (const auto& item : c.report.items()) {
      std::string residual = item.verdict ? fmt("%.2e", item.verdict->residual)
                             : item.value ? fmt("%.4g", *item.value)
                                          : std::string("-");
      char line[256];
      std::snprintf(line, sizeof line, "         %-26s %-8s %-10s %s%s", item.id.c_str(),
                    std::string(to_string(item.verdict_class())).c_str(), residual.c_str(),
                    item.label.c_str(), item.gating ? "" : "  [info]");
      os << line << "\n";
      if (!item.note.empty()) os << "           " << item.note << "\n";
    }
    if (!c.matched) os << "         mismatch: " << c.mismatch << "\n";
  }
  os << "\noverall: " << (report.all_matched() ? "pass" : "fail") << " (" << matched << "/"
     << report.checks.size() + report.skipped << " checks matched";
  if (report.skipped > 0) os << ", " << report.skipped << " skipped";
  os << ")\n";
  return os.str();
}

}  // namespace qbhkit
