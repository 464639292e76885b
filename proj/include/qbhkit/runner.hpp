#pragma once

// Runs the checks of a structure definition and compares each outcome with
// its expectation.

#include <string>
#include <vector>

#include "qbhkit/structdef.hpp"

namespace qbhkit {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kReportSchemaVersion = 1;

struct RunOptions {
  ZeroPolicy policy;
  /// Stop after the first check whose outcome does not match.
  bool fail_fast = false;
};

struct CheckOutcome {
  std::string id;
  std::string kind;
  std::string label;
  std::string expected;
  std::vector<std::string> expected_failures;
  CheckReport report;
  /// exact | numeric | nonzero | pass | fail | error
  std::string verdict;
  /// All gating items hold.
  bool passed = false;
  /// Gating items that do not hold, in report order.
  std::vector<std::string> failing;
  bool matched = false;
  /// Why the outcome does not match; empty when matched.
  std::string mismatch;
  /// Message of an error raised while evaluating the check.
  std::string error;
  double wall_time_ms = 0.0;
};

struct RunReport {
  std::string definition;
  ZeroPolicy policy;
  std::vector<CheckOutcome> checks;
  /// Checks not run because of --fail-fast.
  std::size_t skipped = 0;

  bool all_matched() const;
};

/// Evaluates one check; errors raised by the library are recorded in the
/// outcome instead of propagating.
CheckOutcome run_check(const StructureDefinition& def, const CheckSpec& spec,
                       const ZeroPolicy& policy);

RunReport run_definition(const StructureDefinition& def, const RunOptions& options = {});

/// Report document; non-finite numbers are written as null.
Json to_json(const RunReport& report);

/// Human-readable table.
std::string render_text(const RunReport& report);

}  // namespace qbhkit
