#pragma once

// Built-in example systems. Each one is a structure-definition file shipped
// under fixtures/ and compiled into the library, so demos and file runs read
// the same text.

#include <string>
#include <string_view>
#include <vector>

#include "qbhkit/runner.hpp"

namespace qbhkit {

using Fixture = StructureDefinition;

struct DemoInfo {
  std::string name;
  /// One-line description of the source example.
  std::string citation;
  /// File contents.
  std::string_view text;
};

/// The six built-ins in a fixed order.
const std::vector<DemoInfo>& builtin_demos();

/// Throws ValidationError for an unknown name.
const DemoInfo& find_demo(std::string_view name);
Fixture load_demo(std::string_view name);

/// Published third field with A = 1, B = 0, C = 0; several relations pinned
/// as failing.
Fixture fixture_example2_published();
/// Corrected third field and Hamiltonian; every audit passes.
Fixture fixture_example2_derived();
/// Delta algebra with a Hamiltonian for which J2 is not Poisson.
Fixture fixture_negative_theorem2();
Fixture fixture_so3_jacobi();
Fixture fixture_hojman();
Fixture fixture_linear_abelian();

struct FixtureRun {
  std::string name;
  RunReport report;
  bool matched = false;
};

std::vector<FixtureRun> run_all_fixtures(const ZeroPolicy& policy = {});

}  // namespace qbhkit
