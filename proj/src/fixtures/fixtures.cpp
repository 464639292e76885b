#include "qbhkit/fixtures.hpp"

#include <algorithm>

#include "qbhkit/errors.hpp"

namespace qbhkit {
namespace detail {
const std::vector<std::pair<std::string_view, std::string_view>>& embedded_fixture_files();
}  // namespace detail

const std::vector<DemoInfo>& builtin_demos() {
  static const std::vector<DemoInfo> demos = [] {
    std::vector<DemoInfo> out;
    for (const auto& [name, text] : detail::embedded_fixture_files()) {
      Fixture f = parse_structure_definition(text);
      out.push_back({std::string(name), f.citation, text});
    }
    return out;
  }();
  return demos;
}

const DemoInfo& find_demo(std::string_view name) {
  const auto& demos = builtin_demos();
  auto it = std::find_if(demos.begin(), demos.end(), [&](const auto& d) { return d.name == name; });
  if (it == demos.end()) throw ValidationError("unknown demo '" + std::string(name) + "'");
  return *it;
}

Fixture load_demo(std::string_view name) { return parse_structure_definition(find_demo(name).text); }

Fixture fixture_example2_published() { return load_demo("example2-published"); }
Fixture fixture_example2_derived() { return load_demo("example2-derived"); }
Fixture fixture_negative_theorem2() { return load_demo("negative-theorem2"); }
Fixture fixture_so3_jacobi() { return load_demo("so3-jacobi"); }
Fixture fixture_hojman() { return load_demo("hojman"); }
Fixture fixture_linear_abelian() { return load_demo("linear-abelian"); }

std::vector<FixtureRun> run_all_fixtures(const ZeroPolicy& policy) {
  std::vector<FixtureRun> out;
  for (const auto& demo : builtin_demos()) {
    RunReport report = run_definition(load_demo(demo.name), {policy, false});
    bool matched = report.all_matched();
    out.push_back({demo.name, std::move(report), matched});
  }
  return out;
}

}  // namespace qbhkit
