// qbhkit command line: run structure-definition files and built-in demos,
// differentiate and evaluate expressions.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qbhkit/errors.hpp"
#include "qbhkit/fixtures.hpp"
#include "qbhkit/runner.hpp"

namespace {

constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;

struct RunFlags {
  bool json = false;
  double tol = 1e-9;
  std::size_t samples = 200;
  std::uint64_t seed = 42;
  bool fail_fast = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_flag("--json", f.json, "Write the JSON report to stdout");
  cmd->add_option("--tol", f.tol, "Zero tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--samples", f.samples, "Sample points per numeric check")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "Sampling seed");
  cmd->add_flag("--fail-fast", f.fail_fast, "Stop at the first mismatching check");
}

int execute(const qbhkit::StructureDefinition& def, const RunFlags& f) {
  qbhkit::RunOptions options;
  options.policy = {f.tol, f.samples, f.seed};
  options.fail_fast = f.fail_fast;
  qbhkit::RunReport report = qbhkit::run_definition(def, options);
  if (f.json) {
    std::cout << qbhkit::to_json(report).dump(2) << "\n";
  } else {
    std::cout << qbhkit::render_text(report);
  }
  return report.all_matched() ? 0 : kExitMismatch;
}

std::vector<std::string> default_coords(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= std::max<std::size_t>(n, 2); ++i) out.push_back("x" + std::to_string(i));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification of Poisson, quasi-bi-Hamiltonian and Jacobi structures"};
  app.set_version_flag("--version", qbhkit::kToolVersion);
  app.require_subcommand(1);

  RunFlags flags;
  std::string path;
  auto* run = app.add_subcommand("run", "Run the checks of a structure-definition file");
  run->add_option("file", path, "Definition file (.qbh)")->required();
  add_run_flags(run, flags);

  std::string demo_name;
  auto* demo = app.add_subcommand("demo", "Run a built-in example");
  demo->add_option("name", demo_name, "Demo name (see list-demos)")->required();
  add_run_flags(demo, flags);

  auto* list = app.add_subcommand("list-demos", "List the built-in examples");

  std::string show_name;
  auto* show = app.add_subcommand("show-demo", "Print the definition file of a built-in example");
  show->add_option("name", show_name, "Demo name")->required();

  auto* expr = app.add_subcommand("expr", "Expression utilities");
  expr->require_subcommand(1);
  std::string text;
  std::vector<std::string> coords;
  std::string wrt;
  std::vector<double> at;
  auto* diff = expr->add_subcommand("diff", "Print a partial derivative");
  diff->add_option("expression", text)->required();
  diff->add_option("--wrt", wrt, "Coordinate to differentiate by")->required();
  diff->add_option("--coords", coords, "Coordinate names (default x1,x2,x3)")->delimiter(',');
  auto* eval = expr->add_subcommand("eval", "Evaluate at a point");
  eval->add_option("expression", text)->required();
  eval->add_option("--at", at, "Coordinate values, comma separated")->required()->delimiter(',');
  eval->add_option("--coords", coords, "Coordinate names (default x1..xn)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run) return execute(qbhkit::load_structure_definition(path), flags);
    if (*demo) return execute(qbhkit::load_demo(demo_name), flags);
    if (*list) {
      for (const auto& d : qbhkit::builtin_demos()) {
        std::printf("%-20s %s\n", d.name.c_str(), d.citation.c_str());
      }
      return 0;
    }
    if (*show) {
      std::cout << qbhkit::find_demo(show_name).text;
      return 0;
    }
    if (*diff) {
      if (coords.empty()) coords = default_coords(3);
      auto chart = qbhkit::make_chart(coords);
      qbhkit::Expr e = qbhkit::parse_expr(text, *chart);
      std::cout << qbhkit::print(qbhkit::differentiate(e, *chart, wrt), *chart) << "\n";
      return 0;
    }
    if (*eval) {
      if (coords.empty()) coords = default_coords(at.size());
      if (coords.size() < at.size()) {
        throw qbhkit::ValidationError("more values than coordinates");
      }
      auto chart = qbhkit::make_chart(coords);
      qbhkit::Expr e = qbhkit::parse_expr(text, *chart);
      for (std::size_t v : qbhkit::collect_symbols(e).vars) {
        if (v >= at.size()) {
          throw qbhkit::ValidationError("no value given for " + coords[v]);
        }
      }
      std::vector<double> point(at);
      point.resize(chart->dim(), 0.0);
      std::printf("%.17g\n", qbhkit::evaluate_unchecked(e, point));
      return 0;
    }
  } catch (const qbhkit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
