#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "qbhkit/errors.hpp"
#include "qbhkit/runner.hpp"
#include "qbhkit/structdef.hpp"

namespace qbhkit {
namespace {

std::string expect_validation_error(std::string_view text) {
  try {
    parse_structure_definition(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no ValidationError for:\n" << text;
  return {};
}

const char* kPlane = R"(
[meta]
name = "plane"

[chart]
coords = ["x1", "x2"]

[scalar.H]
expr = "x2^2"

[field.X1]
components = ["1", "0"]

[field.X3]
components = ["-x1", "1"]
)";

std::string with_checks(std::string_view checks) { return std::string(kPlane) + std::string(checks); }

TEST(Toml, TablesArraysAndScalars) {
  Json j = parse_toml(R"(
# comment
title = "a \"b\"\n"  # trailing
lit = 'C:\path'
n = 1_000
x = -2.5e-1
flag = true
arr = [
  1, 2,
  3,   # inside
]
inline = { a = 1, b.c = "d" }
dotted.key = 4

[t.u]
v = [[1, 2], ["x"]]

[[list]]
k = 1
[[list]]
k = 2
[list.sub]
w = false
)");
  EXPECT_EQ(j["title"], "a \"b\"\n");
  EXPECT_EQ(j["lit"], "C:\\path");
  EXPECT_EQ(j["n"], 1000);
  EXPECT_DOUBLE_EQ(j["x"].get<double>(), -0.25);
  EXPECT_EQ(j["flag"], true);
  EXPECT_EQ(j["arr"].size(), 3u);
  EXPECT_EQ(j["inline"]["b"]["c"], "d");
  EXPECT_EQ(j["dotted"]["key"], 4);
  EXPECT_EQ(j["t"]["u"]["v"][1][0], "x");
  ASSERT_EQ(j["list"].size(), 2u);
  EXPECT_EQ(j["list"][1]["k"], 2);
  EXPECT_EQ(j["list"][1]["sub"]["w"], false);
}

TEST(Toml, Errors) {
  auto message = [](std::string_view text) -> std::string {
    try {
      parse_toml(text);
    } catch (const ValidationError& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_NE(message("a = 1\na = 2\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("[t]\n[t]\n").find("defined twice"), std::string::npos);
  EXPECT_NE(message("a = \"open\n").find("unterminated"), std::string::npos);
  EXPECT_NE(message("a = [1 2]\n").find("expected ','"), std::string::npos);
  EXPECT_NE(message("a = 1 b\n").find("unexpected"), std::string::npos);
  EXPECT_NE(message("a = 1.2.3\n").find("malformed"), std::string::npos);
  EXPECT_NE(message("a = \"\\q\"\n").find("escape"), std::string::npos);
  EXPECT_NE(message("a =\n").find("line 1"), std::string::npos);
}

TEST(Definition, ParsesDeclarations) {
  StructureDefinition def = parse_structure_definition(with_checks(R"(
[[check]]
id = "h"
kind = "hojman"
X1 = "X1"
X3 = "X3"
H = "H"
)"));
  EXPECT_EQ(def.name, "plane");
  EXPECT_EQ(def.chart->dim(), 2u);
  ASSERT_EQ(def.checks.size(), 1u);
  EXPECT_EQ(def.checks[0].expect, "pass");
  EXPECT_EQ(def.field("X3").text[0], "-x1");
  EXPECT_EQ(def.scalar("H").origin, Origin::Derived);
  // Named scalars are usable inside later expressions.
  Expr e = def.expression("H + x1");
  const double pt[] = {3.0, 2.0};
  EXPECT_DOUBLE_EQ(evaluate(e, *def.chart, pt, def.bindings), 7.0);
}

TEST(Definition, TensorGrammar) {
  StructureDefinition def = parse_structure_definition(kPlane);
  Multivector a = def.tensor("X1^X3");
  Multivector b = def.tensor("-2*X1^X3 + 3*X1^X3");
  EXPECT_EQ(a.degree(), 2u);
  EXPECT_EQ(multivector_is_zero(a - b, ZeroPolicy{}).kind, ZeroKind::ExactZero);
  Multivector c = def.tensor("(x1 + 1)*X1");
  EXPECT_EQ(c.degree(), 1u);
  EXPECT_THROW(def.tensor("X1 + X1^X3"), ValidationError);
  EXPECT_THROW(def.tensor("X1^Y"), ValidationError);
  EXPECT_THROW(def.tensor("X1^"), ValidationError);
}

TEST(Definition, ValidationErrors) {
  EXPECT_NE(expect_validation_error(with_checks(R"(
[[check]]
id = "h"
kind = "hojman"
X1 = "Missing"
X3 = "X3"
H = "H"
)")).find("undeclared field 'Missing'"),
            std::string::npos);
  EXPECT_NE(expect_validation_error(with_checks(R"(
[[check]]
id = "h"
kind = "teleport"
)")).find("teleport"),
            std::string::npos);
  EXPECT_NE(expect_validation_error(with_checks(R"(
[[check]]
id = "h"
kind = "hojman"
X1 = "X1"
X3 = "X3"
H = "H"
colour = "red"
)")).find("colour"),
            std::string::npos);
  EXPECT_NE(expect_validation_error(with_checks(R"(
[[check]]
id = "h"
kind = "hojman"
X1 = "X1"
X3 = "X3"
)")).find("H"),
            std::string::npos);
  EXPECT_NE(expect_validation_error(with_checks(R"(
[[check]]
id = "h"
kind = "hojman"
X1 = "X1"
X3 = "X3"
H = "H"

[[check]]
id = "h"
kind = "hojman"
X1 = "X1"
X3 = "X3"
H = "H"
)")).find("h"),
            std::string::npos);
  expect_validation_error(R"(
[meta]
name = "bad"
[chart]
coords = ["x1", "x2"]
[field.X]
components = ["1"]
)");
  expect_validation_error(R"(
[meta]
name = "bad"
[chart]
coords = ["x1", "x2"]
[scalar.x1]
expr = "1"
)");
  expect_validation_error(R"(
[meta]
name = "bad"
[chart]
coords = ["x1", "x2"]
[scalar.H]
expr = "x1 +"
)");
  EXPECT_NE(expect_validation_error("[meta]\nname = \"no chart\"\n").find("chart"),
            std::string::npos);
  EXPECT_NE(expect_validation_error("[chart]\ncoords = [\"x1\"]\n").find("meta"),
            std::string::npos);
}

TEST(Definition, LoadReportsFileName) {
  try {
    load_structure_definition("/nonexistent/file.qbh");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("file.qbh"), std::string::npos);
  }
  auto path = std::filesystem::temp_directory_path() / "qbhkit_bad.qbh";
  std::ofstream(path) << "[meta]\nname = \"bad\"\n[chart]\ncoords = [\"x1\"]\n[field.X]\ncomponents = [\"1\", \"2\"]\n";
  try {
    load_structure_definition(path);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("qbhkit_bad.qbh"), std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST(Runner, ExpectationMatching) {
  StructureDefinition def = parse_structure_definition(with_checks(R"(
[[check]]
id = "ok"
kind = "hojman"
X1 = "X1"
X3 = "X3"
H = "H"
expect = "exact"

[[check]]
id = "ok-as-pass"
kind = "hojman"
X1 = "X1"
X3 = "X3"
H = "H"

[[check]]
id = "wrong-expectation"
kind = "hojman"
X1 = "X1"
X3 = "X3"
H = "H"
expect = "fail"

[[check]]
id = "named-failures"
kind = "bih2d"
X3 = "X3"
H = "H"
F = "x1 - x2"
tensor = "X1^X3"
expect_fail = ["x3-dF", "first-integral"]

[[check]]
id = "too-few-failures"
kind = "bih2d"
X3 = "X3"
H = "H"
F = "x1 - x2"
tensor = "X1^X3"
expect_fail = ["x3-dF"]
)"));
  RunReport r = run_definition(def);
  ASSERT_EQ(r.checks.size(), 5u);
  EXPECT_TRUE(r.checks[0].matched);
  EXPECT_EQ(r.checks[0].verdict, "exact");
  EXPECT_TRUE(r.checks[1].matched);
  EXPECT_FALSE(r.checks[2].matched);
  EXPECT_FALSE(r.checks[2].mismatch.empty());
  EXPECT_TRUE(r.checks[3].matched);
  EXPECT_EQ(r.checks[3].verdict, "nonzero");
  EXPECT_EQ(r.checks[3].failing, (std::vector<std::string>{"x3-dF", "first-integral"}));
  EXPECT_FALSE(r.checks[4].matched);
  EXPECT_FALSE(r.all_matched());

  RunOptions ff;
  ff.fail_fast = true;
  RunReport fast = run_definition(def, ff);
  EXPECT_EQ(fast.checks.size(), 3u);
  EXPECT_EQ(fast.skipped, 2u);
}

TEST(Runner, LibraryErrorsBecomeErrorVerdict) {
  // X2(H) = 2 x2 changes sign over the box.
  StructureDefinition def = parse_structure_definition(R"(
[meta]
name = "sign-change"
[chart]
coords = ["x1", "x2", "x3"]
[scalar.H]
expr = "x2^2"
[field.X1]
components = ["1", "0", "0"]
[field.X2]
components = ["0", "1", "0"]
[field.X3]
components = ["0", "0", "1"]

[[check]]
id = "reduction"
kind = "lemma4"
X1 = "X1"
X2 = "X2"
X3 = "X3"
H = "H"

[[check]]
id = "reduction-expected-error"
kind = "lemma4"
X1 = "X1"
X2 = "X2"
X3 = "X3"
H = "H"
expect = "error"
)");
  RunReport r = run_definition(def);
  ASSERT_EQ(r.checks.size(), 2u);
  EXPECT_EQ(r.checks[0].verdict, "error");
  EXPECT_FALSE(r.checks[0].error.empty());
  EXPECT_FALSE(r.checks[0].matched);
  EXPECT_TRUE(r.checks[1].matched);
}

TEST(Runner, FieldPde) {
  StructureDefinition def = parse_structure_definition(with_checks(R"(
[[check]]
id = "first"
kind = "field-pde"
field = "X3"
of = "H"
rhs = "2*x2"
expect = "exact"

[[check]]
id = "second"
kind = "field-pde"
field = "X3"
of = "H"
order = 2
rhs = "2"
expect = "exact"
)"));
  EXPECT_TRUE(run_definition(def).all_matched());
}

TEST(Runner, JsonShapeAndDeterminism) {
  StructureDefinition def = parse_structure_definition(with_checks(R"(
[[check]]
id = "h"
kind = "hojman"
X1 = "X1"
X3 = "X3"
H = "H"
)"));
  auto strip = [](Json j) {
    for (auto& c : j["checks"]) c.erase("wall_time_ms");
    return j.dump();
  };
  Json a = to_json(run_definition(def));
  Json b = to_json(run_definition(def));
  EXPECT_EQ(strip(a), strip(b));
  EXPECT_EQ(a["version"]["schema"], kReportSchemaVersion);
  EXPECT_EQ(a["overall"]["status"], "pass");
  ASSERT_EQ(a["checks"].size(), 1u);
  const Json& c = a["checks"][0];
  for (auto key : {"id", "kind", "label", "verdict", "passed", "expected", "failing", "matched",
                   "error", "max_residual", "items"}) {
    EXPECT_TRUE(c.contains(key)) << key;
  }
  EXPECT_TRUE(c["error"].is_null());
  std::string text = render_text(run_definition(def));
  EXPECT_NE(text.find("overall: pass (1/1 checks matched)"), std::string::npos);
}

}  // namespace
}  // namespace qbhkit
