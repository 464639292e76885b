#pragma once

// Structure-definition files (.qbh): a TOML subset describing a chart,
// opaque function bindings, named scalars and vector fields, and a list of
// checks with expected outcomes.
//
//   [meta]            name, description, citation
//   [chart]           coords = [...], box = [[lo, hi], ...], guards = [...]
//   [opaque.NAME]     binding = "identity" | "square" | "sin" | "const(c)"
//   [param.NAME]      value = number
//   [scalar.NAME]     expr = "...", origin = "published" | "derived"
//   [field.NAME]      components = [...], origin = ...
//   [[check]]         id, kind, label, expect, expect_fail, kind arguments
//
// Scalars are usable by name in every later expression. Tensor arguments
// are sums of wedge products of declared fields, optionally scaled:
// "X1^X2 + XH^X3", "-2*X1^X2", "(x1 + 1)*X1".

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qbhkit/multivec.hpp"
#include "qbhkit/report.hpp"

namespace qbhkit {

using Json = nlohmann::ordered_json;

/// Parses the TOML subset used by definition files: tables, arrays of
/// tables, dotted keys, basic and literal strings, integers, floats,
/// booleans, arrays and inline tables. Throws ValidationError with the line.
Json parse_toml(std::string_view text);

enum class Origin { Published, Derived };

std::string_view to_string(Origin o);

struct NamedScalar {
  std::string name;
  std::string text;
  Expr expr;
  Origin origin = Origin::Derived;
};

struct NamedField {
  std::string name;
  std::vector<std::string> text;
  VectorField field;
  Origin origin = Origin::Derived;
};

/// Check arguments resolved against the definition at load time.
struct CheckArgs {
  std::map<std::string, VectorField, std::less<>> fields;
  std::map<std::string, Expr, std::less<>> scalars;
  std::map<std::string, Multivector, std::less<>> tensors;
  std::map<std::string, std::vector<VectorField>, std::less<>> field_lists;
  std::map<std::string, std::vector<Expr>, std::less<>> scalar_lists;
  std::map<std::string, long, std::less<>> integers;

  const VectorField& field(std::string_view key) const;
  const Expr& scalar(std::string_view key) const;
  const Multivector& tensor(std::string_view key) const;
  bool has(std::string_view key) const;
};

struct CheckSpec {
  std::string id;
  std::string kind;
  std::string label;
  /// pass | fail | exact | numeric | nonzero | error
  std::string expect = "pass";
  /// Gating items expected to fail; when non-empty the failing set must
  /// equal it exactly.
  std::vector<std::string> expect_fail;
  /// Raw arguments as written.
  Json raw;
  CheckArgs args;
};

/// Check kinds understood by the runner.
const std::vector<std::string>& check_kinds();

struct StructureDefinition {
  std::string name;
  std::string description;
  std::string citation;
  ChartPtr chart;
  FnBindings bindings;
  ParseScope scope;
  std::vector<NamedScalar> scalars;
  std::vector<NamedField> fields;
  std::vector<CheckSpec> checks;

  /// Throws ValidationError for an undeclared name.
  const NamedField& field(std::string_view name) const;
  const NamedScalar& scalar(std::string_view name) const;

  Expr expression(std::string_view text) const;
  Multivector tensor(std::string_view text) const;
};

/// Throws ValidationError (syntax, unknown keys, unresolved references).
StructureDefinition parse_structure_definition(std::string_view text);
/// Throws ValidationError, including when the file cannot be read.
StructureDefinition load_structure_definition(const std::filesystem::path& path);

}  // namespace qbhkit
