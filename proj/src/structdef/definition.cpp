#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "qbhkit/errors.hpp"
#include "qbhkit/structdef.hpp"

namespace qbhkit {
namespace {

enum class ArgType { Field, Scalar, Tensor, FieldList, ScalarList, Integer };

struct ArgSpec {
  std::string key;
  ArgType type;
  bool required = true;
};

const std::map<std::string, std::vector<ArgSpec>, std::less<>>& kind_table() {
  using enum ArgType;
  static const std::map<std::string, std::vector<ArgSpec>, std::less<>> table{
      {"jacobi", {{"tensor", Tensor}}},
      {"compat", {{"tensor1", Tensor}, {"tensor2", Tensor}}},
      {"automorphism", {{"field", Field}, {"tensor", Tensor}}},
      {"bracket-span",
       {{"x", Field}, {"y", Field}, {"basis", FieldList}, {"coeffs", ScalarList, false}}},
      {"delta", {{"X1", Field}, {"X2", Field}, {"X3", Field}}},
      {"hamiltonian-pde", {{"X1", Field}, {"X2", Field}, {"H", Scalar}}},
      {"lemma4",
       {{"X1", Field},
        {"X2", Field},
        {"X3", Field},
        {"H", Scalar},
        {"N1", Scalar, false},
        {"D1", Scalar, false},
        {"D2", Scalar, false},
        {"E1", Scalar, false},
        {"E2", Scalar, false}}},
      {"theorem1",
       {{"X1", Field}, {"X2", Field}, {"X3", Field}, {"XH", Field}, {"N1", Scalar},
        {"N2", Scalar}, {"A1", Scalar}, {"A2", Scalar}, {"B1", Scalar}, {"B2", Scalar},
        {"C1", Scalar}, {"C2", Scalar}, {"D1", Scalar}, {"D2", Scalar}, {"E1", Scalar},
        {"E2", Scalar}}},
      {"qbh", {{"X1", Field}, {"X2", Field}, {"X3", Field}, {"H", Scalar}, {"F", Scalar}}},
      {"hojman", {{"X1", Field}, {"X3", Field}, {"H", Scalar}}},
      {"bih2d", {{"X3", Field}, {"H", Scalar}, {"F", Scalar}, {"tensor", Tensor}}},
      {"jacobi-structure", {{"tensor", Tensor}, {"E", Field}}},
      {"theorem3",
       {{"X1", Field}, {"X2", Field}, {"XH", Field}, {"A", Scalar}, {"B", Scalar},
        {"C", Scalar}}},
      {"field-pde",
       {{"field", Field}, {"of", Scalar}, {"order", Integer, false}, {"rhs", Scalar}}},
  };
  return table;
}

const std::set<std::string, std::less<>> kExpectations{"pass",    "fail",    "exact",
                                                       "numeric", "nonzero", "error"};

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) {
    return false;
  }
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::string get_string(const Json& j, const std::string& where) {
  if (!j.is_string()) throw ValidationError(where + " must be a string");
  return j.get<std::string>();
}

double get_number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError(where + " must be a number");
  return j.get<double>();
}

std::vector<std::string> get_string_list(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) out.push_back(get_string(e, where));
  return out;
}

void reject_unknown_keys(const Json& table, std::initializer_list<std::string_view> known,
                         const std::string& where) {
  for (const auto& [key, _] : table.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ValidationError(where + ": unknown key '" + key + "'");
    }
  }
}

Origin parse_origin(const Json& table, const std::string& where) {
  if (!table.contains("origin")) return Origin::Derived;
  std::string o = get_string(table["origin"], where + ".origin");
  if (o == "published") return Origin::Published;
  if (o == "derived") return Origin::Derived;
  throw ValidationError(where + ".origin must be 'published' or 'derived', got '" + o + "'");
}

// Wraps parse errors so the message names the offending entry.
template <class F>
auto with_context(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

class DefinitionBuilder {
 public:
  explicit DefinitionBuilder(const Json& root) : root_(root) {}

  StructureDefinition build() {
    if (!root_.is_object()) throw ValidationError("definition must be a table");
    reject_unknown_keys(root_, {"meta", "chart", "opaque", "param", "scalar", "field", "check"},
                        "top level");
    meta();
    chart();
    opaque();
    params();
    scalars();
    fields();
    checks();
    return std::move(def_);
  }

 private:
  void meta() {
    if (!root_.contains("meta")) throw ValidationError("missing [meta] table");
    const Json& m = root_["meta"];
    reject_unknown_keys(m, {"name", "description", "citation"}, "meta");
    if (!m.contains("name")) throw ValidationError("meta.name is required");
    def_.name = get_string(m["name"], "meta.name");
    if (m.contains("description")) def_.description = get_string(m["description"], "meta.description");
    if (m.contains("citation")) def_.citation = get_string(m["citation"], "meta.citation");
  }

  void chart() {
    if (!root_.contains("chart")) throw ValidationError("missing [chart] table");
    const Json& c = root_["chart"];
    reject_unknown_keys(c, {"coords", "box", "guards"}, "chart");
    if (!c.contains("coords")) throw ValidationError("chart.coords is required");
    auto coords = get_string_list(c["coords"], "chart.coords");
    for (const auto& name : coords) {
      if (!is_identifier(name)) throw ValidationError("chart.coords: invalid name '" + name + "'");
      declare(name, "coordinate");
    }
    std::vector<Interval> box;
    if (c.contains("box")) {
      const Json& b = c["box"];
      if (!b.is_array()) throw ValidationError("chart.box must be an array of [lo, hi] pairs");
      for (const auto& pair : b) {
        if (!pair.is_array() || pair.size() != 2) {
          throw ValidationError("chart.box entries must be [lo, hi] pairs");
        }
        box.push_back({get_number(pair[0], "chart.box"), get_number(pair[1], "chart.box")});
      }
    }
    std::vector<std::string> guards;
    if (c.contains("guards")) guards = get_string_list(c["guards"], "chart.guards");
    def_.chart = with_context("chart", [&] { return make_chart(coords, box, guards); });
  }

  void opaque() {
    if (!root_.contains("opaque")) return;
    for (const auto& [name, entry] : root_["opaque"].items()) {
      const std::string where = "opaque." + name;
      if (!is_identifier(name)) throw ValidationError(where + ": invalid name");
      declare(name, "opaque function");
      std::string selector;
      if (entry.is_string()) {
        selector = entry.get<std::string>();
      } else if (entry.is_object()) {
        reject_unknown_keys(entry, {"binding"}, where);
        if (!entry.contains("binding")) throw ValidationError(where + ".binding is required");
        selector = get_string(entry["binding"], where + ".binding");
      } else {
        throw ValidationError(where + " must be a table or a selector string");
      }
      def_.scope.opaque.push_back(name);
      def_.bindings.functions.emplace(
          name, with_context(where, [&] { return OpaqueFunction::from_selector(selector); }));
    }
  }

  void params() {
    if (!root_.contains("param")) return;
    for (const auto& [name, entry] : root_["param"].items()) {
      const std::string where = "param." + name;
      if (!is_identifier(name)) throw ValidationError(where + ": invalid name");
      declare(name, "parameter");
      double value = 0;
      if (entry.is_object()) {
        reject_unknown_keys(entry, {"value"}, where);
        if (!entry.contains("value")) throw ValidationError(where + ".value is required");
        value = get_number(entry["value"], where + ".value");
      } else {
        value = get_number(entry, where);
      }
      def_.scope.params.push_back(name);
      def_.bindings.params[name] = value;
    }
  }

  void scalars() {
    if (!root_.contains("scalar")) return;
    for (const auto& [name, entry] : root_["scalar"].items()) {
      const std::string where = "scalar." + name;
      if (!is_identifier(name)) throw ValidationError(where + ": invalid name");
      declare(name, "scalar");
      NamedScalar s{name, {}, Expr(), Origin::Derived};
      if (entry.is_string()) {
        s.text = entry.get<std::string>();
      } else if (entry.is_object()) {
        reject_unknown_keys(entry, {"expr", "origin"}, where);
        if (!entry.contains("expr")) throw ValidationError(where + ".expr is required");
        s.text = get_string(entry["expr"], where + ".expr");
        s.origin = parse_origin(entry, where);
      } else {
        throw ValidationError(where + " must be a table or an expression string");
      }
      s.expr = parse(s.text, where);
      def_.scope.named.emplace(name, s.expr);
      def_.scalars.push_back(std::move(s));
    }
  }

  void fields() {
    if (!root_.contains("field")) return;
    for (const auto& [name, entry] : root_["field"].items()) {
      const std::string where = "field." + name;
      if (!is_identifier(name)) throw ValidationError(where + ": invalid name");
      declare(name, "field");
      std::vector<std::string> text;
      Origin origin = Origin::Derived;
      if (entry.is_array()) {
        text = get_string_list(entry, where);
      } else if (entry.is_object()) {
        reject_unknown_keys(entry, {"components", "origin"}, where);
        if (!entry.contains("components")) {
          throw ValidationError(where + ".components is required");
        }
        text = get_string_list(entry["components"], where + ".components");
        origin = parse_origin(entry, where);
      } else {
        throw ValidationError(where + " must be a table or an array of components");
      }
      if (text.size() != def_.chart->dim()) {
        throw ValidationError(where + ": expected " + std::to_string(def_.chart->dim()) +
                              " components, got " + std::to_string(text.size()));
      }
      std::vector<Expr> comps;
      for (const auto& t : text) comps.push_back(parse(t, where));
      def_.fields.push_back({name, text, VectorField(def_.chart, comps), origin});
    }
  }

  void checks() {
    if (!root_.contains("check")) return;
    const Json& list = root_["check"];
    if (!list.is_array()) throw ValidationError("'check' must be an array of tables ([[check]])");
    std::set<std::string> ids;
    for (std::size_t n = 0; n < list.size(); ++n) {
      const Json& entry = list[n];
      std::string where = "check #" + std::to_string(n + 1);
      CheckSpec spec;
      if (!entry.contains("id")) throw ValidationError(where + ": 'id' is required");
      spec.id = get_string(entry["id"], where + ".id");
      where = "check '" + spec.id + "'";
      if (!ids.insert(spec.id).second) throw ValidationError(where + ": duplicate id");
      if (!entry.contains("kind")) throw ValidationError(where + ": 'kind' is required");
      spec.kind = get_string(entry["kind"], where + ".kind");
      auto kind = kind_table().find(spec.kind);
      if (kind == kind_table().end()) {
        throw ValidationError(where + ": unknown kind '" + spec.kind + "'");
      }
      spec.label = entry.contains("label") ? get_string(entry["label"], where + ".label")
                                           : spec.kind;
      if (entry.contains("expect_fail")) {
        spec.expect_fail = get_string_list(entry["expect_fail"], where + ".expect_fail");
        spec.expect = "fail";
      }
      if (entry.contains("expect")) spec.expect = get_string(entry["expect"], where + ".expect");
      if (!kExpectations.contains(spec.expect)) {
        throw ValidationError(where + ": unknown expectation '" + spec.expect + "'");
      }
      if (!spec.expect_fail.empty() && spec.expect != "fail" && spec.expect != "nonzero") {
        throw ValidationError(where + ": expect_fail requires a failing expectation");
      }

      spec.raw = Json::object();
      for (const auto& [key, value] : entry.items()) {
        if (key == "id" || key == "kind" || key == "label" || key == "expect" ||
            key == "expect_fail") {
          continue;
        }
        auto arg = std::find_if(kind->second.begin(), kind->second.end(),
                                [&](const ArgSpec& a) { return a.key == key; });
        if (arg == kind->second.end()) {
          throw ValidationError(where + ": unknown argument '" + key + "' for kind '" +
                                spec.kind + "'");
        }
        spec.raw[key] = value;
        resolve(spec.args, *arg, value, where + "." + key);
      }
      for (const auto& arg : kind->second) {
        if (arg.required && !spec.raw.contains(arg.key)) {
          throw ValidationError(where + ": missing argument '" + arg.key + "'");
        }
      }
      if (spec.args.scalar_lists.contains("coeffs") &&
          spec.args.scalar_lists.at("coeffs").size() != spec.args.field_lists.at("basis").size()) {
        throw ValidationError(where + ": coeffs and basis differ in length");
      }
      def_.checks.push_back(std::move(spec));
    }
  }

  void resolve(CheckArgs& args, const ArgSpec& arg, const Json& value, const std::string& where) {
    switch (arg.type) {
      case ArgType::Field:
        args.fields.emplace(arg.key, def_.field(get_string(value, where)).field);
        break;
      case ArgType::Scalar:
        args.scalars.emplace(arg.key, scalar_value(value, where));
        break;
      case ArgType::Tensor: {
        const std::string text = get_string(value, where);
        args.tensors.emplace(arg.key,
                             with_context(where, [&] { return def_.tensor(text); }));
        break;
      }
      case ArgType::FieldList: {
        std::vector<VectorField> list;
        for (const auto& name : get_string_list(value, where)) {
          list.push_back(def_.field(name).field);
        }
        if (list.empty()) throw ValidationError(where + " must not be empty");
        args.field_lists.emplace(arg.key, std::move(list));
        break;
      }
      case ArgType::ScalarList: {
        if (!value.is_array()) throw ValidationError(where + " must be an array");
        std::vector<Expr> list;
        for (const auto& v : value) list.push_back(scalar_value(v, where));
        args.scalar_lists.emplace(arg.key, std::move(list));
        break;
      }
      case ArgType::Integer:
        if (!value.is_number_integer() || value.get<long>() < 1) {
          throw ValidationError(where + " must be a positive integer");
        }
        args.integers.emplace(arg.key, value.get<long>());
        break;
    }
  }

  Expr scalar_value(const Json& value, const std::string& where) {
    if (value.is_number()) return parse(value.dump(), where);
    return parse(get_string(value, where), where);
  }

  Expr parse(const std::string& text, const std::string& where) {
    return with_context(where, [&] { return parse_expr(text, *def_.chart, def_.scope); });
  }

  void declare(const std::string& name, const std::string& what) {
    auto [it, inserted] = names_.emplace(name, what);
    if (!inserted) {
      throw ValidationError("'" + name + "' declared as " + what + " is already a " + it->second);
    }
  }

  const Json& root_;
  StructureDefinition def_;
  std::map<std::string, std::string> names_;
};

// Tensor grammar:
//   tensor := ['-'] term (('+'|'-') term)*
//   term   := [coef '*'] NAME ('^' NAME)*
//   coef   := number | '(' expr ')'
class TensorParser {
 public:
  TensorParser(const StructureDefinition& def, std::string_view text) : def_(def), s_(text) {}

  Multivector run() {
    std::optional<Multivector> acc;
    bool negate = false;
    skip();
    if (peek() == '-') {
      negate = true;
      ++i_;
    }
    for (;;) {
      Multivector t = term();
      if (negate) t = Expr(-1) * t;
      if (acc && acc->degree() != t.degree()) {
        throw ValidationError("tensor '" + std::string(s_) + "' mixes degrees " +
                              std::to_string(acc->degree()) + " and " +
                              std::to_string(t.degree()));
      }
      acc = acc ? *acc + t : t;
      skip();
      if (i_ >= s_.size()) break;
      if (peek() == '+') {
        negate = false;
      } else if (peek() == '-') {
        negate = true;
      } else {
        fail("expected '+', '-' or '^'");
      }
      ++i_;
    }
    return *acc;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ValidationError("tensor '" + std::string(s_) + "': " + msg + " at position " +
                          std::to_string(i_));
  }

  char peek() const { return i_ < s_.size() ? s_[i_] : '\0'; }

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }

  std::string name() {
    skip();
    std::size_t start = i_;
    while (i_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) {
      ++i_;
    }
    if (start == i_) fail("expected a field name");
    return std::string(s_.substr(start, i_ - start));
  }

  Multivector term() {
    skip();
    std::optional<Expr> coef;
    if (peek() == '(') {
      std::size_t depth = 0, start = ++i_;
      while (i_ < s_.size() && (s_[i_] != ')' || depth > 0)) {
        if (s_[i_] == '(') ++depth;
        if (s_[i_] == ')') --depth;
        ++i_;
      }
      if (i_ >= s_.size()) fail("unbalanced parenthesis");
      coef = def_.expression(s_.substr(start, i_ - start));
      ++i_;
      star();
    } else if (std::isdigit(static_cast<unsigned char>(peek()))) {
      std::size_t start = i_;
      while (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) ||
                                s_[i_] == '.' || s_[i_] == '/')) {
        ++i_;
      }
      coef = def_.expression(s_.substr(start, i_ - start));
      star();
    }
    Multivector m = Multivector::from_vector(def_.field(name()).field);
    for (;;) {
      skip();
      if (peek() != '^') break;
      ++i_;
      m = wedge(m, Multivector::from_vector(def_.field(name()).field));
    }
    return coef ? *coef * m : m;
  }

  void star() {
    skip();
    if (peek() != '*') fail("expected '*' after coefficient");
    ++i_;
  }

  const StructureDefinition& def_;
  std::string_view s_;
  std::size_t i_ = 0;
};

}  // namespace

std::string_view to_string(Origin o) { return o == Origin::Published ? "published" : "derived"; }

const std::vector<std::string>& check_kinds() {
  static const std::vector<std::string> kinds = [] {
    std::vector<std::string> out;
    for (const auto& [k, _] : kind_table()) out.push_back(k);
    return out;
  }();
  return kinds;
}

const VectorField& CheckArgs::field(std::string_view key) const {
  auto it = fields.find(key);
  if (it == fields.end()) throw std::out_of_range("no field argument " + std::string(key));
  return it->second;
}

const Expr& CheckArgs::scalar(std::string_view key) const {
  auto it = scalars.find(key);
  if (it == scalars.end()) throw std::out_of_range("no scalar argument " + std::string(key));
  return it->second;
}

const Multivector& CheckArgs::tensor(std::string_view key) const {
  auto it = tensors.find(key);
  if (it == tensors.end()) throw std::out_of_range("no tensor argument " + std::string(key));
  return it->second;
}

bool CheckArgs::has(std::string_view key) const {
  return fields.contains(key) || scalars.contains(key) || tensors.contains(key) ||
         field_lists.contains(key) || scalar_lists.contains(key) || integers.contains(key);
}

const NamedField& StructureDefinition::field(std::string_view name) const {
  for (const auto& f : fields) {
    if (f.name == name) return f;
  }
  throw ValidationError("undeclared field '" + std::string(name) + "'");
}

const NamedScalar& StructureDefinition::scalar(std::string_view name) const {
  for (const auto& s : scalars) {
    if (s.name == name) return s;
  }
  throw ValidationError("undeclared scalar '" + std::string(name) + "'");
}

Expr StructureDefinition::expression(std::string_view text) const {
  return parse_expr(text, *chart, scope);
}

Multivector StructureDefinition::tensor(std::string_view text) const {
  return TensorParser(*this, text).run();
}

StructureDefinition parse_structure_definition(std::string_view text) {
  Json root = parse_toml(text);
  return DefinitionBuilder(root).build();
}

StructureDefinition load_structure_definition(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_structure_definition(buf.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path.filename().string() + ": " + e.what());
  }
}

}  // namespace qbhkit
