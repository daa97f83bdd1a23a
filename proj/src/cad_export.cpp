#include "planetopt/cad_export.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace planetopt {

const CadVariable* CadVariableSet::find(std::string_view name) const noexcept {
  for (const auto& v : variables)
    if (v.name == name) return &v;
  return nullptr;
}

std::size_t CadVariableSet::count(DimensionGroup g) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(variables.begin(), variables.end(), [g](const CadVariable& v) { return v.group == g; }));
}

namespace {

DimensionValues evaluate_layout(const GearboxDesign& design, const WidthBreakdown& widths, const ProblemSetup& setup,
                                DimensionSchema* schema_out = nullptr) {
  if (!design.has_stages()) throw DesignError("a design without gear stages has no CAD dimensions");
  require_valid_topology(design);
  DimensionSchema schema = layout_schema(design, setup.motor, setup.layout);
  const DimensionProgram program(schema, setup.fixed_values(), setup.catalog);
  DimensionValues v = evaluate_dimensions(program, design, WidthOverride::from(widths));
  if (schema_out) *schema_out = std::move(schema);
  return v;
}

int group_rank(DimensionGroup g) {
  switch (g) {
    case DimensionGroup::optimization: return 0;
    case DimensionGroup::fixed: return 1;
    case DimensionGroup::dependent: return 2;
  }
  return 3;
}

std::string_view group_heading(DimensionGroup g) {
  switch (g) {
    case DimensionGroup::optimization: return "optimization variables";
    case DimensionGroup::fixed: return "fixed dimensions";
    case DimensionGroup::dependent: return "dependent dimensions";
  }
  return "";
}

std::string format_value(double v, Unit u) {
  v = quantize(v, u);
  if (v == 0.0) v = 0.0;  // no "-0.000"
  char buf[64];
  switch (u) {
    case Unit::count: std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v)); break;
    case Unit::dimensionless: std::snprintf(buf, sizeof buf, "%.6f", v); break;
    default: std::snprintf(buf, sizeof buf, "%.3f", v); break;
  }
  return buf;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<std::pair<std::string, double>> derive_dependent_dimensions(const GearboxDesign& design,
                                                                        const WidthBreakdown& widths,
                                                                        const ProblemSetup& setup) {
  const DimensionValues v = evaluate_layout(design, widths, setup);
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < v.names.size(); ++i)
    if (v.groups[i] == DimensionGroup::dependent) out.emplace_back(v.names[i], v.values[i]);
  return out;
}

CadVariableSet build_variable_set(const GearboxDesign& design, const WidthBreakdown& widths,
                                  const ProblemSetup& setup) {
  const DimensionValues v = evaluate_layout(design, widths, setup);
  CadVariableSet set;
  set.topology = design.topology;
  for (std::size_t i = 0; i < v.names.size(); ++i) set.variables.push_back({v.names[i], v.values[i], v.units[i], v.groups[i]});
  std::sort(set.variables.begin(), set.variables.end(), [](const CadVariable& a, const CadVariable& b) {
    const int ra = group_rank(a.group), rb = group_rank(b.group);
    return ra != rb ? ra < rb : a.name < b.name;
  });
  return set;
}

CadVariableSet build_variable_set(const DesignEvaluation& e, const ProblemSetup& setup) {
  if (!e.has_metrics) throw DesignError("design has no evaluated widths to export");
  return build_variable_set(e.design, e.widths, setup);
}

double quantize(double value, Unit unit) {
  switch (unit) {
    case Unit::count: return std::round(value);
    case Unit::dimensionless: return std::round(value * 1e6) / 1e6;
    default: return std::round(value * 1e3) / 1e3;
  }
}

CadVariableSet quantized(const CadVariableSet& set) {
  CadVariableSet q = set;
  for (auto& v : q.variables) {
    v.value = quantize(v.value, v.unit);
    if (v.value == 0.0) v.value = 0.0;
  }
  return q;
}

std::string format_variable_file(const CadVariableSet& set) {
  std::string out;
  out += "# planetopt variables\n";
  out += "# schema = " + std::to_string(kVariableSchemaVersion) + "\n";
  out += "# topology = " + std::string(to_string(set.topology)) + "\n";
  std::optional<DimensionGroup> current;
  for (const auto& v : set.variables) {
    if (!current || *current != v.group) {
      current = v.group;
      out += "\n# ";
      out += group_heading(v.group);
      out += "\n";
    }
    out += v.name + " = " + format_value(v.value, v.unit) + " " + std::string(to_string(v.unit)) + "\n";
  }
  return out;
}

CadVariableSet parse_variable_file(std::string_view text) {
  CadVariableSet set;
  bool have_topology = false;
  std::optional<DimensionGroup> group;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) -> CadFormatError {
    return CadFormatError("variable file line " + std::to_string(line_no) + ": " + what);
  };
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view body = trim(line.substr(1));
      if (body.rfind("schema", 0) == 0) {
        const auto eq = body.find('=');
        if (eq == std::string_view::npos || trim(body.substr(eq + 1)) != std::to_string(kVariableSchemaVersion))
          throw fail("unsupported schema version");
      } else if (body.rfind("topology", 0) == 0) {
        const auto eq = body.find('=');
        auto t = eq == std::string_view::npos ? std::nullopt : parse_topology(trim(body.substr(eq + 1)));
        if (!t) throw fail("unknown topology");
        set.topology = *t;
        have_topology = true;
      } else {
        for (DimensionGroup g : {DimensionGroup::optimization, DimensionGroup::fixed, DimensionGroup::dependent})
          if (body == group_heading(g)) group = g;
      }
      continue;
    }
    if (!group) throw fail("variable before any group heading");
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw fail("expected 'name = value unit'");
    const std::string_view name = trim(line.substr(0, eq));
    const std::string_view rest = trim(line.substr(eq + 1));
    const auto sp = rest.find(' ');
    if (name.empty() || sp == std::string_view::npos) throw fail("expected 'name = value unit'");
    const std::string_view number = rest.substr(0, sp);
    const auto unit = parse_unit(trim(rest.substr(sp + 1)));
    if (!unit) throw fail("unknown unit");
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
    if (ec != std::errc() || ptr != number.data() + number.size()) throw fail("bad number '" + std::string(number) + "'");
    if (set.find(name)) throw fail("duplicate variable '" + std::string(name) + "'");
    set.variables.push_back({std::string(name), value, *unit, *group});
  }
  if (!have_topology) throw CadFormatError("variable file has no topology line");
  return set;
}

void export_variable_file(const CadVariableSet& set, const std::filesystem::path& path) {
  const std::string text = format_variable_file(set);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

CadVariableSet read_variable_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_variable_file(ss.str());
}

std::vector<std::string> check_dependent_consistency(const CadVariableSet& set, const DimensionSchema& schema,
                                                     double tolerance) {
  std::map<std::string, double, std::less<>> values;
  for (const auto& v : set.variables) values[v.name] = v.value;
  std::vector<std::string> problems;
  for (const auto& def : schema.defs) {
    if (def.source != DimensionSource::expression) continue;
    auto it = values.find(def.name);
    if (it == values.end()) {
      problems.push_back(def.name + ": missing");
      continue;
    }
    const double expect = Expression::parse(def.expression).evaluate([&](std::string_view n) {
      auto f = values.find(n);
      if (f == values.end()) throw ExpressionError("'" + def.name + "' needs '" + std::string(n) + "'");
      return f->second;
    });
    if (!(std::fabs(expect - it->second) <= tolerance)) {
      char buf[160];
      std::snprintf(buf, sizeof buf, ": stored %.12g, expression gives %.12g", it->second, expect);
      problems.push_back(def.name + buf);
    }
  }
  return problems;
}

}  // namespace planetopt
