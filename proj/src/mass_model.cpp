#include "planetopt/mass_model.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace planetopt {

std::string_view to_string(PrimitiveKind k) noexcept {
  switch (k) {
    case PrimitiveKind::solid_cylinder: return "solid_cylinder";
    case PrimitiveKind::hollow_cylinder: return "hollow_cylinder";
    case PrimitiveKind::cone: return "cone";
  }
  return "solid_cylinder";
}

std::optional<PrimitiveKind> parse_primitive(std::string_view s) noexcept {
  for (auto k : {PrimitiveKind::solid_cylinder, PrimitiveKind::hollow_cylinder, PrimitiveKind::cone})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

void GeometryPrimitive::validate() const {
  if (!material) throw DesignError("primitive has no material");
  if (!(outer_diameter >= 0.0) || !(inner_diameter >= 0.0) || !(height >= 0.0))
    throw DesignError("primitive dimensions must be non-negative");
  if (inner_diameter > 0.0 && !(inner_diameter < outer_diameter))
    throw DesignError("primitive inner diameter must be below the outer diameter");
  if (kind != PrimitiveKind::hollow_cylinder && inner_diameter != 0.0)
    throw DesignError(std::string(to_string(kind)) + " cannot have an inner diameter");
}

namespace {

constexpr double kMm3ToM3 = 1e-9;

double raw_mass(PrimitiveKind kind, double od, double id, double h, double density) {
  const double ro = od / 2.0, ri = id / 2.0;
  double v = 0.0;
  switch (kind) {
    case PrimitiveKind::solid_cylinder: v = std::numbers::pi * ro * ro * h; break;
    case PrimitiveKind::hollow_cylinder: v = std::numbers::pi * (ro * ro - ri * ri) * h; break;
    case PrimitiveKind::cone: v = std::numbers::pi / 3.0 * ro * ro * h; break;
  }
  return v * kMm3ToM3 * density;
}

}  // namespace

double primitive_mass(const GeometryPrimitive& p) {
  p.validate();
  return raw_mass(p.kind, p.outer_diameter, p.inner_diameter, p.height, p.material->density);
}

double gear_mass(const GearStage& stage, GearRole role, double face_width, const Material& material,
                 double ring_radial_width) {
  const int teeth = role == GearRole::sun ? stage.sun : role == GearRole::planet ? stage.planet : stage.ring;
  if (teeth <= 0) throw DesignError("gear role has no teeth in this stage");
  if (stage.module.is_zero()) throw DesignError("gear needs a module");
  const double d = stage.module.mm() * teeth;
  GeometryPrimitive p;
  p.material = &material;
  p.height = face_width;
  if (role == GearRole::ring) {
    p.kind = PrimitiveKind::hollow_cylinder;
    p.inner_diameter = d;
    p.outer_diameter = d + 2.0 * ring_radial_width;
  } else {
    p.outer_diameter = d;
  }
  return primitive_mass(p);
}

// -----------------------------
// Template file
// -----------------------------
const std::vector<ComponentTemplate>& MassTemplate::for_topology(Topology t) const {
  auto it = topologies.find(t);
  if (it == topologies.end()) throw Error("component template has no entries for " + std::string(to_string(t)));
  return it->second;
}

namespace {

std::string scalar(const YAML::Node& n) {
  if (!n.IsScalar()) throw Error("expected a scalar");
  return n.Scalar();
}

std::vector<ComponentTemplate> parse_components(const YAML::Node& list, const std::string& where) {
  if (!list.IsSequence()) throw Error("component template " + where + " must be a list");
  std::vector<ComponentTemplate> out;
  for (const auto& e : list) {
    if (!e.IsMap()) throw Error("component template " + where + ": entries must be mappings");
    ComponentTemplate c;
    if (!e["name"]) throw Error("component template " + where + ": entry without a name");
    c.name = scalar(e["name"]);
    const std::string label = where + "/" + c.name;
    for (const auto& kv : e) {
      const std::string key = kv.first.Scalar();
      if (key == "name") continue;
      const std::string value = scalar(kv.second);
      if (key == "primitive") {
        c.primitive = parse_primitive(value);
        if (!c.primitive) throw Error("component " + label + ": unknown primitive '" + value + "'");
      } else if (key == "od") {
        c.outer_diameter = value;
      } else if (key == "id") {
        c.inner_diameter = value;
      } else if (key == "height") {
        c.height = value;
      } else if (key == "material") {
        c.material = value;
      } else if (key == "part") {
        c.part = value;
      } else if (key == "count") {
        c.count = value;
      } else if (key == "per_planet") {
        c.per_planet = kv.second.as<int>();
        if (c.per_planet < 0 || c.per_planet > 2) throw Error("component " + label + ": per_planet must be 0, 1 or 2");
      } else {
        throw Error("component " + label + ": unknown key '" + key + "'");
      }
    }
    if (c.primitive.has_value() == !c.part.empty())
      throw Error("component " + label + ": give exactly one of 'primitive' and 'part'");
    if (c.primitive && (c.outer_diameter.empty() || c.height.empty() || c.material.empty()))
      throw Error("component " + label + ": primitives need od, height and material");
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

MassTemplate parse_mass_template(std::string_view text, std::string_view source) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw Error("component template " + std::string(source) + ": " + e.what());
  }
  if (!root.IsMap()) throw Error("component template " + std::string(source) + " must be a mapping");
  MassTemplate t;
  for (const auto& kv : root) {
    const std::string key = kv.first.Scalar();
    if (key != "common" && key != "topologies")
      throw Error("component template " + std::string(source) + ": unknown key '" + key + "'");
  }
  if (root["common"]) t.common = parse_components(root["common"], "common");
  if (root["topologies"]) {
    for (const auto& kv : root["topologies"]) {
      const std::string name = kv.first.Scalar();
      auto topo = parse_topology(name);
      if (!topo) throw Error("component template: unknown topology '" + name + "'");
      t.topologies[*topo] = parse_components(kv.second, name);
    }
  }
  return t;
}

MassTemplate load_mass_template(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open component template " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_mass_template(ss.str(), path.string());
}

// -----------------------------
// Compiled model
// -----------------------------
namespace {

struct CompiledComponent {
  std::string name;
  bool is_part = false;
  PrimitiveKind kind = PrimitiveKind::solid_cylinder;
  CompiledExpression od, id, height, count;
  double density = 0.0;
  int part = -1;
  int planet_slot = -1;
  int per_planet = 0;
};

struct CompiledSet {
  std::unique_ptr<DimensionProgram> program;
  std::vector<CompiledComponent> components;
  DimensionProgram::Plan full;   // what the components read
  DimensionProgram::Plan lean;   // same with the widths imposed
  DimensionProgram::Plan bound;  // what the pick-free components read, widths imposed
  std::vector<std::size_t> bound_components;
  DimensionProgram::Plan quick;  // the few components that need almost no derived dimensions
  std::vector<std::size_t> quick_components;
};

CompiledSet compile(std::optional<Topology> t, const MassTemplate& tmpl, const Catalog& catalog,
                    const std::map<std::string, double>& fixed) {
  CompiledSet set;
  set.program = std::make_unique<DimensionProgram>(core_schema(t), fixed, catalog);
  const auto& slots = set.program->slots();
  auto add = [&](const ComponentTemplate& c) {
    CompiledComponent cc;
    cc.name = c.name;
    cc.count = CompiledExpression(Expression::parse(c.count), slots);
    cc.per_planet = c.per_planet;
    if (c.per_planet > 0) cc.planet_slot = slots.at(c.per_planet == 1 ? "n_p1" : "n_p2");
    if (!c.part.empty()) {
      cc.is_part = true;
      const auto& names = set.program->part_names();
      auto it = std::find(names.begin(), names.end(), c.part);
      if (it == names.end())
        throw Error("component '" + c.name + "' references unknown part '" + c.part + "'");
      cc.part = static_cast<int>(it - names.begin());
    } else {
      cc.kind = *c.primitive;
      cc.od = CompiledExpression(Expression::parse(c.outer_diameter), slots);
      cc.id = CompiledExpression(Expression::parse(c.inner_diameter), slots);
      cc.height = CompiledExpression(Expression::parse(c.height), slots);
      cc.density = catalog.material(c.material).density;
    }
    set.components.push_back(std::move(cc));
  };
  for (const auto& c : tmpl.common) add(c);
  if (t)
    for (const auto& c : tmpl.for_topology(*t)) add(c);
  // The search only needs what the components read.
  std::vector<int> used, parts, bound_used, quick_used;
  for (std::size_t i = 0; i < set.components.size(); ++i) {
    const auto& c = set.components[i];
    std::vector<int> mine;
    for (const auto* e : {&c.od, &c.id, &c.height, &c.count})
      for (int s : e->slots()) mine.push_back(s);
    if (c.planet_slot >= 0) mine.push_back(c.planet_slot);
    used.insert(used.end(), mine.begin(), mine.end());
    if (c.part >= 0) {
      parts.push_back(c.part);
    } else if (const auto own = set.program->plan(mine, {}, true); !own.uses_parts) {
      set.bound_components.push_back(i);
      bound_used.insert(bound_used.end(), mine.begin(), mine.end());
      if (own.steps.size() <= 2) {
        set.quick_components.push_back(i);
        quick_used.insert(quick_used.end(), mine.begin(), mine.end());
      }
    }
  }
  set.full = set.program->plan(used, parts);
  set.lean = set.program->plan(used, parts, true);
  set.bound = set.program->plan(bound_used, {}, true);
  set.quick = set.program->plan(quick_used, {}, true);
  return set;
}

}  // namespace

struct MassModel::Compiled {
  double motor_mass = 0.0;
  CompiledSet housing;
  std::map<Topology, CompiledSet> sets;

  const CompiledSet& get(std::optional<Topology> t) const { return t ? sets.at(*t) : housing; }
};

MassModel::MassModel(const MassTemplate& tmpl, const Catalog& catalog, const MotorSpec& motor,
                     const std::map<std::string, double>& fixed)
    : impl_(std::make_unique<Compiled>()) {
  impl_->motor_mass = motor.mass;
  impl_->housing = compile(std::nullopt, tmpl, catalog, fixed);
  for (Topology t : kAllTopologies) impl_->sets.emplace(t, compile(t, tmpl, catalog, fixed));
}

MassModel::~MassModel() = default;
MassModel::MassModel(MassModel&&) noexcept = default;
MassModel& MassModel::operator=(MassModel&&) noexcept = default;

const DimensionProgram& MassModel::program(std::optional<Topology> t) const { return *impl_->get(t).program; }

namespace {

double component_mass(const CompiledComponent& c, std::span<const double> v, const MassModel::Scratch& scratch,
                      int& count_out) {
  // Counts are whole numbers by construction; round rather than truncate.
  const auto whole = [](double x) { return static_cast<long long>(std::floor(x + 0.5)); };
  long long count = whole(c.count.evaluate(v));
  if (c.planet_slot >= 0) count *= whole(v[static_cast<std::size_t>(c.planet_slot)]);
  if (count < 0) throw DesignError("component '" + c.name + "' has a negative count");
  count_out = static_cast<int>(count);
  if (c.is_part) return scratch.parts[static_cast<std::size_t>(c.part)].mass();
  const double od = c.od.evaluate(v), id = c.id.evaluate(v), h = c.height.evaluate(v);
  if (od < 0.0 || id < 0.0 || h < 0.0 || (id > 0.0 && id >= od))
    throw DesignError("component '" + c.name + "' has invalid dimensions");
  return raw_mass(c.kind, od, id, h, c.density);
}

void prepare(const DimensionProgram& program, MassModel::Scratch& scratch) {
  if (scratch.values.size() < program.size()) scratch.values.resize(program.size());
  if (scratch.parts.size() < program.part_count()) scratch.parts.resize(program.part_count());
}

template <typename Visit>
void run_components(const CompiledSet& set, const GearboxDesign& design, const WidthOverride& widths,
                    MassModel::Scratch& scratch, bool planned, Visit&& visit) {
  const auto& program = *set.program;
  prepare(program, scratch);
  if (planned)
    program.evaluate(program.covers(widths) ? set.lean : set.full, design, widths, scratch.values, scratch.parts);
  else
    program.evaluate(design, widths, scratch.values, scratch.parts);
  const std::span<const double> v(scratch.values);
  for (const auto& c : set.components) {
    int count = 0;
    const double unit = component_mass(c, v, scratch, count);
    visit(c, unit, count);
  }
}

std::optional<Topology> schema_key(const GearboxDesign& d) {
  if (!d.has_stages()) return std::nullopt;
  require_valid_topology(d);
  return d.topology;
}

}  // namespace

double MassModel::total(const GearboxDesign& design, const WidthOverride& widths, Scratch& scratch) const {
  double sum = 0.0;
  run_components(impl_->get(schema_key(design)), design, widths, scratch, true,
                 [&](const CompiledComponent&, double unit, int count) { sum += unit * count; });
  return sum + impl_->motor_mass;
}

double MassModel::lower_bound(const GearboxDesign& design, const WidthOverride& widths, Scratch& scratch,
                              bool quick) const {
  const CompiledSet& set = impl_->get(schema_key(design));
  prepare(*set.program, scratch);
  if (!set.program->covers(widths)) return impl_->motor_mass;  // still a bound, just a weak one
  set.program->evaluate(quick ? set.quick : set.bound, design, widths, scratch.values, scratch.parts);
  const std::span<const double> v(scratch.values);
  double sum = 0.0;
  for (std::size_t i : quick ? set.quick_components : set.bound_components) {
    int count = 0;
    const double unit = component_mass(set.components[i], v, scratch, count);
    sum += unit * count;
  }
  return sum + impl_->motor_mass;
}

MassBreakdown MassModel::breakdown(const GearboxDesign& design, const WidthOverride& widths) const {
  MassBreakdown out;
  Scratch scratch;
  run_components(impl_->get(schema_key(design)), design, widths, scratch, false,
                 [&](const CompiledComponent& c, double unit, int count) {
                   ComponentMass m;
                   m.name = c.name;
                   m.unit_mass = unit;
                   m.count = count;
                   m.mass = unit * count;
                   m.per_planet_stage = c.per_planet;
                   if (c.is_part) m.part = scratch.parts[static_cast<std::size_t>(c.part)].designation();
                   out.gearbox_mass += m.mass;
                   out.components.push_back(std::move(m));
                 });
  out.motor_mass = impl_->motor_mass;
  out.total = out.gearbox_mass + out.motor_mass;
  return out;
}

std::map<std::string, double> MassBreakdown::per_component() const {
  std::map<std::string, double> m;
  for (const auto& c : components) m[c.name] += c.mass;
  return m;
}

MassBreakdown actuator_mass(const GearboxDesign& design, const WidthBreakdown& widths, const MassModel& model) {
  if (!design.has_stages()) return model.breakdown(design, {});
  return model.breakdown(design, WidthOverride::from(widths));
}

}  // namespace planetopt
