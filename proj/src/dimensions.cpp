#include "planetopt/dimensions.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace planetopt {

std::string_view to_string(Unit u) noexcept {
  switch (u) {
    case Unit::mm: return "mm";
    case Unit::deg: return "deg";
    case Unit::count: return "count";
    case Unit::dimensionless: return "dimensionless";
  }
  return "dimensionless";
}

std::string_view to_string(DimensionGroup g) noexcept {
  switch (g) {
    case DimensionGroup::optimization: return "optimization";
    case DimensionGroup::fixed: return "fixed";
    case DimensionGroup::dependent: return "dependent";
  }
  return "dependent";
}

std::optional<Unit> parse_unit(std::string_view s) noexcept {
  for (Unit u : {Unit::mm, Unit::deg, Unit::count, Unit::dimensionless})
    if (to_string(u) == s) return u;
  return std::nullopt;
}

void LayoutParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0) throw Error(std::string("layout parameter '") + name + "' must be positive");
  };
  positive(flange_thickness, "flange_thickness");
  positive(housing_radial_clearance, "housing_radial_clearance");
  positive(housing_bolt_diameter, "housing_bolt_diameter");
  positive(pin_bolt_diameter, "pin_bolt_diameter");
  positive(motor_bolt_diameter, "motor_bolt_diameter");
  positive(motor_bolt_engagement, "motor_bolt_engagement");
  positive(pin_sleeve_wall, "pin_sleeve_wall");
  positive(pressure_angle, "pressure_angle");
  if (housing_bolt_count < 3) throw Error("layout parameter 'housing_bolt_count' must be at least 3");
}

const std::array<std::string_view, 10>& variable_names() noexcept {
  static const std::array<std::string_view, 10> names{"N_s1", "N_p1", "N_r1", "N_s2", "N_p2",
                                                      "N_r2", "module_1", "module_2", "n_p1", "n_p2"};
  return names;
}

namespace {

std::string s(int k) { return std::to_string(k); }

class SchemaBuilder {
 public:
  explicit SchemaBuilder(std::optional<Topology> t) { schema_.topology = t; }

  void var(std::string_view name, Unit u) { schema_.defs.push_back({std::string(name), u, DimensionSource::variable, {}, {}}); }
  void fix(std::string name, Unit u = Unit::mm) { schema_.defs.push_back({std::move(name), u, DimensionSource::fixed, {}, {}}); }
  void dep(std::string name, std::string expr, Unit u = Unit::mm) {
    schema_.defs.push_back({std::move(name), u, DimensionSource::expression, std::move(expr), {}});
  }
  void bearing(std::string name, std::string min_bore) {
    schema_.defs.push_back({std::move(name), Unit::mm, DimensionSource::bearing, std::move(min_bore), {}});
  }
  void fastener(std::string name, std::string diameter, std::string min_length) {
    schema_.defs.push_back(
        {std::move(name), Unit::mm, DimensionSource::fastener, std::move(min_length), std::move(diameter)});
  }

  DimensionSchema take() { return std::move(schema_); }

 private:
  DimensionSchema schema_;
};

void fixed_block(SchemaBuilder& b) {
  b.fix("motor_outer_diameter");
  b.fix("motor_stack_length");
  b.fix("motor_shaft_diameter");
  b.fix("motor_bolt_circle_diameter");
  b.fix("motor_bolt_count", Unit::count);
  b.fix("motor_peak_torque", Unit::dimensionless);
  b.fix("allowable_stress", Unit::dimensionless);
  b.fix("safety_factor", Unit::dimensionless);
  b.fix("lewis_y0", Unit::dimensionless);
  b.fix("lewis_y1", Unit::dimensionless);
  b.fix("min_face_width");
  b.fix("max_face_width");
  b.fix("axial_clearance");
  b.fix("wall_thickness");
  b.fix("carrier_plate_thickness");
  b.fix("compound_land");
  b.fix("ring_radial_width");
  b.fix("carrier_extrusion_radius");
  b.fix("min_clearance");
  b.fix("diameter_factor", Unit::dimensionless);
  b.fix("interference_divisor", Unit::dimensionless);
  b.fix("friction_factor", Unit::dimensionless);
  b.fix("pressure_angle", Unit::deg);
  b.fix("flange_thickness");
  b.fix("housing_radial_clearance");
  b.fix("housing_bolt_count", Unit::count);
  b.fix("housing_bolt_size");
  b.fix("pin_bolt_size");
  b.fix("pin_sleeve_wall");
  b.fix("motor_bolt_size");
  b.fix("motor_bolt_engagement");
}

// Pitch, tip, root and base circles of one gear.
void gear(SchemaBuilder& b, const std::string& gear, int k, const std::string& teeth, bool internal) {
  const std::string p = gear + "_" + s(k) + "_";
  const std::string m = "module_" + s(k);
  b.dep(p + "pitch_diameter", m + "*" + teeth);
  b.dep(p + "tip_diameter", m + (internal ? "*(" + teeth + "-2)" : "*(" + teeth + "+2)"));
  b.dep(p + "root_diameter", m + (internal ? "*(" + teeth + "+2.5)" : "*(" + teeth + "-2.5)"));
  b.dep(p + "base_diameter", p + "pitch_diameter*cos(pressure_angle*pi/180)");
  if (internal) b.dep(p + "outer_diameter", p + "pitch_diameter+2*ring_radial_width");
}

void tooth_block(SchemaBuilder& b, int k) {
  const std::string m = "module_" + s(k);
  b.dep("addendum_" + s(k), m);
  b.dep("dedendum_" + s(k), "1.25*" + m);
  b.dep("whole_depth_" + s(k), "2.25*" + m);
  b.dep("tip_clearance_" + s(k), "0.25*" + m);
  b.dep("circular_pitch_" + s(k), "pi*" + m);
  b.dep("tooth_thickness_" + s(k), "pi*" + m + "/2");
}

// Clamped Lewis width for force dimension `force` on a gear with `teeth`.
std::string lewis(const std::string& force, const std::string& module, const std::string& form) {
  return "min(max_face_width, max(min_face_width, safety_factor*" + force + "/(allowable_stress*" + module + "*" +
         form + ")))";
}

// Stage with sun, planet and ring, carrier output (SSPG and both DSPG stages).
void simple_stage(SchemaBuilder& b, int k, const std::string& input_torque) {
  const std::string K = s(k);
  const std::string Ns = "N_s" + K, Np = "N_p" + K, Nr = "N_r" + K, m = "module_" + K, n = "n_p" + K;
  gear(b, "sun", k, Ns, false);
  gear(b, "planet", k, Np, false);
  gear(b, "ring", k, Nr, true);
  tooth_block(b, k);
  b.dep("center_distance_" + K, m + "*(" + Ns + "+" + Np + ")/2");
  b.dep("pin_circle_diameter_" + K, "2*center_distance_" + K);
  b.dep("planet_spacing_" + K, "360/" + n, Unit::deg);
  b.dep("extrusion_clearance_" + K,
        "(sun_" + K + "_pitch_diameter+planet_" + K + "_pitch_diameter)*sin(pi/(interference_divisor*" + n +
            "))-planet_" + K + "_pitch_diameter/2-carrier_extrusion_radius");
  b.dep("eta_sun_planet_" + K, "1-friction_factor*(1/" + Ns + "+1/" + Np + ")", Unit::dimensionless);
  b.dep("eta_planet_ring_" + K, "1-friction_factor*(1/" + Np + "-1/" + Nr + ")", Unit::dimensionless);
  b.dep("stage_ratio_" + K, "(" + Ns + "+" + Nr + ")/" + Ns, Unit::dimensionless);
  b.dep("input_torque_" + K, input_torque, Unit::dimensionless);
  b.dep("sun_mesh_force_" + K, "2000*input_torque_" + K + "/(" + m + "*" + Ns + "*" + n + ")", Unit::dimensionless);
  b.dep("lewis_y_sun_" + K, "lewis_y0-lewis_y1/min(" + Ns + "," + Np + ")", Unit::dimensionless);
  b.dep("lewis_y_planet_" + K, "lewis_y0-lewis_y1/" + Np, Unit::dimensionless);
  b.dep("face_width_" + K, "max(" + lewis("sun_mesh_force_" + K, m, "lewis_y_sun_" + K) + ", " +
                               lewis("sun_mesh_force_" + K, m, "lewis_y_planet_" + K) + ")");
}

void carrier_block(SchemaBuilder& b, int k, const std::string& planet_length) {
  const std::string K = s(k);
  b.dep("planet_length_" + K, planet_length);
  b.dep("extrusion_height_" + K, "planet_length_" + K + "+2*axial_clearance");
  b.dep("carrier_diameter_" + K, "pin_circle_diameter_" + K + "+2*carrier_extrusion_radius+2*wall_thickness");
  b.dep("planet_bearing_min_bore_" + K, "planet_pin_diameter");
  b.bearing("planet_bearing_" + K, "planet_bearing_min_bore_" + K);
  b.dep("pin_bolt_min_length_" + K, "planet_length_" + K + "+2*axial_clearance+carrier_plate_thickness");
  b.fastener("pin_bolt_" + K, "pin_bolt_size", "pin_bolt_min_length_" + K);
}

void housing_block(SchemaBuilder& b, const std::string& envelope) {
  b.dep("gear_envelope_diameter", envelope);
  b.dep("housing_inner_diameter", "gear_envelope_diameter+2*housing_radial_clearance");
  b.dep("housing_outer_diameter", "housing_inner_diameter+2*wall_thickness");
  b.dep("housing_bolt_circle_diameter", "housing_outer_diameter+2*housing_bolt_size");
  b.dep("cover_diameter", "housing_outer_diameter");
  b.dep("actuator_width", "gearbox_width+motor_stack_length+2*wall_thickness");
  b.dep("housing_bolt_min_length", "gearbox_width+2*flange_thickness");
  b.fastener("housing_bolt", "housing_bolt_size", "housing_bolt_min_length");
  b.dep("motor_bolt_min_length", "flange_thickness+motor_bolt_engagement");
  b.fastener("motor_bolt", "motor_bolt_size", "motor_bolt_min_length");
}

void diameter_block(SchemaBuilder& b, const std::string& constrained) {
  b.dep("max_gearbox_diameter", "diameter_factor*motor_outer_diameter");
  b.dep("constrained_diameter", constrained);
  b.dep("diameter_margin", "max_gearbox_diameter-constrained_diameter");
}

// Compound planet stage 2 (planet 2 meshing ring 2) of CPG and WPG.
void compound_second_stage(SchemaBuilder& b) {
  gear(b, "planet", 2, "N_p2", false);
  gear(b, "ring", 2, "N_r2", true);
  tooth_block(b, 2);
  b.dep("center_distance_2", "module_2*(N_r2-N_p2)/2");
  b.dep("eta_planet_ring_2", "1-friction_factor*(1/N_p2-1/N_r2)", Unit::dimensionless);
  b.dep("lewis_y_planet_2", "lewis_y0-lewis_y1/N_p2", Unit::dimensionless);
}

// Stage 1 of CPG (no ring) and WPG (with ring 1).
void compound_first_stage(SchemaBuilder& b, bool ring) {
  gear(b, "sun", 1, "N_s1", false);
  gear(b, "planet", 1, "N_p1", false);
  if (ring) gear(b, "ring", 1, "N_r1", true);
  tooth_block(b, 1);
  b.dep("center_distance_1", "module_1*(N_s1+N_p1)/2");
  b.dep("pin_circle_diameter_1", "2*center_distance_1");
  b.dep("planet_spacing_1", "360/n_p1", Unit::deg);
  b.dep("extrusion_clearance_1",
        "(sun_1_pitch_diameter+planet_1_pitch_diameter)*sin(pi/(interference_divisor*n_p1))-planet_1_pitch_diameter/"
        "2-carrier_extrusion_radius");
  b.dep("eta_sun_planet_1", "1-friction_factor*(1/N_s1+1/N_p1)", Unit::dimensionless);
  if (ring) b.dep("eta_planet_ring_1", "1-friction_factor*(1/N_p1-1/N_r1)", Unit::dimensionless);
  b.dep("sun_mesh_force_1", "2000*motor_peak_torque/(module_1*N_s1*n_p1)", Unit::dimensionless);
  b.dep("lewis_y_sun_1", "lewis_y0-lewis_y1/min(N_s1,N_p1)", Unit::dimensionless);
  b.dep("lewis_y_planet_1", "lewis_y0-lewis_y1/N_p1", Unit::dimensionless);
}

}  // namespace

DimensionSchema core_schema(std::optional<Topology> topology) {
  SchemaBuilder b(topology);
  for (std::size_t i = 0; i < variable_names().size(); ++i) b.var(variable_names()[i], i == 6 || i == 7 ? Unit::mm : Unit::count);
  fixed_block(b);
  b.dep("planet_pin_diameter", "pin_bolt_size+2*pin_sleeve_wall");
  if (!topology) {
    b.dep("gearbox_width", "0");
    housing_block(b, "motor_outer_diameter");
    return b.take();
  }
  switch (*topology) {
    case Topology::sspg:
      simple_stage(b, 1, "motor_peak_torque");
      b.dep("gear_ratio", "stage_ratio_1", Unit::dimensionless);
      b.dep("gearbox_width", "face_width_1+2*axial_clearance+carrier_plate_thickness");
      carrier_block(b, 1, "face_width_1");
      diameter_block(b, "ring_1_pitch_diameter+ring_radial_width");
      b.dep("output_bearing_min_bore", "max(motor_shaft_diameter+2*wall_thickness, center_distance_1)");
      housing_block(b, "ring_1_outer_diameter");
      break;
    case Topology::dspg:
      simple_stage(b, 1, "motor_peak_torque");
      simple_stage(b, 2, "motor_peak_torque*stage_ratio_1");
      b.dep("gear_ratio", "stage_ratio_1*stage_ratio_2", Unit::dimensionless);
      b.dep("gearbox_width", "face_width_1+face_width_2+4*axial_clearance+2*carrier_plate_thickness");
      carrier_block(b, 1, "face_width_1");
      carrier_block(b, 2, "face_width_2");
      diameter_block(b, "max(ring_1_pitch_diameter, ring_2_pitch_diameter)+ring_radial_width");
      b.dep("output_bearing_min_bore", "max(motor_shaft_diameter+2*wall_thickness, center_distance_2)");
      housing_block(b, "max(ring_1_outer_diameter, ring_2_outer_diameter)");
      break;
    case Topology::cpg:
      compound_first_stage(b, false);
      compound_second_stage(b);
      b.dep("gear_ratio", "(N_s1+N_p1)*(N_p2+N_p1)/(N_s1*N_p2)", Unit::dimensionless);
      b.dep("ring_mesh_force_2", "2000*(motor_peak_torque*(gear_ratio-1))/(module_2*N_r2*n_p2)", Unit::dimensionless);
      b.dep("face_width_1", lewis("sun_mesh_force_1", "module_1", "lewis_y_sun_1"));
      b.dep("face_width_2", lewis("ring_mesh_force_2", "module_2", "lewis_y_planet_2"));
      b.dep("gearbox_width", "face_width_1+compound_land+face_width_2+2*axial_clearance+carrier_plate_thickness");
      carrier_block(b, 1, "face_width_1+compound_land+face_width_2");
      b.dep("planet_envelope_diameter", "module_1*(N_s1+2*N_p1)");
      diameter_block(b, "planet_envelope_diameter");
      b.dep("output_bearing_min_bore", "max(motor_shaft_diameter+2*wall_thickness, center_distance_1)");
      housing_block(b, "max(planet_envelope_diameter, ring_2_outer_diameter)");
      break;
    case Topology::wpg:
      compound_first_stage(b, true);
      compound_second_stage(b);
      b.dep("wolfrom_i1", "N_r1/N_s1", Unit::dimensionless);
      b.dep("wolfrom_i2", "N_r1*N_p2/(N_p1*N_r2)", Unit::dimensionless);
      b.dep("gear_ratio_signed", "(1+wolfrom_i1)/(1-wolfrom_i2)", Unit::dimensionless);
      b.dep("gear_ratio", "abs(gear_ratio_signed)", Unit::dimensionless);
      b.dep("ring_mesh_force_1", "2000*(motor_peak_torque*abs(gear_ratio_signed-1))/(module_1*N_r1*n_p1)",
            Unit::dimensionless);
      b.dep("ring_mesh_force_2", "2000*(motor_peak_torque*abs(gear_ratio_signed))/(module_2*N_r2*n_p2)",
            Unit::dimensionless);
      b.dep("face_width_1", "max(" + lewis("sun_mesh_force_1", "module_1", "lewis_y_sun_1") + ", " +
                                lewis("ring_mesh_force_1", "module_1", "lewis_y_planet_1") + ")");
      b.dep("face_width_2", lewis("ring_mesh_force_2", "module_2", "lewis_y_planet_2"));
      b.dep("gearbox_width", "face_width_1+compound_land+face_width_2+2*axial_clearance+carrier_plate_thickness");
      carrier_block(b, 1, "face_width_1+compound_land+face_width_2");
      diameter_block(b, "max(ring_1_pitch_diameter, ring_2_pitch_diameter)+ring_radial_width");
      // The output ring runs in its own bearing.
      b.dep("output_bearing_min_bore", "ring_2_outer_diameter");
      housing_block(b, "max(ring_1_outer_diameter, ring_2_outer_diameter)");
      break;
  }
  b.bearing("output_bearing", "output_bearing_min_bore");
  return b.take();
}

DimensionSchema layout_schema(const GearboxDesign& design, const MotorSpec& motor, const LayoutParams& layout) {
  require_valid_topology(design);
  DimensionSchema schema = core_schema(design.topology);
  auto dep = [&](std::string name, std::string expr, Unit u = Unit::mm) {
    schema.defs.push_back({std::move(name), u, DimensionSource::expression, std::move(expr), {}});
  };
  auto ring_of_points = [&](const std::string& prefix, int count, const std::string& circle, const std::string& phase) {
    for (int i = 1; i <= count; ++i) {
      const std::string p = prefix + "_" + s(i) + "_";
      dep(p + "angle", "360*" + s(i - 1) + "/" + s(count) + phase, Unit::deg);
      dep(p + "x", circle + "/2*cos(" + p + "angle*pi/180)");
      dep(p + "y", circle + "/2*sin(" + p + "angle*pi/180)");
    }
  };
  ring_of_points("planet_1", design.stage1.planets, "pin_circle_diameter_1", "");
  if (design.topology == Topology::dspg) ring_of_points("planet_2", design.stage2.planets, "pin_circle_diameter_2", "");
  ring_of_points("housing_bolt", layout.housing_bolt_count, "housing_bolt_circle_diameter",
                 "+180/" + s(layout.housing_bolt_count));
  ring_of_points("motor_bolt", motor.bolt_count, "motor_bolt_circle_diameter", "");
  return schema;
}

std::map<std::string, double> fixed_dimension_values(const MotorSpec& motor, const SizingParams& sizing,
                                                     const ConstraintParams& constraints,
                                                     const MeshEfficiencyModel& mesh, const LayoutParams& layout) {
  return {
      {"motor_outer_diameter", motor.outer_diameter},
      {"motor_stack_length", motor.stack_length},
      {"motor_shaft_diameter", motor.shaft_diameter},
      {"motor_bolt_circle_diameter", motor.bolt_circle_diameter},
      {"motor_bolt_count", motor.bolt_count},
      {"motor_peak_torque", motor.peak_torque},
      {"allowable_stress", sizing.allowable_stress},
      {"safety_factor", sizing.safety_factor},
      {"lewis_y0", sizing.lewis_y0},
      {"lewis_y1", sizing.lewis_y1},
      {"min_face_width", sizing.min_face_width},
      {"max_face_width", sizing.max_face_width},
      {"axial_clearance", sizing.axial_clearance},
      {"wall_thickness", sizing.wall_thickness},
      {"carrier_plate_thickness", sizing.carrier_plate_thickness},
      {"compound_land", sizing.compound_land},
      {"ring_radial_width", constraints.ring_radial_width},
      {"carrier_extrusion_radius", constraints.carrier_extrusion_radius},
      {"min_clearance", constraints.min_clearance},
      {"diameter_factor", constraints.diameter_factor},
      {"interference_divisor", constraints.interference == InterferenceRule::printed ? 2.0 : 1.0},
      {"friction_factor", mesh.friction_factor},
      {"pressure_angle", layout.pressure_angle},
      {"flange_thickness", layout.flange_thickness},
      {"housing_radial_clearance", layout.housing_radial_clearance},
      {"housing_bolt_count", layout.housing_bolt_count},
      {"housing_bolt_size", layout.housing_bolt_diameter},
      {"pin_bolt_size", layout.pin_bolt_diameter},
      {"pin_sleeve_wall", layout.pin_sleeve_wall},
      {"motor_bolt_size", layout.motor_bolt_diameter},
      {"motor_bolt_engagement", layout.motor_bolt_engagement},
  };
}

WidthOverride WidthOverride::from(const WidthBreakdown& w) {
  WidthOverride o;
  if (!w.stage_face_widths.empty()) o.face_width_1 = w.stage_face_widths[0];
  if (w.stage_face_widths.size() > 1) o.face_width_2 = w.stage_face_widths[1];
  o.gearbox_width = w.gearbox_width;
  o.actuator_width = w.actuator_width;
  return o;
}

DimensionProgram::DimensionProgram(const DimensionSchema& schema, const std::map<std::string, double>& fixed,
                                   const Catalog& catalog)
    : topology_(schema.topology), catalog_(&catalog) {
  auto define = [&](const std::string& name, DimensionGroup g, Unit u, std::string expr) {
    if (slots_.find(name) >= 0) throw ExpressionError("dimension '" + name + "' defined twice");
    const int slot = slots_.add(name);
    meta_.push_back({g, u, std::move(expr)});
    base_.push_back(0.0);
    return slot;
  };
  int var_index = 0;
  for (const auto& def : schema.defs) {
    switch (def.source) {
      case DimensionSource::variable: {
        if (var_index >= 10 || variable_names()[static_cast<std::size_t>(var_index)] != def.name)
          throw ExpressionError("optimization variables must come first and in X order");
        variable_slot_[var_index++] = define(def.name, DimensionGroup::optimization, def.unit, {});
        break;
      }
      case DimensionSource::fixed: {
        auto it = fixed.find(def.name);
        if (it == fixed.end()) throw ExpressionError("missing fixed dimension '" + def.name + "'");
        const int slot = define(def.name, DimensionGroup::fixed, def.unit, {});
        base_[static_cast<std::size_t>(slot)] = it->second;
        break;
      }
      case DimensionSource::expression: {
        Step step;
        step.source = DimensionSource::expression;
        step.expr = CompiledExpression(Expression::parse(def.expression), slots_);
        step.slot = define(def.name, DimensionGroup::dependent, def.unit, def.expression);
        steps_.push_back(std::move(step));
        break;
      }
      case DimensionSource::bearing:
      case DimensionSource::fastener: {
        Step step;
        step.source = def.source;
        step.expr = CompiledExpression(Expression::parse(def.expression), slots_);
        step.part = static_cast<int>(part_names_.size());
        part_names_.push_back(def.name);
        if (def.source == DimensionSource::bearing) {
          step.slot = define(def.name + "_bore", DimensionGroup::fixed, Unit::mm, {});
          define(def.name + "_outer_diameter", DimensionGroup::fixed, Unit::mm, {});
          define(def.name + "_width", DimensionGroup::fixed, Unit::mm, {});
        } else {
          const int dslot = slots_.at(def.argument);
          if (meta_[static_cast<std::size_t>(dslot)].group != DimensionGroup::fixed)
            throw ExpressionError("fastener diameter '" + def.argument + "' must be a fixed dimension");
          step.diameter = base_[static_cast<std::size_t>(dslot)];
          step.slot = define(def.name + "_diameter", DimensionGroup::fixed, Unit::mm, {});
          define(def.name + "_length", DimensionGroup::fixed, Unit::mm, {});
        }
        steps_.push_back(std::move(step));
        break;
      }
    }
  }
  if (var_index != 10) throw ExpressionError("schema must define all ten optimization variables");
  const char* overridable[4] = {"face_width_1", "face_width_2", "gearbox_width", "actuator_width"};
  for (int i = 0; i < 4; ++i) override_slot_[i] = slots_.find(overridable[i]);
  for (auto& step : steps_) {
    for (int i = 0; i < 4; ++i)
      if (step.source == DimensionSource::expression && override_slot_[i] == step.slot) step.override_index = i;
  }
}

void DimensionProgram::load(const GearboxDesign& design, std::span<double> values,
                            std::span<PartChoice> parts) const {
  if (values.size() < size() || parts.size() < part_count()) throw Error("dimension buffer too small");
  if (topology_) {
    if (design.topology != *topology_) throw DesignError("design topology does not match the dimension schema");
  } else if (design.has_stages()) {
    throw DesignError("housing-only schema needs a design without stages");
  }
  std::copy(base_.begin(), base_.end(), values.begin());
  const VariableVector x = design.variables();
  for (int i = 0; i < 10; ++i) {
    double v = static_cast<double>(x[static_cast<std::size_t>(i)]);
    if (i == 6 || i == 7) v /= 1000.0;  // modules in mm
    values[static_cast<std::size_t>(variable_slot_[i])] = v;
  }
}

void DimensionProgram::run(const Step& step, const std::optional<double>* const* imposed, std::span<double> values,
                           std::span<PartChoice> parts) const {
  const auto slot = static_cast<std::size_t>(step.slot);
  switch (step.source) {
    case DimensionSource::expression:
      if (step.override_index >= 0 && imposed[step.override_index]->has_value())
        values[slot] = **imposed[step.override_index];
      else
        values[slot] = step.expr.evaluate(values);
      break;
    case DimensionSource::bearing: {
      const BearingEntry& b = catalog_->select_bearing(step.expr.evaluate(values));
      values[slot] = b.bore;
      values[slot + 1] = b.outer_diameter;
      values[slot + 2] = b.width;
      PartChoice& pc = parts[static_cast<std::size_t>(step.part)];
      pc.bearing = &b;
      pc.fastener = nullptr;
      break;
    }
    case DimensionSource::fastener: {
      const FastenerEntry& f = catalog_->select_fastener(step.diameter, step.expr.evaluate(values));
      values[slot] = f.nominal_diameter;
      values[slot + 1] = f.length;
      PartChoice& pc = parts[static_cast<std::size_t>(step.part)];
      pc.fastener = &f;
      pc.bearing = nullptr;
      break;
    }
    default:
      break;
  }
}

void DimensionProgram::evaluate(const GearboxDesign& design, const WidthOverride& overrides, std::span<double> values,
                                std::span<PartChoice> parts) const {
  load(design, values, parts);
  const std::optional<double>* imposed[4] = {&overrides.face_width_1, &overrides.face_width_2,
                                             &overrides.gearbox_width, &overrides.actuator_width};
  for (const auto& step : steps_) run(step, imposed, values, parts);
}

void DimensionProgram::evaluate(const Plan& plan, const GearboxDesign& design, const WidthOverride& overrides,
                                std::span<double> values, std::span<PartChoice> parts) const {
  if (plan.needs_overrides && !covers(overrides)) throw Error("plan needs every width override");
  load(design, values, parts);
  const std::optional<double>* imposed[4] = {&overrides.face_width_1, &overrides.face_width_2,
                                             &overrides.gearbox_width, &overrides.actuator_width};
  for (std::size_t i : plan.steps) run(steps_[i], imposed, values, parts);
}

bool DimensionProgram::covers(const WidthOverride& o) const noexcept {
  const std::optional<double>* imposed[4] = {&o.face_width_1, &o.face_width_2, &o.gearbox_width, &o.actuator_width};
  for (int i = 0; i < 4; ++i)
    if (override_slot_[i] >= 0 && !imposed[i]->has_value()) return false;
  return true;
}

DimensionProgram::Plan DimensionProgram::plan(const std::vector<int>& slots, const std::vector<int>& parts,
                                              bool imposed_widths) const {
  std::vector<char> need(size(), 0);
  for (int s : slots) need.at(static_cast<std::size_t>(s)) = 1;
  std::vector<char> keep(steps_.size(), 0);
  for (std::size_t i = steps_.size(); i-- > 0;) {
    const Step& step = steps_[i];
    const auto slot = static_cast<std::size_t>(step.slot);
    bool wanted = false;
    switch (step.source) {
      case DimensionSource::expression: wanted = need[slot]; break;
      case DimensionSource::bearing: wanted = need[slot] || need[slot + 1] || need[slot + 2]; break;
      case DimensionSource::fastener: wanted = need[slot] || need[slot + 1]; break;
      default: break;
    }
    if (step.part >= 0 && std::find(parts.begin(), parts.end(), step.part) != parts.end()) wanted = true;
    if (!wanted) continue;
    keep[i] = 1;
    if (imposed_widths && step.override_index >= 0) continue;
    for (int s : step.expr.slots()) need[static_cast<std::size_t>(s)] = 1;
  }
  Plan p;
  p.needs_overrides = imposed_widths;
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    if (!keep[i]) continue;
    p.steps.push_back(i);
    if (steps_[i].part >= 0) p.uses_parts = true;
  }
  return p;
}

double DimensionValues::at(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return values[i];
  throw ExpressionError("unknown dimension '" + std::string(name) + "'");
}

DimensionValues evaluate_dimensions(const DimensionProgram& program, const GearboxDesign& design,
                                    const WidthOverride& overrides) {
  DimensionValues out;
  out.values.resize(program.size());
  out.parts.resize(program.part_count());
  program.evaluate(design, overrides, out.values, out.parts);
  out.names = program.slots().names();
  for (std::size_t i = 0; i < program.size(); ++i) {
    out.groups.push_back(program.group(static_cast<int>(i)));
    out.units.push_back(program.unit(static_cast<int>(i)));
  }
  for (std::size_t i = 0; i < out.parts.size(); ++i) out.parts[i].name = program.part_names()[i];
  return out;
}

}  // namespace planetopt
