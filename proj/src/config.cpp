#include "planetopt/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#ifndef PLANETOPT_DATA_DIR
#define PLANETOPT_DATA_DIR "data"
#endif

namespace planetopt {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) { throw Error("config " + where + ": " + what); }

void only_keys(const YAML::Node& n, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!n.IsMap()) bad(where, "expected a mapping");
  for (const auto& kv : n) {
    const std::string key = kv.first.Scalar();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) bad(where, "unknown key '" + key + "'");
  }
}

template <typename T>
void read(const YAML::Node& n, const char* key, T& out, const std::string& where) {
  if (!n[key]) return;
  try {
    out = n[key].as<T>();
  } catch (const YAML::Exception&) {
    bad(where + "." + key, "wrong type");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

}  // namespace

void RunConfig::validate() const {
  constraints.validate();
  sizing.validate();
  mesh.validate();
  layout.validate();
  weights.validate();
  if (workers < 0) throw Error("config: workers must be >= 0");
  if (sweep_min < 1 || sweep_min >= sweep_max) throw Error("config: sweep needs 1 <= min < max");
}

RunConfig default_config() {
  RunConfig c;
  c.catalog = PLANETOPT_DATA_DIR;
  c.components = std::filesystem::path(PLANETOPT_DATA_DIR) / "components.yaml";
  c.constraints.diameter_factor = 1.25;
  const auto shipped = std::filesystem::path(PLANETOPT_DATA_DIR) / "config.yaml";
  if (std::filesystem::exists(shipped)) c = load_config(shipped, c);
  c.output = "out";  // relative to the working directory, not the data tree
  return c;
}

RunConfig parse_config(std::string_view yaml, const std::filesystem::path& base_dir, RunConfig c) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml));
  } catch (const YAML::Exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  if (root.IsNull()) return c;
  only_keys(root, "root",
            {"catalog", "components", "motor", "workers", "output", "constraints", "sizing", "mesh", "layout", "weights",
             "sweep"});
  std::string s;
  if (root["catalog"]) c.catalog = resolve(base_dir, root["catalog"].as<std::string>());
  if (root["components"]) c.components = resolve(base_dir, root["components"].as<std::string>());
  if (root["output"]) c.output = resolve(base_dir, root["output"].as<std::string>());
  read(root, "motor", c.motor, "root");
  read(root, "workers", c.workers, "root");

  if (const auto n = root["constraints"]) {
    const std::string w = "constraints";
    only_keys(n, w,
              {"gr_min", "gr_max", "carrier_extrusion_radius", "min_clearance", "ring_radial_width", "diameter_factor",
               "modules", "min_teeth", "max_teeth", "min_planets", "max_planets", "interference", "ring_order"});
    auto& p = c.constraints;
    read(n, "gr_min", p.gr_min, w);
    read(n, "gr_max", p.gr_max, w);
    read(n, "carrier_extrusion_radius", p.carrier_extrusion_radius, w);
    read(n, "min_clearance", p.min_clearance, w);
    read(n, "ring_radial_width", p.ring_radial_width, w);
    read(n, "diameter_factor", p.diameter_factor, w);
    read(n, "min_teeth", p.min_teeth, w);
    read(n, "max_teeth", p.max_teeth, w);
    read(n, "min_planets", p.min_planets, w);
    read(n, "max_planets", p.max_planets, w);
    if (n["modules"]) {
      std::vector<double> mm;
      read(n, "modules", mm, w);
      p.module_set.clear();
      for (double m : mm) p.module_set.push_back(Module::from_mm(m));
    }
    if (n["interference"]) {
      s = n["interference"].as<std::string>();
      if (s == "printed") p.interference = InterferenceRule::printed;
      else if (s == "classical") p.interference = InterferenceRule::classical;
      else bad(w + ".interference", "expected printed or classical");
    }
    if (n["ring_order"]) {
      s = n["ring_order"].as<std::string>();
      if (s == "strict") p.ring_order = RingOrderRule::strict;
      else if (s == "relaxed") p.ring_order = RingOrderRule::relaxed;
      else bad(w + ".ring_order", "expected strict or relaxed");
    }
  }
  if (const auto n = root["sizing"]) {
    const std::string w = "sizing";
    only_keys(n, w,
              {"allowable_stress", "safety_factor", "min_face_width", "max_face_width", "axial_clearance",
               "wall_thickness", "carrier_plate_thickness", "compound_land", "lewis_y0", "lewis_y1"});
    auto& p = c.sizing;
    read(n, "allowable_stress", p.allowable_stress, w);
    read(n, "safety_factor", p.safety_factor, w);
    read(n, "min_face_width", p.min_face_width, w);
    read(n, "max_face_width", p.max_face_width, w);
    read(n, "axial_clearance", p.axial_clearance, w);
    read(n, "wall_thickness", p.wall_thickness, w);
    read(n, "carrier_plate_thickness", p.carrier_plate_thickness, w);
    read(n, "compound_land", p.compound_land, w);
    read(n, "lewis_y0", p.lewis_y0, w);
    read(n, "lewis_y1", p.lewis_y1, w);
  }
  if (const auto n = root["mesh"]) {
    only_keys(n, "mesh", {"friction_factor"});
    read(n, "friction_factor", c.mesh.friction_factor, "mesh");
  }
  if (const auto n = root["layout"]) {
    const std::string w = "layout";
    only_keys(n, w,
              {"flange_thickness", "housing_radial_clearance", "housing_bolt_count", "housing_bolt_diameter",
               "pin_bolt_diameter", "motor_bolt_diameter", "motor_bolt_engagement", "pin_sleeve_wall",
               "pressure_angle"});
    auto& p = c.layout;
    read(n, "flange_thickness", p.flange_thickness, w);
    read(n, "housing_radial_clearance", p.housing_radial_clearance, w);
    read(n, "housing_bolt_count", p.housing_bolt_count, w);
    read(n, "housing_bolt_diameter", p.housing_bolt_diameter, w);
    read(n, "pin_bolt_diameter", p.pin_bolt_diameter, w);
    read(n, "motor_bolt_diameter", p.motor_bolt_diameter, w);
    read(n, "motor_bolt_engagement", p.motor_bolt_engagement, w);
    read(n, "pin_sleeve_wall", p.pin_sleeve_wall, w);
    read(n, "pressure_angle", p.pressure_angle, w);
  }
  if (const auto n = root["weights"]) {
    const std::string w = "weights";
    only_keys(n, w, {"mass", "efficiency", "width", "ratio", "target"});
    read(n, "mass", c.weights.mass, w);
    read(n, "efficiency", c.weights.efficiency, w);
    read(n, "width", c.weights.width, w);
    read(n, "ratio", c.weights.ratio, w);
    if (n["target"] && !n["target"].IsNull()) {
      double t = 0.0;
      read(n, "target", t, w);
      c.weights.target = t;
    }
  }
  if (const auto n = root["sweep"]) {
    only_keys(n, "sweep", {"min", "max"});
    read(n, "min", c.sweep_min, "sweep");
    read(n, "max", c.sweep_max, "sweep");
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path(), std::move(base));
}

void apply_ratio_target(RunConfig& c, double target, bool bounds_given) {
  c.weights.target = target;
  if (!bounds_given) {
    c.constraints.gr_min = target - 1.0;
    c.constraints.gr_max = target + 1.0;
  }
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["catalog"] = c.catalog.generic_string();
  j["components"] = c.components.generic_string();
  j["motor"] = c.motor;
  const auto& p = c.constraints;
  ordered_json modules = ordered_json::array();
  for (const auto& m : p.module_set) modules.push_back(m.mm());
  j["constraints"] = {{"gr_min", p.gr_min},
                      {"gr_max", p.gr_max},
                      {"carrier_extrusion_radius", p.carrier_extrusion_radius},
                      {"min_clearance", p.min_clearance},
                      {"ring_radial_width", p.ring_radial_width},
                      {"diameter_factor", p.diameter_factor},
                      {"modules", modules},
                      {"min_teeth", p.min_teeth},
                      {"max_teeth", p.max_teeth},
                      {"min_planets", p.min_planets},
                      {"max_planets", p.max_planets},
                      {"interference", std::string(to_string(p.interference))},
                      {"ring_order", std::string(to_string(p.ring_order))}};
  const auto& s = c.sizing;
  j["sizing"] = {{"allowable_stress", s.allowable_stress},
                 {"safety_factor", s.safety_factor},
                 {"min_face_width", s.min_face_width},
                 {"max_face_width", s.max_face_width},
                 {"axial_clearance", s.axial_clearance},
                 {"wall_thickness", s.wall_thickness},
                 {"carrier_plate_thickness", s.carrier_plate_thickness},
                 {"compound_land", s.compound_land},
                 {"lewis_y0", s.lewis_y0},
                 {"lewis_y1", s.lewis_y1}};
  j["mesh"] = {{"friction_factor", c.mesh.friction_factor}};
  const auto& l = c.layout;
  j["layout"] = {{"flange_thickness", l.flange_thickness},
                 {"housing_radial_clearance", l.housing_radial_clearance},
                 {"housing_bolt_count", l.housing_bolt_count},
                 {"housing_bolt_diameter", l.housing_bolt_diameter},
                 {"pin_bolt_diameter", l.pin_bolt_diameter},
                 {"motor_bolt_diameter", l.motor_bolt_diameter},
                 {"motor_bolt_engagement", l.motor_bolt_engagement},
                 {"pin_sleeve_wall", l.pin_sleeve_wall},
                 {"pressure_angle", l.pressure_angle}};
  j["weights"] = {{"mass", c.weights.mass},
                  {"efficiency", c.weights.efficiency},
                  {"width", c.weights.width},
                  {"ratio", c.weights.ratio},
                  {"target", c.weights.target ? ordered_json(*c.weights.target) : ordered_json(nullptr)}};
  j["workers"] = c.workers;
  j["sweep"] = {{"min", c.sweep_min}, {"max", c.sweep_max}};
  j["output"] = c.output.generic_string();
  return j;
}

ProblemSetup make_setup(const RunConfig& c) {
  c.validate();
  ProblemSetup s;
  s.catalog = load_catalog(c.catalog);
  s.motor = s.catalog.motor(c.motor);
  s.constraints = c.constraints;
  s.sizing = c.sizing;
  s.mesh = c.mesh;
  s.layout = c.layout;
  try {
    s.mass_template = load_mass_template(c.components);
  } catch (const CatalogError&) {
    throw;
  } catch (const Error& e) {
    throw CatalogError(e.what());
  }
  s.validate();
  return s;
}

}  // namespace planetopt
