#include "planetopt/catalog.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace planetopt {

namespace {

void require_positive(double v, std::string_view what, std::string_view entry, std::string_view field) {
  if (!std::isfinite(v) || v <= 0.0) {
    std::ostringstream os;
    os << what << " '" << entry << "': field '" << field << "' must be positive (got " << v << ")";
    throw CatalogError(os.str());
  }
}

}  // namespace

void MotorSpec::validate() const {
  if (name.empty()) throw CatalogError("motor with empty name");
  require_positive(outer_diameter, "motor", name, "outer_diameter");
  require_positive(stack_length, "motor", name, "stack_length");
  require_positive(mass, "motor", name, "mass");
  require_positive(peak_torque, "motor", name, "peak_torque");
  require_positive(shaft_diameter, "motor", name, "shaft_diameter");
  require_positive(bolt_circle_diameter, "motor", name, "bolt_circle_diameter");
  if (bolt_count < 3) throw CatalogError("motor '" + name + "': field 'bolt_count' must be >= 3");
}

void BearingEntry::validate() const {
  if (designation.empty()) throw CatalogError("bearing with empty designation");
  require_positive(bore, "bearing", designation, "bore");
  require_positive(outer_diameter, "bearing", designation, "outer_diameter");
  require_positive(width, "bearing", designation, "width");
  require_positive(mass, "bearing", designation, "mass");
  if (bore >= outer_diameter) throw CatalogError("bearing '" + designation + "': field 'bore' must be below outer_diameter");
}

void FastenerEntry::validate() const {
  if (designation.empty()) throw CatalogError("fastener with empty designation");
  require_positive(nominal_diameter, "fastener", designation, "nominal_diameter");
  require_positive(length, "fastener", designation, "length");
  require_positive(mass, "fastener", designation, "mass");
}

void Material::validate() const {
  if (name.empty()) throw CatalogError("material with empty name");
  require_positive(density, "material", name, "density");
  require_positive(allowable_bending_stress, "material", name, "allowable_bending_stress");
}

Catalog::Catalog(std::vector<MotorSpec> motors, std::vector<BearingEntry> bearings,
                 std::vector<FastenerEntry> fasteners, std::vector<Material> materials)
    : motors_(std::move(motors)),
      bearings_(std::move(bearings)),
      fasteners_(std::move(fasteners)),
      materials_(std::move(materials)) {
  for (const auto& m : motors_) m.validate();
  for (const auto& b : bearings_) b.validate();
  for (const auto& f : fasteners_) f.validate();
  for (const auto& m : materials_) m.validate();
  index();
}

void Catalog::index() {
  auto lighter = [](const BearingEntry& a, const BearingEntry& b) {
    if (a.mass != b.mass) return a.mass < b.mass;
    return a.designation < b.designation;
  };
  std::sort(bearings_.begin(), bearings_.end(), [](const BearingEntry& a, const BearingEntry& b) {
    if (a.bore != b.bore) return a.bore < b.bore;
    return a.designation < b.designation;
  });
  best_from_.assign(bearings_.size(), 0);
  for (std::size_t i = bearings_.size(); i-- > 0;) {
    best_from_[i] = i;
    if (i + 1 < bearings_.size() && lighter(bearings_[best_from_[i + 1]], bearings_[i])) best_from_[i] = best_from_[i + 1];
  }
  std::sort(fasteners_.begin(), fasteners_.end(), [](const FastenerEntry& a, const FastenerEntry& b) {
    if (a.mass != b.mass) return a.mass < b.mass;
    return a.designation < b.designation;
  });
}

const MotorSpec& Catalog::motor(std::string_view name) const {
  for (const auto& m : motors_)
    if (m.name == name) return m;
  throw CatalogError("unknown motor '" + std::string(name) + "'");
}

const Material& Catalog::material(std::string_view name) const {
  for (const auto& m : materials_)
    if (m.name == name) return m;
  throw CatalogError("unknown material '" + std::string(name) + "'");
}

const BearingEntry& Catalog::bearing(std::string_view designation) const {
  for (const auto& b : bearings_)
    if (b.designation == designation) return b;
  throw CatalogError("unknown bearing '" + std::string(designation) + "'");
}

const FastenerEntry& Catalog::fastener(std::string_view designation) const {
  for (const auto& f : fasteners_)
    if (f.designation == designation) return f;
  throw CatalogError("unknown fastener '" + std::string(designation) + "'");
}

const BearingEntry& Catalog::select_bearing(double bore_required) const {
  constexpr double kTol = 1e-9;
  auto it = std::lower_bound(bearings_.begin(), bearings_.end(), bore_required - kTol,
                             [](const BearingEntry& b, double bore) { return b.bore < bore; });
  if (it == bearings_.end()) {
    std::ostringstream os;
    os << "no bearing with bore >= " << bore_required << " mm in catalog";
    throw InfeasibleDesign(os.str());
  }
  return bearings_[best_from_[static_cast<std::size_t>(it - bearings_.begin())]];
}

const FastenerEntry& Catalog::select_fastener(double nominal_diameter, double min_length) const {
  constexpr double kTol = 1e-9;
  for (const auto& f : fasteners_) {  // mass order
    if (std::fabs(f.nominal_diameter - nominal_diameter) < kTol && f.length >= min_length - kTol) return f;
  }
  std::ostringstream os;
  os << "no M" << nominal_diameter << " fastener with length >= " << min_length << " mm in catalog";
  throw InfeasibleDesign(os.str());
}

const BearingEntry& select_bearing(double bore_required, const Catalog& catalog) {
  return catalog.select_bearing(bore_required);
}

// -----------------------------
// YAML loading
// -----------------------------
namespace {

struct Parts {
  std::vector<MotorSpec> motors;
  std::vector<BearingEntry> bearings;
  std::vector<FastenerEntry> fasteners;
  std::vector<Material> materials;
};

std::string entry_label(const YAML::Node& n, const char* key) {
  if (n[key] && n[key].IsScalar()) return n[key].as<std::string>();
  return "<unnamed>";
}

template <typename T>
T field(const YAML::Node& n, const char* key, std::string_view kind, std::string_view label) {
  const YAML::Node v = n[key];
  if (!v) throw CatalogError(std::string(kind) + " '" + std::string(label) + "': missing field '" + key + "'");
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    throw CatalogError(std::string(kind) + " '" + std::string(label) + "': field '" + key + "' has the wrong type");
  }
}

void parse_into(const YAML::Node& root, Parts& out, std::string_view source) {
  if (!root || root.IsNull() || !root.IsMap())
    throw CatalogError("catalog parse error in " + std::string(source) + ": expected a mapping of entry lists");
  auto seq = [&](const char* key) {
    YAML::Node n = root[key];
    if (n && !n.IsSequence())
      throw CatalogError("catalog parse error in " + std::string(source) + ": '" + key + "' must be a list");
    return n;
  };
  if (auto n = seq("motors")) {
    for (const auto& e : n) {
      const auto label = entry_label(e, "name");
      MotorSpec m;
      m.name = field<std::string>(e, "name", "motor", label);
      m.outer_diameter = field<double>(e, "outer_diameter", "motor", label);
      m.stack_length = field<double>(e, "stack_length", "motor", label);
      m.mass = field<double>(e, "mass", "motor", label);
      m.peak_torque = field<double>(e, "peak_torque", "motor", label);
      m.shaft_diameter = field<double>(e, "shaft_diameter", "motor", label);
      m.bolt_circle_diameter = field<double>(e, "bolt_circle_diameter", "motor", label);
      m.bolt_count = field<int>(e, "bolt_count", "motor", label);
      out.motors.push_back(std::move(m));
    }
  }
  if (auto n = seq("bearings")) {
    for (const auto& e : n) {
      const auto label = entry_label(e, "designation");
      BearingEntry b;
      b.designation = field<std::string>(e, "designation", "bearing", label);
      b.bore = field<double>(e, "bore", "bearing", label);
      b.outer_diameter = field<double>(e, "outer_diameter", "bearing", label);
      b.width = field<double>(e, "width", "bearing", label);
      b.mass = field<double>(e, "mass", "bearing", label);
      out.bearings.push_back(std::move(b));
    }
  }
  if (auto n = seq("fasteners")) {
    for (const auto& e : n) {
      const auto label = entry_label(e, "designation");
      FastenerEntry f;
      f.designation = field<std::string>(e, "designation", "fastener", label);
      f.nominal_diameter = field<double>(e, "nominal_diameter", "fastener", label);
      f.length = field<double>(e, "length", "fastener", label);
      f.mass = field<double>(e, "mass", "fastener", label);
      out.fasteners.push_back(std::move(f));
    }
  }
  if (auto n = seq("materials")) {
    for (const auto& e : n) {
      const auto label = entry_label(e, "name");
      Material m;
      m.name = field<std::string>(e, "name", "material", label);
      m.density = field<double>(e, "density", "material", label);
      m.allowable_bending_stress = field<double>(e, "allowable_bending_stress", "material", label);
      out.materials.push_back(std::move(m));
    }
  }
}

YAML::Node parse_yaml(std::string_view text, std::string_view source) {
  try {
    return YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw CatalogError("catalog parse error in " + std::string(source) + ": " + e.what());
  }
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw CatalogError("cannot open catalog file " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Catalog finish(Parts parts, std::string_view source) {
  if (parts.motors.empty()) throw CatalogError("catalog " + std::string(source) + " has no motors");
  if (parts.bearings.empty()) throw CatalogError("catalog " + std::string(source) + " has no bearings");
  if (parts.materials.empty()) throw CatalogError("catalog " + std::string(source) + " has no materials");
  return Catalog(std::move(parts.motors), std::move(parts.bearings), std::move(parts.fasteners),
                 std::move(parts.materials));
}

}  // namespace

Catalog parse_catalog(std::string_view text, std::string_view source) {
  Parts parts;
  parse_into(parse_yaml(text, source), parts, source);
  return finish(std::move(parts), source);
}

Catalog load_catalog(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  if (!fs::exists(path)) throw CatalogError("catalog path does not exist: " + path.string());
  Parts parts;
  if (fs::is_directory(path)) {
    for (const char* name : {"motors.yaml", "parts.yaml", "materials.yaml"}) {
      const fs::path file = path / name;
      if (!fs::exists(file)) throw CatalogError("catalog directory is missing " + file.string());
      parse_into(parse_yaml(read_file(file), file.string()), parts, file.string());
    }
  } else {
    parse_into(parse_yaml(read_file(path), path.string()), parts, path.string());
  }
  return finish(std::move(parts), path.string());
}

}  // namespace planetopt
