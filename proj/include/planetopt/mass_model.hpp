#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "planetopt/catalog.hpp"
#include "planetopt/design.hpp"
#include "planetopt/dimensions.hpp"
#include "planetopt/sizing.hpp"

namespace planetopt {

enum class PrimitiveKind { solid_cylinder, hollow_cylinder, cone };

std::string_view to_string(PrimitiveKind k) noexcept;
std::optional<PrimitiveKind> parse_primitive(std::string_view s) noexcept;

// Lengths in mm. A cone uses outer_diameter as its base.
struct GeometryPrimitive {
  PrimitiveKind kind = PrimitiveKind::solid_cylinder;
  double outer_diameter = 0.0;
  double inner_diameter = 0.0;
  double height = 0.0;
  const Material* material = nullptr;

  void validate() const;
};

// kg
double primitive_mass(const GeometryPrimitive& p);

enum class GearRole { sun, planet, ring };

// Sun and planet: solid cylinder on the pitch circle. Ring: shell from the pitch circle out by
// ring_radial_width on each side.
double gear_mass(const GearStage& stage, GearRole role, double face_width, const Material& material,
                 double ring_radial_width = 5.0);

// One line of the component template. Either a primitive with dimension expressions or a catalog
// part picked by the dimension schema. `count` is an expression; `per_planet` multiplies by the
// planet count of that stage (0: not per planet).
struct ComponentTemplate {
  std::string name;
  std::optional<PrimitiveKind> primitive;
  std::string outer_diameter;
  std::string inner_diameter = "0";
  std::string height;
  std::string material;
  std::string part;
  std::string count = "1";
  int per_planet = 0;
};

struct MassTemplate {
  std::vector<ComponentTemplate> common;  // every actuator, including one without gear stages
  std::map<Topology, std::vector<ComponentTemplate>> topologies;

  const std::vector<ComponentTemplate>& for_topology(Topology t) const;
};

MassTemplate parse_mass_template(std::string_view text, std::string_view source = "<string>");
MassTemplate load_mass_template(const std::filesystem::path& path);

struct ComponentMass {
  std::string name;
  double unit_mass = 0.0;  // kg
  int count = 0;
  double mass = 0.0;  // unit_mass * count
  int per_planet_stage = 0;
  std::string part;  // catalog designation for parts
};

struct MassBreakdown {
  std::vector<ComponentMass> components;  // template order
  double gearbox_mass = 0.0;              // sum of components, in order
  double motor_mass = 0.0;
  double total = 0.0;  // gearbox_mass + motor_mass

  std::map<std::string, double> per_component() const;
};

// Component template compiled against one motor, catalog and parameter set.
class MassModel {
 public:
  struct Scratch {
    std::vector<double> values;
    std::vector<PartChoice> parts;
  };

  MassModel(const MassTemplate& tmpl, const Catalog& catalog, const MotorSpec& motor,
            const std::map<std::string, double>& fixed);
  ~MassModel();
  MassModel(MassModel&&) noexcept;
  MassModel& operator=(MassModel&&) noexcept;

  // Total actuator mass under the given widths; allocation free once the scratch is warm.
  double total(const GearboxDesign& design, const WidthOverride& widths, Scratch& scratch) const;
  MassBreakdown breakdown(const GearboxDesign& design, const WidthOverride& widths) const;
  // Motor plus every component that needs no catalog pick; never above total(). Cheap enough to
  // screen candidates before the full evaluation. `quick` keeps only components read almost
  // directly off X and the widths (the gear blanks in the shipped template).
  double lower_bound(const GearboxDesign& design, const WidthOverride& widths, Scratch& scratch,
                     bool quick = false) const;

  // nullopt: the housing-only program.
  const DimensionProgram& program(std::optional<Topology> t) const;

 private:
  struct Compiled;
  std::unique_ptr<Compiled> impl_;
};

// Mass of `design` with `widths` as sized; a design without stages gives motor plus housing.
MassBreakdown actuator_mass(const GearboxDesign& design, const WidthBreakdown& widths, const MassModel& model);

}  // namespace planetopt
