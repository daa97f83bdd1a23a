#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "planetopt/catalog.hpp"
#include "planetopt/constraints.hpp"
#include "planetopt/design.hpp"
#include "planetopt/expression.hpp"
#include "planetopt/gear_kinematics.hpp"
#include "planetopt/sizing.hpp"

namespace planetopt {

enum class Unit { mm, deg, count, dimensionless };
enum class DimensionGroup { optimization, fixed, dependent };

std::string_view to_string(Unit u) noexcept;
std::string_view to_string(DimensionGroup g) noexcept;
std::optional<Unit> parse_unit(std::string_view s) noexcept;

// Housing and fastener allowances that only matter for mass and CAD. Lengths in mm.
struct LayoutParams {
  double flange_thickness = 5.0;
  double housing_radial_clearance = 1.0;
  int housing_bolt_count = 6;
  double housing_bolt_diameter = 3.0;
  double pin_bolt_diameter = 3.0;
  double motor_bolt_diameter = 3.0;
  double motor_bolt_engagement = 4.0;
  double pin_sleeve_wall = 1.0;  // planet pin sleeve around the pin bolt
  double pressure_angle = 20.0;  // deg

  void validate() const;
};

enum class DimensionSource {
  variable,    // member of X
  fixed,       // constant for a given motor and parameter set
  expression,  // dependent, defined by `expression`
  bearing,     // catalog pick: `expression` names the minimum bore
  fastener,    // catalog pick: `expression` names the minimum length, `argument` the diameter
};

struct DimensionDef {
  std::string name;
  Unit unit = Unit::mm;
  DimensionSource source = DimensionSource::expression;
  std::string expression;
  std::string argument;
};

// Ordered definitions; each expression may reference any name defined before it. A bearing pick
// named `b` defines b_bore, b_outer_diameter and b_width; a fastener pick `f` defines f_diameter and
// f_length.
struct DimensionSchema {
  std::optional<Topology> topology;  // nullopt: motor and housing only
  std::vector<DimensionDef> defs;
};

// Dimensions that drive sizing and mass; independent of the planet count. nullopt gives the
// gear-less housing schema.
DimensionSchema core_schema(std::optional<Topology> topology);

// Core schema plus positional CAD dimensions (planet, housing bolt and motor bolt positions).
DimensionSchema layout_schema(const GearboxDesign& design, const MotorSpec& motor, const LayoutParams& layout);

// Fixed values for every fixed name a schema can reference.
std::map<std::string, double> fixed_dimension_values(const MotorSpec& motor, const SizingParams& sizing,
                                                     const ConstraintParams& constraints,
                                                     const MeshEfficiencyModel& mesh, const LayoutParams& layout);

struct PartChoice {
  std::string name;
  const BearingEntry* bearing = nullptr;
  const FastenerEntry* fastener = nullptr;

  double mass() const noexcept { return bearing ? bearing->mass : fastener ? fastener->mass : 0.0; }
  const std::string& designation() const { return bearing ? bearing->designation : fastener->designation; }
};

// Values a caller may impose instead of their defining expressions (for mass under given widths).
struct WidthOverride {
  std::optional<double> face_width_1;
  std::optional<double> face_width_2;
  std::optional<double> gearbox_width;
  std::optional<double> actuator_width;

  static WidthOverride from(const WidthBreakdown& w);
};

// A schema compiled against fixed values and a catalog. Evaluation writes into a caller buffer and
// does not allocate, so one program can be shared by worker threads.
class DimensionProgram {
 public:
  DimensionProgram(const DimensionSchema& schema, const std::map<std::string, double>& fixed, const Catalog& catalog);

  const SlotMap& slots() const noexcept { return slots_; }
  std::size_t size() const noexcept { return slots_.size(); }
  std::size_t part_count() const noexcept { return part_names_.size(); }
  const std::vector<std::string>& part_names() const noexcept { return part_names_; }
  const std::optional<Topology>& topology() const noexcept { return topology_; }

  // Group and unit of each slot, in slot order.
  DimensionGroup group(int slot) const { return meta_[static_cast<std::size_t>(slot)].group; }
  Unit unit(int slot) const { return meta_[static_cast<std::size_t>(slot)].unit; }
  // Defining expression text of a dependent slot, empty otherwise.
  const std::string& expression(int slot) const { return meta_[static_cast<std::size_t>(slot)].expression; }

  // values.size() >= size(), parts.size() >= part_count(). Throws InfeasibleDesign when a catalog pick
  // fails and DesignError when the design does not match the schema topology.
  void evaluate(const GearboxDesign& design, const WidthOverride& overrides, std::span<double> values,
                std::span<PartChoice> parts) const;

  // Steps needed for the given slots and parts, in evaluation order.
  struct Plan {
    std::vector<std::size_t> steps;
    bool uses_parts = false;     // some step is a catalog pick
    bool needs_overrides = false;  // overridable widths are taken as given, not derived
  };
  // With `imposed_widths`, overridable width slots are leaves and every override this program knows
  // must be supplied when the plan runs.
  Plan plan(const std::vector<int>& slots, const std::vector<int>& parts = {}, bool imposed_widths = false) const;
  // True when `o` supplies every width this program can override.
  bool covers(const WidthOverride& o) const noexcept;
  // Like evaluate() but only runs the planned steps; other slots keep stale or fixed values.
  void evaluate(const Plan& plan, const GearboxDesign& design, const WidthOverride& overrides,
                std::span<double> values, std::span<PartChoice> parts) const;

 private:
  struct Step {
    DimensionSource source;
    int slot = -1;  // first output slot
    CompiledExpression expr;
    int part = -1;
    double diameter = 0.0;
    int override_index = -1;
  };
  struct Meta {
    DimensionGroup group;
    Unit unit;
    std::string expression;
  };

  std::optional<Topology> topology_;
  SlotMap slots_;
  std::vector<Meta> meta_;
  std::vector<double> base_;  // fixed values, other slots zero
  std::vector<Step> steps_;
  std::vector<std::string> part_names_;
  const Catalog* catalog_ = nullptr;
  int variable_slot_[10] = {};
  int override_slot_[4] = {-1, -1, -1, -1};

  void run(const Step& step, const std::optional<double>* const* imposed, std::span<double> values,
           std::span<PartChoice> parts) const;
  void load(const GearboxDesign& design, std::span<double> values, std::span<PartChoice> parts) const;
};

// Evaluated named dimensions of one design, in schema order.
struct DimensionValues {
  std::vector<std::string> names;
  std::vector<double> values;
  std::vector<DimensionGroup> groups;
  std::vector<Unit> units;
  std::vector<PartChoice> parts;

  double at(std::string_view name) const;
};

DimensionValues evaluate_dimensions(const DimensionProgram& program, const GearboxDesign& design,
                                    const WidthOverride& overrides = {});

// Names of the ten members of X, in X order.
const std::array<std::string_view, 10>& variable_names() noexcept;

}  // namespace planetopt
