#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "planetopt/catalog.hpp"
#include "planetopt/design.hpp"
#include "planetopt/gear_kinematics.hpp"

namespace planetopt {

// Planet/carrier-extrusion clearance test. `printed` uses sin(pi / (2 n)), the distance from a planet
// centre to an extrusion midway between two planets; `classical` uses sin(pi / n).
enum class InterferenceRule { printed, classical };

// Wolfrom ring ordering m2 Nr2 > m1 Nr1: `strict` enforces it, `relaxed` only records a note.
enum class RingOrderRule { strict, relaxed };

std::string_view to_string(InterferenceRule r) noexcept;
std::string_view to_string(RingOrderRule r) noexcept;

struct ConstraintParams {
  double gr_min = 1.0;
  double gr_max = 100.0;
  double carrier_extrusion_radius = 4.0;  // mm
  double min_clearance = 1.0;             // mm
  double ring_radial_width = 5.0;         // mm
  double diameter_factor = 1.0;           // K_mgd
  std::vector<Module> module_set = {Module::from_micrometres(500), Module::from_micrometres(600),
                                    Module::from_micrometres(800), Module::from_micrometres(1000),
                                    Module::from_micrometres(1200)};
  int min_teeth = 18;
  int max_teeth = 0;  // 0: bounded only by the diameter limit
  int min_planets = 2;
  int max_planets = 7;
  InterferenceRule interference = InterferenceRule::printed;
  RingOrderRule ring_order = RingOrderRule::strict;

  void validate() const;
  // Largest gearbox diameter K_mgd * D_motor, in micrometres.
  std::int64_t max_diameter_um(const MotorSpec& motor) const;
};

// `parts` is not one of I-VI: it records a design the catalog cannot build (no bearing large enough).
enum class ConstraintFamily { topology, gear_ratio, geometric, meshing, interference, max_diameter, bounds, parts };

std::string_view to_string(ConstraintFamily f) noexcept;

struct Violation {
  ConstraintFamily family = ConstraintFamily::topology;
  std::string detail;

  bool operator==(const Violation&) const = default;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<Violation> violations;
  // Conditions that were checked and failed but are configured not to reject the design.
  std::vector<Violation> notes;
};

// Each check returns the violations of its family; empty means pass.
std::vector<Violation> check_gear_ratio(const GearboxDesign& design, const ConstraintParams& params);
std::vector<Violation> check_geometric(const GearboxDesign& design, const ConstraintParams& params,
                                       std::vector<Violation>* notes = nullptr);
std::vector<Violation> check_meshing(const GearboxDesign& design, const ConstraintParams& params);
std::vector<Violation> check_interference(const GearboxDesign& design, const ConstraintParams& params);
std::vector<Violation> check_max_diameter(const GearboxDesign& design, const MotorSpec& motor,
                                          const ConstraintParams& params);
std::vector<Violation> check_bounds(const GearboxDesign& design, const ConstraintParams& params);

// Signed clearance of the interference inequality for one stage (mm); >= 0 passes.
double interference_margin(const GearStage& stage, const ConstraintParams& params);

FeasibilityReport check_all(const GearboxDesign& design, const MotorSpec& motor, const ConstraintParams& params,
                            bool short_circuit = false);

// Allocation-free equivalent of check_all(...).feasible. `check_ratio = false` skips family I.
bool is_feasible(const GearboxDesign& design, std::int64_t max_diameter_um, const ConstraintParams& params,
                 bool check_ratio = true);

}  // namespace planetopt
