#pragma once

#include <array>
#include <vector>

#include "planetopt/catalog.hpp"
#include "planetopt/design.hpp"

namespace planetopt {

// Face-width and axial-stack parameters. Lengths in mm, stress in MPa.
struct SizingParams {
  double allowable_stress = 30.0;
  double safety_factor = 2.0;
  double min_face_width = 5.0;
  double max_face_width = 30.0;
  double axial_clearance = 1.0;  // per gear/carrier interface
  double wall_thickness = 3.0;
  double carrier_plate_thickness = 5.0;
  double compound_land = 2.0;  // axial gap between the two gears of a compound planet
  // Lewis form factor Y(z) = y0 - y1 / z (20 deg full depth, load at the tip).
  double lewis_y0 = 0.484;
  double lewis_y1 = 2.87;

  void validate() const;
};

struct WidthBreakdown {
  std::vector<double> stage_face_widths;
  double gearbox_width = 0.0;
  double actuator_width = 0.0;
};

// Tangential load on one mesh, shared equally between planets, and the tooth count that carries it.
struct MeshLoad {
  double force = 0.0;  // N
  int teeth = 0;
};

double lewis_form_factor(int teeth, const SizingParams& params);

// b = clamp(SF * Ft / (sigma * m * Y(z)), min, max); Ft in N, m in mm, sigma in MPa -> b in mm.
double lewis_face_width(double tangential_force, double module_mm, int teeth, const SizingParams& params);

// At most two meshes per stage; kept inline so sizing does not allocate.
struct MeshLoads {
  std::array<MeshLoad, 2> items{};
  int count = 0;

  void push_back(const MeshLoad& l) { items[static_cast<std::size_t>(count++)] = l; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(count); }
  const MeshLoad& operator[](std::size_t i) const { return items[i]; }
  const MeshLoad* begin() const noexcept { return items.data(); }
  const MeshLoad* end() const noexcept { return items.data() + count; }
};

// Loads on every mesh of stage 1 or 2 with the motor's peak torque amplified by the ideal reduction
// upstream of each mesh.
MeshLoads stage_mesh_loads(const GearboxDesign& design, int stage_index, const MotorSpec& motor);

// Largest mesh force of a stage.
double stage_tangential_force(const GearboxDesign& design, int stage_index, const MotorSpec& motor);

double stage_face_width(const GearboxDesign& design, int stage_index, const MotorSpec& motor,
                        const SizingParams& params);

// Axial stack for given face widths (one per active stage).
double gearbox_width(Topology topology, const std::vector<double>& face_widths, const SizingParams& params);

WidthBreakdown assemble_widths(Topology topology, std::vector<double> face_widths, const MotorSpec& motor,
                               const SizingParams& params);

WidthBreakdown actuator_width(const GearboxDesign& design, const MotorSpec& motor, const SizingParams& params);

int active_stage_count(Topology topology) noexcept;

}  // namespace planetopt
