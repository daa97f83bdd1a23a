#include "planetopt/sizing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "planetopt/gear_kinematics.hpp"

namespace planetopt {

void SizingParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0) throw Error(std::string("sizing parameter '") + name + "' must be positive");
  };
  positive(allowable_stress, "allowable_stress");
  positive(safety_factor, "safety_factor");
  positive(min_face_width, "min_face_width");
  positive(max_face_width, "max_face_width");
  positive(axial_clearance, "axial_clearance");
  positive(wall_thickness, "wall_thickness");
  positive(carrier_plate_thickness, "carrier_plate_thickness");
  positive(compound_land, "compound_land");
  positive(lewis_y0, "lewis_y0");
  if (safety_factor < 1.0) throw Error("sizing parameter 'safety_factor' must be >= 1");
  if (min_face_width > max_face_width) throw Error("min_face_width exceeds max_face_width");
  if (!std::isfinite(lewis_y1) || lewis_y1 < 0.0) throw Error("sizing parameter 'lewis_y1' must be >= 0");
}

int active_stage_count(Topology topology) noexcept { return topology == Topology::sspg ? 1 : 2; }

double lewis_form_factor(int teeth, const SizingParams& params) {
  if (teeth <= 0) throw DesignError("Lewis form factor needs a positive tooth count");
  const double y = params.lewis_y0 - params.lewis_y1 / teeth;
  if (!(y > 0.0)) throw DesignError("Lewis form factor is not positive for " + std::to_string(teeth) + " teeth");
  return y;
}

double lewis_face_width(double tangential_force, double module_mm, int teeth, const SizingParams& params) {
  if (!(tangential_force > 0.0) || !std::isfinite(tangential_force))
    throw DesignError("tangential force must be positive");
  if (!(module_mm > 0.0)) throw DesignError("module must be positive");
  const double y = lewis_form_factor(teeth, params);
  const double b = params.safety_factor * tangential_force / (params.allowable_stress * module_mm * y);
  return std::clamp(b, params.min_face_width, params.max_face_width);
}

namespace {

// Force on a mesh whose reference gear carries `torque_nm` on pitch diameter m*N, split over n planets.
double mesh_force(double torque_nm, const Module& m, int teeth, int planets) {
  if (planets <= 0) throw DesignError("planet count must be positive");
  return 2000.0 * torque_nm / (m.mm() * teeth * planets);
}

}  // namespace

MeshLoads stage_mesh_loads(const GearboxDesign& d, int stage_index, const MotorSpec& motor) {
  require_valid_topology(d);
  if (stage_index != 1 && stage_index != 2) throw DesignError("stage index must be 1 or 2");
  if (stage_index == 2 && d.topology == Topology::sspg) throw DesignError("SSPG has no stage 2");
  const double torque = motor.peak_torque;
  const GearStage& s1 = d.stage1;
  const GearStage& s2 = d.stage2;
  MeshLoads loads;
  switch (d.topology) {
    case Topology::sspg:
    case Topology::dspg: {
      const GearStage& s = stage_index == 1 ? s1 : s2;
      const double t_in = stage_index == 1 ? torque : torque * to_double(stage_ratio(s1));
      const double f = mesh_force(t_in, s.module, s.sun, s.planets);
      loads.push_back({f, std::min(s.sun, s.planet)});
      // ring reaction (G-1)T on the ring pitch circle equals the sun mesh force
      loads.push_back({f, s.planet});
      break;
    }
    case Topology::cpg: {
      if (stage_index == 1) {
        loads.push_back({mesh_force(torque, s1.module, s1.sun, s1.planets), std::min(s1.sun, s1.planet)});
      } else {
        const double g = gear_ratio(d).value;
        loads.push_back({mesh_force(torque * (g - 1.0), s2.module, s2.ring, s2.planets), s2.planet});
      }
      break;
    }
    case Topology::wpg: {
      const double g = to_double(gear_ratio(d).signed_value);
      if (stage_index == 1) {
        loads.push_back({mesh_force(torque, s1.module, s1.sun, s1.planets), std::min(s1.sun, s1.planet)});
        loads.push_back({mesh_force(torque * std::fabs(g - 1.0), s1.module, s1.ring, s1.planets), s1.planet});
      } else {
        loads.push_back({mesh_force(torque * std::fabs(g), s2.module, s2.ring, s2.planets), s2.planet});
      }
      break;
    }
  }
  return loads;
}

double stage_tangential_force(const GearboxDesign& design, int stage_index, const MotorSpec& motor) {
  double f = 0.0;
  for (const auto& load : stage_mesh_loads(design, stage_index, motor)) f = std::max(f, load.force);
  return f;
}

double stage_face_width(const GearboxDesign& design, int stage_index, const MotorSpec& motor,
                        const SizingParams& params) {
  const GearStage& s = stage_index == 1 ? design.stage1 : design.stage2;
  double b = 0.0;
  for (const auto& load : stage_mesh_loads(design, stage_index, motor))
    b = std::max(b, lewis_face_width(load.force, s.module.mm(), load.teeth, params));
  return b;
}

double gearbox_width(Topology topology, const std::vector<double>& faces, const SizingParams& p) {
  const auto expected = static_cast<std::size_t>(active_stage_count(topology));
  if (faces.size() != expected) throw DesignError("gearbox width needs one face width per active stage");
  for (double b : faces)
    if (!(b > 0.0)) throw DesignError("face widths must be positive");
  switch (topology) {
    case Topology::sspg:
      return faces[0] + 2.0 * p.axial_clearance + p.carrier_plate_thickness;
    case Topology::dspg:
      return faces[0] + faces[1] + 4.0 * p.axial_clearance + 2.0 * p.carrier_plate_thickness;
    case Topology::cpg:
    case Topology::wpg:
      return faces[0] + p.compound_land + faces[1] + 2.0 * p.axial_clearance + p.carrier_plate_thickness;
  }
  return 0.0;
}

WidthBreakdown assemble_widths(Topology topology, std::vector<double> face_widths, const MotorSpec& motor,
                               const SizingParams& params) {
  WidthBreakdown w;
  w.gearbox_width = gearbox_width(topology, face_widths, params);
  w.actuator_width = w.gearbox_width + motor.stack_length + 2.0 * params.wall_thickness;
  w.stage_face_widths = std::move(face_widths);
  return w;
}

WidthBreakdown actuator_width(const GearboxDesign& design, const MotorSpec& motor, const SizingParams& params) {
  require_valid_topology(design);
  std::vector<double> faces;
  faces.reserve(2);
  for (int i = 1; i <= active_stage_count(design.topology); ++i)
    faces.push_back(stage_face_width(design, i, motor, params));
  return assemble_widths(design.topology, std::move(faces), motor, params);
}

}  // namespace planetopt
