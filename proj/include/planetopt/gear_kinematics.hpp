#pragma once

#include <boost/rational.hpp>

#include <cstdint>

#include "planetopt/design.hpp"

namespace planetopt {

using Rational = boost::rational<std::int64_t>;

// Rational from a decimal bound such as 7.2; exact for inputs with up to nine decimals.
Rational rational_from_decimal(double value);

inline double to_double(const Rational& r) noexcept {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

// Input speed over output speed. `signed_value` keeps the direction: a Wolfrom train whose output ring
// is larger than the fixed ring (I2 > 1) turns backwards and has a negative signed ratio.
struct GearRatio {
  Rational signed_value;
  Rational magnitude;
  double value = 0.0;  // magnitude as double
  bool reversed = false;
};

// Basic driving efficiency per mesh: 1 - k_f (1/z_a +/- 1/z_b).
struct MeshEfficiencyModel {
  double friction_factor = 0.7296;  // least-squares fit to 0.960 (25,65,155) and 0.938 (18,66;33,117)

  void validate() const;
};

// Sun/planet style mesh of two external gears.
double mesh_efficiency_external(int z_a, int z_b, const MeshEfficiencyModel& model);
// Planet inside a ring gear.
double mesh_efficiency_internal(int z_planet, int z_ring, const MeshEfficiencyModel& model);

// Ratio of one sun-input, fixed-ring, carrier-output stage: (Ns + Nr) / Ns.
Rational stage_ratio(const GearStage& stage);
// Efficiency of the same stage: (Ns + eta_sp eta_pr Nr) / (Ns + Nr).
double stage_efficiency(const GearStage& stage, const MeshEfficiencyModel& model);

// Wolfrom intermediate ratios I1 = Nr1/Ns1, I2 = Nr1 Np2 / (Np1 Nr2).
Rational wolfrom_i1(const GearboxDesign& design);
Rational wolfrom_i2(const GearboxDesign& design);

// Throws DesignError for structurally invalid designs, DegenerateDesign when I2 = 1.
GearRatio gear_ratio(const GearboxDesign& design);

// Mesh-loss efficiency of the whole train. Returns exactly 1 when every mesh efficiency is 1.
// Throws DegenerateDesign when a denominator vanishes or the result leaves (0, 1].
double efficiency(const GearboxDesign& design, const MeshEfficiencyModel& model);

}  // namespace planetopt
