#include "planetopt/gear_kinematics.hpp"

#include <cmath>
#include <string>

namespace planetopt {

Rational rational_from_decimal(double value) {
  constexpr std::int64_t kScale = 1'000'000'000;
  if (!std::isfinite(value) || std::fabs(value) > 9.0e9) throw Error("ratio bound out of range: " + std::to_string(value));
  return Rational(std::llround(value * static_cast<double>(kScale)), kScale);
}

void MeshEfficiencyModel::validate() const {
  if (!std::isfinite(friction_factor) || friction_factor < 0.0 || friction_factor >= 2.0)
    throw Error("mesh friction factor must lie in [0, 2), got " + std::to_string(friction_factor));
}

namespace {

double checked_mesh(double eta, int a, int b) {
  if (!(eta > 0.0) || eta > 1.0)
    throw DegenerateDesign("mesh efficiency out of (0, 1] for teeth " + std::to_string(a) + "/" + std::to_string(b));
  return eta;
}

}  // namespace

double mesh_efficiency_external(int z_a, int z_b, const MeshEfficiencyModel& model) {
  if (z_a <= 0 || z_b <= 0) throw DesignError("external mesh needs positive tooth counts");
  const double eta = 1.0 - model.friction_factor * (1.0 / z_a + 1.0 / z_b);
  return checked_mesh(eta, z_a, z_b);
}

double mesh_efficiency_internal(int z_planet, int z_ring, const MeshEfficiencyModel& model) {
  if (z_planet <= 0 || z_ring <= z_planet) throw DesignError("internal mesh needs 0 < planet teeth < ring teeth");
  const double eta = 1.0 - model.friction_factor * (1.0 / z_planet - 1.0 / z_ring);
  return checked_mesh(eta, z_planet, z_ring);
}

Rational stage_ratio(const GearStage& s) {
  if (s.sun <= 0 || s.ring <= 0) throw DesignError("stage ratio needs sun and ring teeth");
  return Rational(s.sun + s.ring, s.sun);
}

double stage_efficiency(const GearStage& s, const MeshEfficiencyModel& model) {
  const double sp = mesh_efficiency_external(s.sun, s.planet, model);
  const double pr = mesh_efficiency_internal(s.planet, s.ring, model);
  return (s.sun + sp * pr * s.ring) / static_cast<double>(s.sun + s.ring);
}

Rational wolfrom_i1(const GearboxDesign& d) {
  if (d.stage1.sun <= 0) throw DesignError("Wolfrom I1 needs a sun gear");
  return Rational(d.stage1.ring, d.stage1.sun);
}

Rational wolfrom_i2(const GearboxDesign& d) {
  const std::int64_t den = static_cast<std::int64_t>(d.stage1.planet) * d.stage2.ring;
  if (den <= 0) throw DesignError("Wolfrom I2 needs planet 1 and ring 2 teeth");
  return Rational(static_cast<std::int64_t>(d.stage1.ring) * d.stage2.planet, den);
}

GearRatio gear_ratio(const GearboxDesign& d) {
  require_valid_topology(d);
  Rational g;
  switch (d.topology) {
    case Topology::sspg:
      g = stage_ratio(d.stage1);
      break;
    case Topology::cpg: {
      const std::int64_t s = d.stage1.sun, p1 = d.stage1.planet, p2 = d.stage2.planet;
      g = Rational((s + p1) * (p2 + p1), s * p2);
      break;
    }
    case Topology::dspg:
      g = stage_ratio(d.stage1) * stage_ratio(d.stage2);
      break;
    case Topology::wpg: {
      const Rational i1 = wolfrom_i1(d);
      const Rational i2 = wolfrom_i2(d);
      if (i2 == Rational(1)) throw DegenerateDesign("Wolfrom train with I2 = 1 has an infinite ratio");
      g = (Rational(1) + i1) / (Rational(1) - i2);
      break;
    }
  }
  GearRatio out;
  out.signed_value = g;
  out.reversed = g < Rational(0);
  out.magnitude = out.reversed ? -g : g;
  out.value = to_double(out.magnitude);
  return out;
}

double efficiency(const GearboxDesign& d, const MeshEfficiencyModel& model) {
  require_valid_topology(d);
  double eta = 0.0;
  switch (d.topology) {
    case Topology::sspg:
      eta = stage_efficiency(d.stage1, model);
      break;
    case Topology::dspg:
      eta = stage_efficiency(d.stage1, model) * stage_efficiency(d.stage2, model);
      break;
    case Topology::cpg: {
      const double s = d.stage1.sun, p1 = d.stage1.planet, p2 = d.stage2.planet, r2 = d.stage2.ring;
      const double sp = mesh_efficiency_external(d.stage1.sun, d.stage1.planet, model);
      const double pr = mesh_efficiency_internal(d.stage2.planet, d.stage2.ring, model);
      eta = (s * p2 + sp * pr * p1 * r2) / ((s + p1) * (p2 + p1));
      break;
    }
    case Topology::wpg: {
      const double sp1 = mesh_efficiency_external(d.stage1.sun, d.stage1.planet, model);
      const double p1r1 = mesh_efficiency_internal(d.stage1.planet, d.stage1.ring, model);
      const double p2r2 = mesh_efficiency_internal(d.stage2.planet, d.stage2.ring, model);
      const Rational i2r = wolfrom_i2(d);
      if (i2r == Rational(1)) throw DegenerateDesign("Wolfrom train with I2 = 1");
      const double i1 = to_double(wolfrom_i1(d));
      const double i2 = to_double(i2r);
      double num = 0.0;
      double den = 0.0;
      if (i2r > Rational(1)) {
        // Output ring larger than the fixed ring: sun and fixed ring both feed the planets in the
        // carrier frame, the output ring takes the power.
        num = p2r2 * (p1r1 + sp1 * i1) * (1.0 - i2);
        den = (1.0 + i1) * (p1r1 * p2r2 - i2);
      } else {
        // Output ring smaller than the fixed ring: the output ring feeds back through P2 and the
        // fixed ring absorbs, so the P1-R1 and P2-R2 losses act on the other side of the balance.
        num = (1.0 + sp1 * p1r1 * i1) * (1.0 - i2);
        den = (1.0 + i1) * (1.0 - p1r1 * p2r2 * i2);
      }
      if (std::fabs(den) < 1e-12) throw DegenerateDesign("Wolfrom efficiency denominator vanishes");
      eta = num / den;
      break;
    }
  }
  if (!(eta > 0.0) || eta > 1.0 + 1e-12 || !std::isfinite(eta))
    throw DegenerateDesign("train efficiency out of (0, 1]: " + std::to_string(eta));
  return eta > 1.0 ? 1.0 : eta;
}

}  // namespace planetopt
