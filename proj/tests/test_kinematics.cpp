#include <doctest.h>

#include "planetopt/gear_kinematics.hpp"
#include "support.hpp"

using namespace planetopt;
using testsupport::make;
using testsupport::stage;

namespace {
MeshEfficiencyModel kf(double k) {
  MeshEfficiencyModel m;
  m.friction_factor = k;
  return m;
}
}  // namespace

TEST_CASE("mesh efficiencies") {
  // Hand arithmetic at k_f = 0.7223: 1 - k(1/a +- 1/b).
  CHECK(mesh_efficiency_external(25, 65, kf(0.7223)) == doctest::Approx(0.9599957).epsilon(1e-7));
  CHECK(mesh_efficiency_external(18, 18, kf(0.7223)) == doctest::Approx(0.9197444).epsilon(1e-7));
  CHECK(mesh_efficiency_internal(65, 155, kf(0.7223)) == doctest::Approx(0.9935477).epsilon(1e-7));
  CHECK(mesh_efficiency_internal(33, 117, kf(0.7223)) == doctest::Approx(0.9842856).epsilon(1e-7));
  CHECK(mesh_efficiency_external(25, 65, kf(0)) == 1.0);
  CHECK(mesh_efficiency_internal(65, 155, kf(0)) == 1.0);
  for (int a = 18; a < 80; a += 7)
    for (int b = a + 1; b < 160; b += 11)
      CHECK(mesh_efficiency_internal(a, b, kf(0.7)) >= mesh_efficiency_external(a, b, kf(0.7)));
}

TEST_CASE("friction factor validation") {
  CHECK_NOTHROW(kf(0).validate());
  CHECK_THROWS(kf(-0.1).validate());
  CHECK_THROWS(kf(2.0).validate());
}

TEST_CASE("reference ratios are exact") {
  for (const auto& ref : testsupport::references()) {
    const GearRatio g = gear_ratio(ref.design);
    CHECK(g.magnitude == ref.ratio);
    CHECK(g.value == doctest::Approx(to_double(ref.ratio)).epsilon(1e-12));
  }
  CHECK(gear_ratio(testsupport::reference(Topology::dspg).design).value ==
        doctest::Approx(22.04720497).epsilon(1e-9));
}

TEST_CASE("wolfrom direction and degeneracy") {
  const auto& w = testsupport::reference(Topology::wpg).design;
  CHECK(wolfrom_i1(w) == Rational(156, 66));
  CHECK(wolfrom_i2(w) == Rational(156 * 33, 45 * 144));
  // I2 < 1 here, so the output turns the same way as the input.
  CHECK_FALSE(gear_ratio(w).reversed);
  CHECK(gear_ratio(w).signed_value > 0);

  // Output ring smaller than the fixed one flips I2 above 1 and reverses the output.
  const GearboxDesign rev = make(Topology::wpg, stage(66, 45, 156, 0.5, 6), stage(0, 33, 110, 0.5, 6));
  CHECK(wolfrom_i2(rev) > 1);
  CHECK(gear_ratio(rev).reversed);
  CHECK(gear_ratio(rev).signed_value < 0);
  CHECK(gear_ratio(rev).magnitude == -gear_ratio(rev).signed_value);

  // I2 = 1: Nr1 Np2 = Np1 Nr2.
  const GearboxDesign deg = make(Topology::wpg, stage(18, 18, 54, 0.5, 3), stage(0, 18, 54, 0.5, 3));
  CHECK_THROWS_AS(gear_ratio(deg), DegenerateDesign);
}

TEST_CASE("ratio is independent of module") {
  for (const auto& ref : testsupport::references()) {
    GearboxDesign d = ref.design;
    d.stage1.module = Module::from_mm(1.2);
    if (!d.stage2.is_zero()) d.stage2.module = Module::from_mm(0.8);
    CHECK(gear_ratio(d).signed_value == gear_ratio(ref.design).signed_value);
  }
}

TEST_CASE("efficiency of the reference designs") {
  const auto& refs = testsupport::references();
  // Hand substitution into the stage formulas at k_f = 0.7223.
  CHECK(efficiency(refs[0].design, kf(0.7223)) == doctest::Approx(0.9602180).epsilon(1e-6));
  CHECK(efficiency(refs[1].design, kf(0.7223)) == doctest::Approx(0.9387296).epsilon(1e-6));
  for (const auto& r : refs) CHECK(efficiency(r.design, kf(0.0)) == 1.0);
  const double eta_w = efficiency(refs[3].design, kf(0.7223));
  CHECK(eta_w > 0.0);
  CHECK(eta_w < 1.0);
}

TEST_CASE("double stage factorizes into single stages") {
  const auto& d = testsupport::reference(Topology::dspg).design;
  const GearboxDesign a = make(Topology::sspg, d.stage1);
  const GearboxDesign b = make(Topology::sspg, d.stage2);
  CHECK(gear_ratio(d).magnitude == gear_ratio(a).magnitude * gear_ratio(b).magnitude);
  CHECK(efficiency(d, kf(0.7)) == doctest::Approx(efficiency(a, kf(0.7)) * efficiency(b, kf(0.7))).epsilon(1e-14));
  CHECK(stage_ratio(d.stage1) == Rational(174, 35));
}

TEST_CASE("efficiency falls as friction rises") {
  for (const auto& r : testsupport::references()) {
    double prev = 1.0;
    for (double k = 0.0; k <= 1.2; k += 0.1) {
      const double e = efficiency(r.design, kf(k));
      CHECK(e <= prev + 1e-15);
      prev = e;
    }
  }
}

TEST_CASE("rational_from_decimal") {
  CHECK(rational_from_decimal(7.2) == Rational(36, 5));
  CHECK(rational_from_decimal(14) == Rational(14));
  CHECK(rational_from_decimal(0.000000001) == Rational(1, 1000000000));
}
