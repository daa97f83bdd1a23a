#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "planetopt/constraints.hpp"
#include "support.hpp"

using namespace planetopt;
using testsupport::make;
using testsupport::stage;

namespace {
ConstraintParams bounds(double lo, double hi) {
  ConstraintParams p;
  p.gr_min = lo;
  p.gr_max = hi;
  return p;
}
bool has(const std::vector<Violation>& v, ConstraintFamily f) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.family == f; });
}
const GearboxDesign& ref(Topology t) { return testsupport::reference(t).design; }
}  // namespace

TEST_CASE("ratio bounds") {
  CHECK(check_gear_ratio(ref(Topology::sspg), bounds(7.2, 7.3)).empty());
  CHECK_FALSE(check_gear_ratio(ref(Topology::sspg), bounds(8, 9)).empty());
  CHECK(check_gear_ratio(ref(Topology::wpg), bounds(16, 17)).empty());
  // Exact at both edges.
  CHECK(check_gear_ratio(ref(Topology::cpg), bounds(14, 14)).empty());
  CHECK_FALSE(check_gear_ratio(ref(Topology::cpg), bounds(14.000000001, 15)).empty());
}

TEST_CASE("geometric") {
  const ConstraintParams p;
  CHECK(check_geometric(ref(Topology::dspg), p).empty());
  CHECK(check_geometric(ref(Topology::cpg), p).empty());
  CHECK_FALSE(check_geometric(make(Topology::sspg, stage(25, 65, 154, 0.5, 3)), p).empty());

  // The reference Wolfrom closes its centre distance but its output ring is smaller than the fixed one.
  ConstraintParams relaxed;
  relaxed.ring_order = RingOrderRule::relaxed;
  std::vector<Violation> notes;
  CHECK_FALSE(check_geometric(ref(Topology::wpg), p).empty());
  CHECK(check_geometric(ref(Topology::wpg), relaxed, &notes).empty());
  CHECK(notes.size() == 1);
}

TEST_CASE("meshing") {
  const ConstraintParams p;
  CHECK(check_meshing(ref(Topology::sspg), p).empty());
  CHECK(check_meshing(ref(Topology::cpg), p).empty());
  CHECK_FALSE(check_meshing(make(Topology::sspg, stage(25, 65, 155, 0.5, 7)), p).empty());
}

TEST_CASE("interference") {
  ConstraintParams p;
  // 2 (6.25 + 16.25) sin 30 - 16.25 - 4 = 2.25 before the clearance.
  CHECK(interference_margin(stage(25, 65, 155, 0.5, 3), p) + p.min_clearance == doctest::Approx(2.25));
  CHECK(check_interference(ref(Topology::sspg), p).empty());
  CHECK(interference_margin(stage(18, 66, 0, 0.6, 3), p) + p.min_clearance == doctest::Approx(1.4));
  CHECK(interference_margin(stage(35, 52, 139, 0.5, 3), p) + p.min_clearance == doctest::Approx(4.75));
  CHECK(interference_margin(stage(23, 28, 79, 1.0, 3), p) + p.min_clearance == doctest::Approx(7.5));
  CHECK_FALSE(check_interference(make(Topology::sspg, stage(25, 65, 155, 0.5, 7)), p).empty());
  CHECK_THROWS_AS(interference_margin(stage(25, 0, 155, 0.5, 3), p), DesignError);
  // The classical rule is looser for the same planets.
  ConstraintParams c;
  c.interference = InterferenceRule::classical;
  CHECK(interference_margin(stage(25, 65, 155, 0.5, 7), c) > interference_margin(stage(25, 65, 155, 0.5, 7), p));
}

TEST_CASE("maximum diameter") {
  const Catalog cat = load_catalog(PLANETOPT_DATA_DIR);
  ConstraintParams p;
  p.diameter_factor = 1.0;
  CHECK(check_max_diameter(ref(Topology::sspg), cat.motor("MN8014"), p).empty());
  p.diameter_factor = 1.25;
  // 0.6 (18 + 2 * 66) = 90 = 1.25 * 72, on the boundary.
  CHECK(check_max_diameter(ref(Topology::cpg), cat.motor("MAD-M6C12"), p).empty());
  CHECK(p.max_diameter_um(cat.motor("MAD-M6C12")) == 90000);
  p.diameter_factor = 0.5;
  CHECK_FALSE(check_max_diameter(ref(Topology::sspg), cat.motor("MN8014"), p).empty());
  CHECK_FALSE(check_max_diameter(ref(Topology::cpg), cat.motor("MAD-M6C12"), p).empty());
}

TEST_CASE("bounds") {
  const ConstraintParams p;
  CHECK(check_bounds(ref(Topology::cpg), p).empty());
  CHECK_FALSE(check_bounds(make(Topology::sspg, stage(17, 65, 147, 0.5, 3)), p).empty());
  CHECK_FALSE(check_bounds(make(Topology::sspg, stage(25, 65, 155, 0.5, 8)), p).empty());
  CHECK_FALSE(check_bounds(make(Topology::sspg, stage(25, 65, 155, 0.7, 3)), p).empty());
}

TEST_CASE("topology zero pattern") {
  CHECK(topology_problem(ref(Topology::cpg)).empty());
  CHECK_FALSE(topology_problem(make(Topology::sspg, stage(25, 65, 155, 0.5, 3), stage(1, 1, 1, 0.5, 1))).empty());
  CHECK_FALSE(topology_problem(make(Topology::cpg, stage(18, 66, 0, 0.6, 3), stage(0, 33, 117, 0.6, 4))).empty());
  CHECK_THROWS_AS(require_valid_topology(make(Topology::dspg, stage(25, 65, 155, 0.5, 3))), DesignError);
}

TEST_CASE("check_all aggregates and agrees with the fast path") {
  const Catalog cat = load_catalog(PLANETOPT_DATA_DIR);
  const MotorSpec& motor = cat.motor("MAD-M6C12");
  ConstraintParams p;
  p.diameter_factor = 1.25;
  const FeasibilityReport r = check_all(ref(Topology::cpg), motor, p);
  CHECK(r.feasible);
  const GearboxDesign bad = make(Topology::sspg, stage(25, 65, 154, 0.5, 7));
  const FeasibilityReport rb = check_all(bad, motor, p);
  CHECK_FALSE(rb.feasible);
  CHECK(has(rb.violations, ConstraintFamily::geometric));
  CHECK(has(rb.violations, ConstraintFamily::meshing));
  CHECK(check_all(bad, motor, p).violations == rb.violations);
  CHECK(check_all(bad, motor, p, true).violations.size() == 1);

  // Fast path equals the full report over a block of single stages.
  const std::int64_t dmax = p.max_diameter_um(motor);
  for (int s = 16; s < 40; ++s)
    for (int pl = 16; pl < 40; pl += 3)
      for (int n = 1; n <= 8; ++n)
        for (int dr : {-1, 0, 1}) {
          const GearboxDesign d = make(Topology::sspg, stage(s, pl, s + 2 * pl + dr, 0.5, n));
          CHECK(is_feasible(d, dmax, p) == check_all(d, motor, p).feasible);
        }
}

TEST_CASE("fast path equals the full report on random designs of every topology") {
  const Catalog cat = load_catalog(PLANETOPT_DATA_DIR);
  const MotorSpec& motor = cat.motor("MAD-M6C12");
  ConstraintParams p;
  p.diameter_factor = 1.25;
  p.gr_min = 4;
  p.gr_max = 40;
  const std::int64_t dmax = p.max_diameter_um(motor);
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> teeth(16, 80), planets(1, 8), mod(0, 4);
  const double modules[] = {0.5, 0.6, 0.8, 1.0, 1.2};
  int feasible = 0;
  for (int i = 0; i < 200000; ++i) {
    const Topology t = kAllTopologies[static_cast<std::size_t>(i % 4)];
    const int n = planets(rng);
    const double m1 = modules[mod(rng)], m2 = rng() % 3 ? m1 : modules[mod(rng)];
    const int s1 = teeth(rng), p1 = teeth(rng), s2 = teeth(rng), p2 = teeth(rng);
    // Mostly closed rings so that some designs get past the geometric family.
    const int r1 = rng() % 4 ? s1 + 2 * p1 : teeth(rng) * 2;
    const int r2 = rng() % 4 ? s2 + 2 * p2 : teeth(rng) * 2;
    GearboxDesign d;
    switch (t) {
      case Topology::sspg: d = make(t, stage(s1, p1, r1, m1, n)); break;
      case Topology::dspg: d = make(t, stage(s1, p1, r1, m1, n), stage(s2, p2, r2, m2, planets(rng))); break;
      case Topology::cpg: {
        const int ring = static_cast<int>(std::lround((m1 * (s1 + p1) + m2 * p2) / m2));
        d = make(t, stage(s1, p1, 0, m1, n), stage(0, p2, rng() % 4 ? ring : ring + 1, m2, n));
        break;
      }
      case Topology::wpg: {
        const int ring = static_cast<int>(std::lround((m1 * (s1 + p1) + m2 * p2) / m2));
        d = make(t, stage(s1, p1, r1, m1, n), stage(0, p2, ring, m2, n));
        break;
      }
    }
    const bool full = check_all(d, motor, p).feasible;
    feasible += full;
    REQUIRE(is_feasible(d, dmax, p) == full);
    const auto v = check_all(d, motor, p).violations;
    const bool ratio_only = std::all_of(v.begin(), v.end(), [](const Violation& x) {
      return x.family == ConstraintFamily::gear_ratio;
    });
    REQUIRE(is_feasible(d, dmax, p, false) == ratio_only);
  }
  CHECK(feasible > 100);
}
