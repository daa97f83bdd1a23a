#include "support.hpp"

namespace testsupport {

GearStage stage(int sun, int planet, int ring, double module_mm, int planets) {
  return {sun, planet, ring, Module::from_mm(module_mm), planets};
}

GearboxDesign make(Topology t, GearStage s1, GearStage s2) {
  GearboxDesign d;
  d.topology = t;
  d.stage1 = s1;
  d.stage2 = s2;
  return d;
}

const std::vector<Reference>& references() {
  static const std::vector<Reference> refs{
      {make(Topology::sspg, stage(25, 65, 155, 0.5, 3)), "MN8014", 1.0, Rational(36, 5)},
      {make(Topology::cpg, stage(18, 66, 0, 0.6, 3), stage(0, 33, 117, 0.6, 3)), "MAD-M6C12", 1.25, Rational(14)},
      {make(Topology::dspg, stage(35, 52, 139, 0.5, 3), stage(23, 28, 79, 1.0, 3)), "MAD-M6C12", 1.25,
       Rational(174 * 102, 35 * 23)},
      {make(Topology::wpg, stage(66, 45, 156, 0.5, 6), stage(0, 33, 144, 0.5, 6)), "MAD-M6C12", 1.25,
       Rational(180, 11)},
  };
  return refs;
}

const Reference& reference(Topology t) { return references()[static_cast<std::size_t>(t)]; }

RunConfig reference_config(Topology t) {
  RunConfig c = default_config();
  c.motor = reference(t).motor;
  c.constraints.diameter_factor = reference(t).diameter_factor;
  return c;
}

RunConfig reduced_config() {
  RunConfig c = default_config();
  c.motor = "MAD-M6C12";
  c.constraints.diameter_factor = 1.25;
  c.constraints.module_set = {Module::from_mm(0.5)};
  c.constraints.max_teeth = 60;
  c.constraints.min_planets = 2;
  c.constraints.max_planets = 3;
  c.constraints.gr_min = 1;
  c.constraints.gr_max = 1000;
  c.weights.target.reset();
  return c;
}

namespace {

constexpr int kLo = 0;  // loop from zero teeth so the bounds family does its own rejecting
constexpr int kHi = 60;

void offer(const GearboxDesign& d, const Evaluator& ev, std::vector<OracleEntry>& out) {
  // The allocation-free test is checked against check_all in the constraint tests; the full report
  // confirms whatever it lets through.
  if (!is_feasible(d, ev.max_diameter_um(), ev.setup().constraints)) return;
  if (!check_all(d, ev.setup().motor, ev.setup().constraints).feasible) return;
  const DesignEvaluation e = ev.evaluate(d, CostWeights{});
  if (!e.feasibility.feasible || !e.has_metrics) return;
  out.push_back({d, e.mass.total, e.efficiency, e.widths.actuator_width, e.ratio.value});
}

}  // namespace

std::vector<OracleEntry> brute_force(Topology t, const Evaluator& ev) {
  std::vector<OracleEntry> out;
  const double m = 0.5;
  for (int n : {1, 2, 3, 4}) {  // one past each side of the planet range
    switch (t) {
      case Topology::sspg:
        for (int s = kLo + 1; s <= kHi; ++s)
          for (int p = kLo + 1; p <= kHi; ++p)
            for (int r = kLo + 1; r <= kHi; ++r) offer(make(t, stage(s, p, r, m, n)), ev, out);
        break;
      case Topology::cpg:
        // Four free tooth counts; starting at the minimum keeps this to seconds.
        for (int s = 18; s <= kHi; ++s)
          for (int p1 = 18; p1 <= kHi; ++p1)
            for (int p2 = 18; p2 <= kHi; ++p2)
              for (int r = 18; r <= kHi; ++r)
                offer(make(t, stage(s, p1, 0, m, n), stage(0, p2, r, m, n)), ev, out);
        break;
      case Topology::dspg:
        // All ordered pairs of single stages, each stage drawn from every (s, p) with a closing ring;
        // the planet counts of the two stages vary independently.
        for (int n2 : {1, 2, 3, 4})
          for (int s1 = 1; s1 <= kHi; ++s1)
            for (int p1 = 1; s1 + 2 * p1 <= kHi; ++p1)
              for (int s2 = 1; s2 <= kHi; ++s2)
                for (int p2 = 1; s2 + 2 * p2 <= kHi; ++p2)
                  offer(make(t, stage(s1, p1, s1 + 2 * p1, m, n), stage(s2, p2, s2 + 2 * p2, m, n2)), ev, out);
        break;
      case Topology::wpg:
        for (int s = 1; s <= kHi; ++s)
          for (int p1 = 1; s + 2 * p1 <= kHi; ++p1)
            for (int p2 = 1; p2 <= kHi; ++p2)
              for (int r2 = 1; r2 <= kHi; ++r2)
                offer(make(t, stage(s, p1, s + 2 * p1, m, n), stage(0, p2, r2, m, n)), ev, out);
        break;
    }
  }
  return out;
}

}  // namespace testsupport

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace testsupport {

std::vector<GearboxDesign> sample_feasible(const Evaluator& ev, int per_topology, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::vector<GearboxDesign> out;
  for (Topology t : kAllTopologies) {
    // The double stage space is huge; a narrow window still holds thousands of designs.
    const RatioWindow w = t == Topology::dspg ? RatioWindow{Rational(10), Rational(101, 10)}
                                              : RatioWindow{Rational(4), Rational(60)};
    std::vector<GearboxDesign> pool =
        enumerate_designs(t, ev.max_diameter_um(), ev.setup().constraints, w);
    std::shuffle(pool.begin(), pool.end(), rng);
    int taken = 0;
    for (const auto& d : pool) {
      if (taken == per_topology) break;
      if (!ev.metrics(d)) continue;
      out.push_back(d);
      ++taken;
    }
  }
  return out;
}

std::vector<std::string> mass_property_failures(const GearboxDesign& d, const Evaluator& ev) {
  std::vector<std::string> fail;
  auto note = [&](const std::string& what) { fail.push_back(describe(d) + ": " + what); };
  const ProblemSetup& s = ev.setup();
  const MassModel& model = ev.mass_model();
  const WidthBreakdown w = actuator_width(d, s.motor, s.sizing);
  const MassBreakdown m = actuator_mass(d, w, model);

  // Additivity: the parts sum to the whole, and the fast total agrees.
  double sum = 0.0;
  for (const auto& c : m.components) {
    sum += c.mass;
    if (std::abs(c.mass - c.unit_mass * c.count) > 1e-15) note(c.name + " mass != unit * count");
    if (c.mass < 0.0) note(c.name + " negative");
  }
  if (std::abs(sum - m.gearbox_mass) > 1e-12) note("components do not sum to the gearbox mass");
  if (std::abs(m.gearbox_mass + m.motor_mass - m.total) > 1e-12) note("gearbox + motor != total");
  if (m.motor_mass != s.motor.mass) note("motor mass differs from the catalog");
  MassModel::Scratch scratch;
  const WidthOverride ov = WidthOverride::from(w);
  const double fast = model.total(d, ov, scratch);
  if (std::abs(fast - m.total) > 1e-12) note("fast total differs from the breakdown");
  if (model.lower_bound(d, ov, scratch) > fast + 1e-12) note("lower bound above total");
  if (model.lower_bound(d, ov, scratch, true) > fast + 1e-12) note("quick lower bound above total");

  // Monotonicity: thicker faces never make the actuator lighter.
  WidthBreakdown wide = w;
  for (double& b : wide.stage_face_widths) b += 2.0;
  wide.gearbox_width = gearbox_width(d.topology, wide.stage_face_widths, s.sizing);
  wide.actuator_width = wide.gearbox_width + (w.actuator_width - w.gearbox_width);
  try {
    if (actuator_mass(d, wide, model).total < m.total - 1e-12) note("mass fell when faces grew");
  } catch (const InfeasibleDesign&) {
  }

  // Planet multiplicity: per-planet components scale with that stage's planet count, and adding a
  // planet adds exactly their unit masses.
  for (const auto& c : m.components) {
    if (c.per_planet_stage == 0) continue;
    const int n = c.per_planet_stage == 1 ? d.stage1.planets : d.stage2.planets;
    if (c.count != n) note(c.name + " count " + std::to_string(c.count) + " != planets " + std::to_string(n));
  }
  GearboxDesign more = d;
  more.stage1.planets += 1;
  if (d.topology == Topology::cpg || d.topology == Topology::wpg) more.stage2.planets += 1;
  try {
    const MassBreakdown mm = actuator_mass(more, w, model);
    double expected = 0.0;
    for (const auto& c : m.components) {
      if (c.per_planet_stage == 1 || (c.per_planet_stage == 2 && more.stage2.planets != d.stage2.planets))
        expected += c.unit_mass;
    }
    if (std::abs((mm.total - m.total) - expected) > 1e-12) {
      std::ostringstream os;
      os << "one more planet added " << mm.total - m.total << " kg, expected " << expected;
      note(os.str());
    }
  } catch (const InfeasibleDesign&) {
  }
  return fail;
}

}  // namespace testsupport
