#include "planetopt/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace planetopt {

std::string_view to_string(InterferenceRule r) noexcept {
  return r == InterferenceRule::printed ? "printed" : "classical";
}

std::string_view to_string(RingOrderRule r) noexcept { return r == RingOrderRule::strict ? "strict" : "relaxed"; }

std::string_view to_string(ConstraintFamily f) noexcept {
  switch (f) {
    case ConstraintFamily::topology: return "topology";
    case ConstraintFamily::gear_ratio: return "I gear ratio";
    case ConstraintFamily::geometric: return "II geometric";
    case ConstraintFamily::meshing: return "III meshing";
    case ConstraintFamily::interference: return "IV interference";
    case ConstraintFamily::max_diameter: return "V max diameter";
    case ConstraintFamily::bounds: return "VI bounds";
    case ConstraintFamily::parts: return "catalog parts";
  }
  return "unknown";
}

void ConstraintParams::validate() const {
  if (!(gr_min < gr_max)) throw Error("gear ratio bounds need gr_min < gr_max");
  if (!(carrier_extrusion_radius > 0.0)) throw Error("carrier_extrusion_radius must be positive");
  if (!(min_clearance >= 0.0)) throw Error("min_clearance must be non-negative");
  if (!(ring_radial_width > 0.0)) throw Error("ring_radial_width must be positive");
  if (!(diameter_factor > 0.0)) throw Error("diameter_factor must be positive");
  if (module_set.empty()) throw Error("module set is empty");
  for (std::size_t i = 0; i < module_set.size(); ++i) {
    if (module_set[i].micrometres() <= 0) throw Error("modules must be positive");
    if (i > 0 && !(module_set[i - 1] < module_set[i])) throw Error("module set must be strictly ascending");
  }
  if (min_teeth < 18) throw Error("min_teeth must be at least 18");
  if (max_teeth != 0 && max_teeth < min_teeth) throw Error("max_teeth below min_teeth");
  if (min_planets < 1 || max_planets < min_planets) throw Error("invalid planet count range");
}

std::int64_t ConstraintParams::max_diameter_um(const MotorSpec& motor) const {
  return std::llround(diameter_factor * motor.outer_diameter * 1000.0);
}

namespace {

// Sink receives (family, detail-producer) and returns false to stop checking.
struct ReportSink {
  std::vector<Violation>* out;
  bool stop_after_first;
  template <typename Detail>
  bool operator()(ConstraintFamily f, Detail&& detail) {
    out->push_back({f, detail()});
    return !stop_after_first;
  }
};

struct FastSink {
  bool failed = false;
  template <typename Detail>
  bool operator()(ConstraintFamily, Detail&&) {
    failed = true;
    return false;
  }
};

struct NullSink {
  template <typename Detail>
  bool operator()(ConstraintFamily, Detail&&) {
    return true;
  }
};

std::string str(const Rational& r) {
  std::ostringstream os;
  os << to_double(r);
  if (r.denominator() != 1) os << " (" << r.numerator() << "/" << r.denominator() << ")";
  return os.str();
}

std::string mm(std::int64_t um) {
  std::ostringstream os;
  os << um / 1000.0;
  return os.str();
}

template <typename Sink>
bool run_ratio(const GearboxDesign& d, const Rational& lo, const Rational& hi, Sink& sink) {
  GearRatio g;
  try {
    g = gear_ratio(d);
  } catch (const DegenerateDesign& e) {
    return sink(ConstraintFamily::gear_ratio, [&] { return std::string(e.what()); });
  }
  // A reversed Wolfrom output still counts by magnitude.
  if (g.magnitude < lo || g.magnitude > hi) {
    return sink(ConstraintFamily::gear_ratio, [&] {
      return "ratio " + str(g.magnitude) + " outside [" + str(lo) + ", " + str(hi) + "]";
    });
  }
  return true;
}

template <typename Sink>
bool ring_from_sun_planet(const GearStage& s, int stage, Sink& sink) {
  if (s.ring != s.sun + 2 * s.planet) {
    return sink(ConstraintFamily::geometric, [&] {
      std::ostringstream os;
      os << "stage " << stage << ": Nr = " << s.ring << " but Ns + 2 Np = " << s.sun + 2 * s.planet;
      return os.str();
    });
  }
  return true;
}

template <typename Sink>
bool compound_centre_distance(const GearboxDesign& d, Sink& sink) {
  const std::int64_t m1 = d.stage1.module.micrometres();
  const std::int64_t m2 = d.stage2.module.micrometres();
  const std::int64_t lhs = m2 * d.stage2.ring;
  const std::int64_t rhs = m1 * (d.stage1.sun + d.stage1.planet) + m2 * d.stage2.planet;
  if (lhs != rhs) {
    return sink(ConstraintFamily::geometric, [&] {
      return "m2 Nr2 = " + mm(lhs) + " mm but m1 (Ns1 + Np1) + m2 Np2 = " + mm(rhs) + " mm";
    });
  }
  return true;
}

template <typename Sink, typename NoteSink>
bool run_geometric(const GearboxDesign& d, const ConstraintParams& p, Sink& sink, NoteSink& notes) {
  switch (d.topology) {
    case Topology::sspg:
      return ring_from_sun_planet(d.stage1, 1, sink);
    case Topology::dspg:
      return ring_from_sun_planet(d.stage1, 1, sink) && ring_from_sun_planet(d.stage2, 2, sink);
    case Topology::cpg:
      if (d.stage1.module != d.stage2.module &&
          !sink(ConstraintFamily::geometric, [] { return std::string("CPG uses one module for both stages"); }))
        return false;
      if (d.stage2.planet >= d.stage1.planet &&
          !sink(ConstraintFamily::geometric, [&] {
            return "CPG planet 2 (" + std::to_string(d.stage2.planet) + " teeth) must be smaller than planet 1 (" +
                   std::to_string(d.stage1.planet) + ")";
          }))
        return false;
      return compound_centre_distance(d, sink);
    case Topology::wpg: {
      if (!ring_from_sun_planet(d.stage1, 1, sink)) return false;
      if (!compound_centre_distance(d, sink)) return false;
      const std::int64_t r2 = static_cast<std::int64_t>(d.stage2.module.micrometres()) * d.stage2.ring;
      const std::int64_t r1 = static_cast<std::int64_t>(d.stage1.module.micrometres()) * d.stage1.ring;
      if (!(r2 > r1)) {
        auto detail = [&] {
          return "Wolfrom ring order m2 Nr2 > m1 Nr1 fails: " + mm(r2) + " mm <= " + mm(r1) + " mm";
        };
        if (p.ring_order == RingOrderRule::strict) return sink(ConstraintFamily::geometric, detail);
        notes(ConstraintFamily::geometric, detail);
      }
      return true;
    }
  }
  return true;
}

template <typename Sink>
bool divisible(int value, int planets, const char* what, Sink& sink) {
  if (planets <= 0) return sink(ConstraintFamily::meshing, [] { return std::string("planet count must be positive"); });
  if (value % planets != 0) {
    return sink(ConstraintFamily::meshing, [&] {
      return std::string(what) + " = " + std::to_string(value) + " is not divisible by " + std::to_string(planets) +
             " planets";
    });
  }
  return true;
}

template <typename Sink>
bool run_meshing(const GearboxDesign& d, Sink& sink) {
  const GearStage& a = d.stage1;
  const GearStage& b = d.stage2;
  switch (d.topology) {
    case Topology::sspg:
      return divisible(a.sun + a.ring, a.planets, "Ns1 + Nr1", sink);
    case Topology::dspg:
      return divisible(a.sun + a.ring, a.planets, "Ns1 + Nr1", sink) &&
             divisible(b.sun + b.ring, b.planets, "Ns2 + Nr2", sink);
    case Topology::cpg:
      return divisible(a.sun, a.planets, "Ns1", sink) && divisible(b.ring, a.planets, "Nr2", sink);
    case Topology::wpg:
      return divisible(a.sun + a.ring, a.planets, "Ns1 + Nr1", sink) && divisible(a.sun, a.planets, "Ns1", sink) &&
             divisible(b.ring, a.planets, "Nr2", sink);
  }
  return true;
}

template <typename Sink>
bool stage_interference(const GearStage& s, int stage, const ConstraintParams& p, Sink& sink) {
  const double margin = interference_margin(s, p);
  if (margin < 0.0) {
    return sink(ConstraintFamily::interference, [&] {
      std::ostringstream os;
      os << "stage " << stage << ": planet/extrusion clearance " << margin + p.min_clearance << " mm < "
         << p.min_clearance << " mm";
      return os.str();
    });
  }
  return true;
}

template <typename Sink>
bool run_interference(const GearboxDesign& d, const ConstraintParams& p, Sink& sink) {
  if (d.topology == Topology::dspg)
    return stage_interference(d.stage1, 1, p, sink) && stage_interference(d.stage2, 2, p, sink);
  return stage_interference(d.stage1, 1, p, sink);
}

template <typename Sink>
bool ring_fits(const GearStage& s, int stage, std::int64_t dmax, const ConstraintParams& p, Sink& sink) {
  const std::int64_t rw = std::llround(p.ring_radial_width * 1000.0);
  const std::int64_t od = static_cast<std::int64_t>(s.module.micrometres()) * s.ring + rw;
  if (od > dmax) {
    return sink(ConstraintFamily::max_diameter, [&] {
      return "stage " + std::to_string(stage) + ": m Nr + ring width = " + mm(od) + " mm exceeds " + mm(dmax) + " mm";
    });
  }
  return true;
}

template <typename Sink>
bool run_max_diameter(const GearboxDesign& d, std::int64_t dmax, const ConstraintParams& p, Sink& sink) {
  switch (d.topology) {
    case Topology::sspg:
      return ring_fits(d.stage1, 1, dmax, p, sink);
    case Topology::dspg:
    case Topology::wpg:
      return ring_fits(d.stage1, 1, dmax, p, sink) && ring_fits(d.stage2, 2, dmax, p, sink);
    case Topology::cpg: {
      const std::int64_t od =
          static_cast<std::int64_t>(d.stage1.module.micrometres()) * (d.stage1.sun + 2 * d.stage1.planet);
      if (od > dmax) {
        return sink(ConstraintFamily::max_diameter,
                    [&] { return "planet 1 envelope m1 (Ns1 + 2 Np1) = " + mm(od) + " mm exceeds " + mm(dmax) + " mm"; });
      }
      return true;
    }
  }
  return true;
}

template <typename Sink>
bool stage_bounds(const GearStage& s, int stage, const ConstraintParams& p, Sink& sink) {
  if (!std::binary_search(p.module_set.begin(), p.module_set.end(), s.module)) {
    if (!sink(ConstraintFamily::bounds, [&] {
          std::ostringstream os;
          os << "stage " << stage << ": module " << s.module.mm() << " mm not in the module set";
          return os.str();
        }))
      return false;
  }
  auto teeth = [&](int n, const char* name, bool min_applies) {
    if (n == 0) return true;  // fixed to zero by topology
    if (min_applies && n < p.min_teeth) {
      return sink(ConstraintFamily::bounds, [&] {
        return std::string(name) + std::to_string(stage) + " = " + std::to_string(n) + " below N_min = " +
               std::to_string(p.min_teeth);
      });
    }
    if (p.max_teeth > 0 && n > p.max_teeth) {
      return sink(ConstraintFamily::bounds, [&] {
        return std::string(name) + std::to_string(stage) + " = " + std::to_string(n) + " above N_max = " +
               std::to_string(p.max_teeth);
      });
    }
    return true;
  };
  if (!teeth(s.sun, "Ns", true) || !teeth(s.planet, "Np", true) || !teeth(s.ring, "Nr", false)) return false;
  if (s.planets < p.min_planets || s.planets > p.max_planets) {
    return sink(ConstraintFamily::bounds, [&] {
      return "stage " + std::to_string(stage) + ": " + std::to_string(s.planets) + " planets outside [" +
             std::to_string(p.min_planets) + ", " + std::to_string(p.max_planets) + "]";
    });
  }
  return true;
}

template <typename Sink>
bool run_bounds(const GearboxDesign& d, const ConstraintParams& p, Sink& sink) {
  if (!stage_bounds(d.stage1, 1, p, sink)) return false;
  if (d.topology == Topology::sspg) return true;
  return stage_bounds(d.stage2, 2, p, sink);
}

template <typename Sink>
std::vector<Violation> collect(Sink&& run) {
  std::vector<Violation> out;
  ReportSink sink{&out, false};
  run(sink);
  return out;
}

}  // namespace

double interference_margin(const GearStage& s, const ConstraintParams& p) {
  if (s.planet <= 0 || s.sun <= 0 || s.planets <= 0 || s.module.is_zero())
    throw DesignError("interference check needs sun, planet, module and planet count");
  const double rs = s.module.mm() * s.sun / 2.0;
  const double rp = s.module.mm() * s.planet / 2.0;
  const double half_angle = p.interference == InterferenceRule::printed ? std::numbers::pi / (2.0 * s.planets)
                                                                        : std::numbers::pi / s.planets;
  return 2.0 * (rs + rp) * std::sin(half_angle) - rp - p.carrier_extrusion_radius - p.min_clearance;
}

std::vector<Violation> check_gear_ratio(const GearboxDesign& d, const ConstraintParams& p) {
  require_valid_topology(d);
  const Rational lo = rational_from_decimal(p.gr_min);
  const Rational hi = rational_from_decimal(p.gr_max);
  return collect([&](auto& sink) { run_ratio(d, lo, hi, sink); });
}

std::vector<Violation> check_geometric(const GearboxDesign& d, const ConstraintParams& p,
                                       std::vector<Violation>* notes) {
  require_valid_topology(d);
  std::vector<Violation> note_store;
  ReportSink note_sink{notes ? notes : &note_store, false};
  return collect([&](auto& sink) { run_geometric(d, p, sink, note_sink); });
}

std::vector<Violation> check_meshing(const GearboxDesign& d, const ConstraintParams&) {
  require_valid_topology(d);
  return collect([&](auto& sink) { run_meshing(d, sink); });
}

std::vector<Violation> check_interference(const GearboxDesign& d, const ConstraintParams& p) {
  require_valid_topology(d);
  return collect([&](auto& sink) { run_interference(d, p, sink); });
}

std::vector<Violation> check_max_diameter(const GearboxDesign& d, const MotorSpec& motor,
                                          const ConstraintParams& p) {
  require_valid_topology(d);
  const std::int64_t dmax = p.max_diameter_um(motor);
  return collect([&](auto& sink) { run_max_diameter(d, dmax, p, sink); });
}

std::vector<Violation> check_bounds(const GearboxDesign& d, const ConstraintParams& p) {
  require_valid_topology(d);
  return collect([&](auto& sink) { run_bounds(d, p, sink); });
}

FeasibilityReport check_all(const GearboxDesign& d, const MotorSpec& motor, const ConstraintParams& p,
                            bool short_circuit) {
  FeasibilityReport report;
  ReportSink sink{&report.violations, short_circuit};
  ReportSink notes{&report.notes, false};
  const std::string problem = topology_problem(d);
  if (!problem.empty()) {
    report.violations.push_back({ConstraintFamily::topology, problem});
    report.feasible = false;
    return report;
  }
  const Rational lo = rational_from_decimal(p.gr_min);
  const Rational hi = rational_from_decimal(p.gr_max);
  const std::int64_t dmax = p.max_diameter_um(motor);
  // Each family runs unless a short-circuit stop was requested.
  bool go = run_ratio(d, lo, hi, sink);
  if (go || !short_circuit) go = run_geometric(d, p, sink, notes);
  if (go || !short_circuit) go = run_meshing(d, sink);
  if (go || !short_circuit) go = run_interference(d, p, sink);
  if (go || !short_circuit) go = run_max_diameter(d, dmax, p, sink);
  if (go || !short_circuit) run_bounds(d, p, sink);
  report.feasible = report.violations.empty();
  return report;
}

bool is_feasible(const GearboxDesign& d, std::int64_t max_diameter_um, const ConstraintParams& p, bool check_ratio) {
  if (!topology_problem(d).empty()) return false;
  FastSink sink;
  NullSink notes;
  if (!run_bounds(d, p, sink)) return false;
  if (!run_geometric(d, p, sink, notes)) return false;
  if (!run_meshing(d, sink)) return false;
  if (!run_max_diameter(d, max_diameter_um, p, sink)) return false;
  if (!run_interference(d, p, sink)) return false;
  if (check_ratio) {
    const Rational lo = rational_from_decimal(p.gr_min);
    const Rational hi = rational_from_decimal(p.gr_max);
    if (!run_ratio(d, lo, hi, sink)) return false;
  }
  return true;
}

}  // namespace planetopt
