#include "planetopt/design.hpp"

#include <sstream>

namespace planetopt {

std::string_view to_string(Topology t) noexcept {
  switch (t) {
    case Topology::sspg: return "sspg";
    case Topology::cpg: return "cpg";
    case Topology::dspg: return "dspg";
    case Topology::wpg: return "wpg";
  }
  return "unknown";
}

std::optional<Topology> parse_topology(std::string_view name) noexcept {
  for (Topology t : kAllTopologies) {
    if (to_string(t) == name) return t;
  }
  if (name == "SSPG") return Topology::sspg;
  if (name == "CPG") return Topology::cpg;
  if (name == "DSPG") return Topology::dspg;
  if (name == "WPG") return Topology::wpg;
  return std::nullopt;
}

namespace {

bool full_stage(const GearStage& s) {
  return s.sun > 0 && s.planet > 0 && s.ring > 0 && !s.module.is_zero() && s.planets > 0;
}

}  // namespace

std::string topology_problem(const GearboxDesign& d) {
  const GearStage& a = d.stage1;
  const GearStage& b = d.stage2;
  switch (d.topology) {
    case Topology::sspg:
      if (!full_stage(a)) return "SSPG stage 1 must have sun, planet, ring, module and planet count";
      if (!b.is_zero()) return "SSPG stage 2 must be entirely zero";
      break;
    case Topology::dspg:
      if (!full_stage(a)) return "DSPG stage 1 must be fully populated";
      if (!full_stage(b)) return "DSPG stage 2 must be fully populated";
      break;
    case Topology::cpg:
      if (a.sun <= 0 || a.planet <= 0 || a.module.is_zero() || a.planets <= 0)
        return "CPG stage 1 needs sun, planet, module and planet count";
      if (a.ring != 0) return "CPG stage 1 ring must be zero";
      if (b.sun != 0) return "CPG stage 2 sun must be zero";
      if (b.planet <= 0 || b.ring <= 0 || b.module.is_zero() || b.planets <= 0)
        return "CPG stage 2 needs planet, ring, module and planet count";
      if (a.planets != b.planets) return "CPG compound planets require equal planet counts";
      break;
    case Topology::wpg:
      if (!full_stage(a)) return "WPG stage 1 must be fully populated";
      if (b.sun != 0) return "WPG stage 2 sun must be zero";
      if (b.planet <= 0 || b.ring <= 0 || b.module.is_zero() || b.planets <= 0)
        return "WPG stage 2 needs planet, ring, module and planet count";
      if (a.planets != b.planets) return "WPG compound planets require equal planet counts";
      break;
  }
  if (a.sun < 0 || a.planet < 0 || a.ring < 0 || b.sun < 0 || b.planet < 0 || b.ring < 0)
    return "tooth counts must be non-negative";
  return {};
}

void require_valid_topology(const GearboxDesign& design) {
  auto problem = topology_problem(design);
  if (!problem.empty()) throw DesignError(problem);
}

std::string describe(const GearboxDesign& d) {
  std::ostringstream os;
  auto stage = [&os](const GearStage& s) {
    os << '[' << s.sun << ", " << s.planet << ", " << s.ring << ", " << s.module.mm() << ", " << s.planets << ']';
  };
  os << to_string(d.topology) << ' ';
  stage(d.stage1);
  os << ' ';
  stage(d.stage2);
  return os.str();
}

}  // namespace planetopt
