#pragma once
// Shared fixtures: the four reference designs and a brute-force search over a reduced space.
#include <vector>

#include "planetopt/config.hpp"
#include "planetopt/optimizer.hpp"

namespace testsupport {

using namespace planetopt;

// Reference designs with the motor and diameter factor each was built for.
struct Reference {
  GearboxDesign design;
  const char* motor;
  double diameter_factor;
  Rational ratio;
};
const std::vector<Reference>& references();
const Reference& reference(Topology t);

// Default config with the reference motor and diameter factor applied.
RunConfig reference_config(Topology t);

GearboxDesign make(Topology t, GearStage s1, GearStage s2 = {});
GearStage stage(int sun, int planet, int ring, double module_mm, int planets);

// Teeth <= 60 (ring included), module 0.5, two or three planets, M6C12, K_mgd 1.25, ratio in [1, 1000].
RunConfig reduced_config();

struct OracleEntry {
  GearboxDesign design;
  double mass = 0.0;
  double efficiency = 0.0;
  double width = 0.0;
  double ratio = 0.0;
};

// Every feasible design of the reduced space, found by looping over raw tooth counts and asking
// check_all and the evaluator. Shares no code with the enumerator.
std::vector<OracleEntry> brute_force(Topology t, const Evaluator& ev);

// Index of the argmin of `key` (ties: smaller X), or -1 when empty.
template <typename Key>
int argmin(const std::vector<OracleEntry>& entries, Key key) {
  int best = -1;
  double best_key = 0.0;
  for (int i = 0; i < static_cast<int>(entries.size()); ++i) {
    const double k = key(entries[static_cast<std::size_t>(i)]);
    if (best < 0 || k < best_key ||
        (k == best_key && entries[static_cast<std::size_t>(i)].design.variables() <
                              entries[static_cast<std::size_t>(best)].design.variables())) {
      best = i;
      best_key = k;
    }
  }
  return best;
}

}  // namespace testsupport

namespace testsupport {

// Up to `per_topology` random designs per topology that pass every constraint and can be built,
// drawn from the default search space.
std::vector<GearboxDesign> sample_feasible(const Evaluator& ev, int per_topology, unsigned seed);

// Additivity, monotonicity and planet-multiplicity checks on one design; empty when all hold.
std::vector<std::string> mass_property_failures(const GearboxDesign& d, const Evaluator& ev);

}  // namespace testsupport
