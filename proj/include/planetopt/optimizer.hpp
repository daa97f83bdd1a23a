#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "planetopt/catalog.hpp"
#include "planetopt/constraints.hpp"
#include "planetopt/design.hpp"
#include "planetopt/dimensions.hpp"
#include "planetopt/gear_kinematics.hpp"
#include "planetopt/mass_model.hpp"
#include "planetopt/sizing.hpp"

namespace planetopt {

// C = K_m M + (-K_e) eta + K_w W + K_g |GR_req - GR|. The ratio term only applies with a target.
struct CostWeights {
  double mass = 1.0;        // 1/kg
  double efficiency = 1.0;  // dimensionless
  double width = 0.01;      // 1/mm
  double ratio = 1.0;       // dimensionless
  std::optional<double> target;

  void validate() const;
};

double cost(const CostWeights& w, double mass_kg, double efficiency, double width_mm, double ratio);

// Everything an evaluation needs besides the design.
struct ProblemSetup {
  Catalog catalog;
  MotorSpec motor;
  ConstraintParams constraints;
  SizingParams sizing;
  MeshEfficiencyModel mesh;
  LayoutParams layout;
  MassTemplate mass_template;

  void validate() const;
  std::map<std::string, double> fixed_values() const;
};

struct DesignMetrics {
  GearRatio ratio;
  double efficiency = 0.0;
  double mass = 0.0;            // kg, M_act
  double gearbox_width = 0.0;   // mm
  double actuator_width = 0.0;  // mm, W_p
};

struct DesignEvaluation {
  GearboxDesign design;
  bool has_metrics = false;  // false when the design cannot be sized or built
  GearRatio ratio;
  double efficiency = 0.0;
  WidthBreakdown widths;
  MassBreakdown mass;
  double cost = 0.0;
  FeasibilityReport feasibility;
};

class Evaluator {
 public:
  explicit Evaluator(ProblemSetup setup);

  const ProblemSetup& setup() const noexcept { return setup_; }
  const MassModel& mass_model() const noexcept { return mass_; }
  std::int64_t max_diameter_um() const noexcept { return dmax_um_; }

  // Fast path for the search; nullopt when the design is degenerate or the catalog cannot build it.
  std::optional<DesignMetrics> metrics(const GearboxDesign& design, const GearRatio& ratio,
                                       MassModel::Scratch& scratch) const;
  std::optional<DesignMetrics> metrics(const GearboxDesign& design) const;

  // Full report: all constraint families plus metrics and breakdowns.
  DesignEvaluation evaluate(const GearboxDesign& design, const CostWeights& weights) const;

 private:
  ProblemSetup setup_;
  MassModel mass_;
  std::int64_t dmax_um_ = 0;
};

struct RatioWindow {
  Rational lo;
  Rational hi;
};

// Every design of `topology` satisfying families II-VI, and with a window also family I. The sink
// sees designs in a fixed order.
void enumerate_designs(Topology topology, std::int64_t max_diameter_um, const ConstraintParams& params,
                       const std::optional<RatioWindow>& window, const std::function<void(const GearboxDesign&)>& sink);
std::vector<GearboxDesign> enumerate_designs(Topology topology, std::int64_t max_diameter_um,
                                             const ConstraintParams& params,
                                             const std::optional<RatioWindow>& window = std::nullopt);

struct SearchStats {
  std::uint64_t candidates = 0;  // designs passing II-VI inside the ratio window
  std::uint64_t feasible = 0;    // candidates also passing I-VI; a design the catalog cannot build still counts
  double wall_seconds = 0.0;
  int workers = 1;
};

struct OptimizeResult {
  Topology topology = Topology::sspg;
  std::optional<DesignEvaluation> best;
  SearchStats stats;
};

// Total order used to pick the optimum: cost, then X lexicographically.
bool better(double cost_a, const GearboxDesign& a, double cost_b, const GearboxDesign& b) noexcept;

// Global optimum over [constraints.gr_min, constraints.gr_max]. workers <= 0 uses the hardware count.
OptimizeResult optimize(Topology topology, const Evaluator& evaluator, const CostWeights& weights, int workers = 0);

struct SweepRow {
  Topology topology = Topology::sspg;
  int bin_lo = 0;
  int bin_hi = 0;
  std::optional<DesignEvaluation> best;
  std::uint64_t feasible = 0;  // designs satisfying I-VI in the bin
};

struct SweepResult {
  std::vector<SweepRow> rows;  // topology order as requested, then ascending bins
  std::vector<std::pair<Topology, SearchStats>> stats;
};

// Unit bins [g, g+1] for g in [g_lo, g_hi), range mode (K_g = 0). One enumeration per topology
// serves all bins.
SweepResult sweep(const std::vector<Topology>& topologies, const Evaluator& evaluator, int g_lo, int g_hi,
                  CostWeights weights, int workers = 0);

int resolve_workers(int requested) noexcept;

}  // namespace planetopt
