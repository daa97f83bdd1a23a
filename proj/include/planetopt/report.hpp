#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "planetopt/config.hpp"
#include "planetopt/optimizer.hpp"

namespace planetopt {

nlohmann::ordered_json design_json(const GearboxDesign& design);
nlohmann::ordered_json evaluation_json(const DesignEvaluation& e);
nlohmann::ordered_json feasibility_json(const FeasibilityReport& r);

// Keys whose values depend on the machine rather than the inputs.
inline constexpr const char* kRunInfoKey = "run";

nlohmann::ordered_json optimize_json(const std::vector<OptimizeResult>& results, const RunConfig& config);
nlohmann::ordered_json sweep_json(const SweepResult& sweep, const RunConfig& config);

// topology,bin_lo,bin_hi,feasible,mass_kg,efficiency,width_mm,cost, then the ten members of X.
// Infeasible bins leave the metric and X fields empty.
std::string sweep_csv(const SweepResult& sweep);
std::string optimize_csv(const std::vector<OptimizeResult>& results);

// Four line charts (mass, efficiency, width, cost against ratio), one series per topology.
std::string sweep_svg(const SweepResult& sweep);

// Short human-readable summary.
std::string evaluation_table(const DesignEvaluation& e);

// Ratio as "p/q" (or "p" for integers).
std::string rational_string(const Rational& r);

}  // namespace planetopt
