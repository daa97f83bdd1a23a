#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "planetopt/optimizer.hpp"

namespace planetopt {

// Everything a run needs, resolved before any search starts.
struct RunConfig {
  std::filesystem::path catalog;     // directory with motors.yaml, parts.yaml, materials.yaml
  std::filesystem::path components;  // component template
  std::string motor = "MAD-M6C12";
  ConstraintParams constraints;
  SizingParams sizing;
  MeshEfficiencyModel mesh;
  LayoutParams layout;
  CostWeights weights;
  int workers = 0;  // 0: hardware concurrency
  int sweep_min = 4;
  int sweep_max = 60;
  std::filesystem::path output = "out";

  void validate() const;
};

// Defaults with the catalog and template shipped in the source tree.
RunConfig default_config();

// Overlays a YAML document on `base`. Relative paths resolve against `base_dir`. Unknown keys are
// errors.
RunConfig parse_config(std::string_view yaml, const std::filesystem::path& base_dir, RunConfig base = default_config());
RunConfig load_config(const std::filesystem::path& path, RunConfig base = default_config());

// Sets the ratio bounds to [target - 1, target + 1] unless they were given explicitly.
void apply_ratio_target(RunConfig& config, double target, bool bounds_given);

nlohmann::ordered_json to_json(const RunConfig& config);

// Loads the catalog and template and picks the motor. Throws CatalogError.
ProblemSetup make_setup(const RunConfig& config);

}  // namespace planetopt
