#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "planetopt/dimensions.hpp"
#include "planetopt/optimizer.hpp"

namespace planetopt {

struct IoError : Error {
  using Error::Error;
};

struct CadFormatError : Error {
  using Error::Error;
};

// Bumped whenever names or meanings in the file change.
inline constexpr int kVariableSchemaVersion = 1;

struct CadVariable {
  std::string name;
  double value = 0.0;
  Unit unit = Unit::mm;
  DimensionGroup group = DimensionGroup::dependent;

  bool operator==(const CadVariable&) const = default;
};

struct CadVariableSet {
  Topology topology = Topology::sspg;
  std::vector<CadVariable> variables;  // group order, then name

  const CadVariable* find(std::string_view name) const noexcept;
  std::size_t count(DimensionGroup g) const noexcept;

  bool operator==(const CadVariableSet&) const = default;
};

// Dependent dimensions of a staged design, in definition order. Throws DesignError for a design
// without stages.
std::vector<std::pair<std::string, double>> derive_dependent_dimensions(const GearboxDesign& design,
                                                                        const WidthBreakdown& widths,
                                                                        const ProblemSetup& setup);

// Every named dimension of the design, unrounded. The ten members of X are always present; the
// inactive ones are zero.
CadVariableSet build_variable_set(const GearboxDesign& design, const WidthBreakdown& widths,
                                  const ProblemSetup& setup);
CadVariableSet build_variable_set(const DesignEvaluation& evaluation, const ProblemSetup& setup);

// Values as the file stores them: 3 decimals for mm and deg, 6 for dimensionless, whole counts.
double quantize(double value, Unit unit);
CadVariableSet quantized(const CadVariableSet& set);

std::string format_variable_file(const CadVariableSet& set);
CadVariableSet parse_variable_file(std::string_view text);

void export_variable_file(const CadVariableSet& set, const std::filesystem::path& path);
CadVariableSet read_variable_file(const std::filesystem::path& path);

// Re-evaluates every dependent expression of the schema from the set's own values, by name.
// Returns one message per dependent value that differs by more than `tolerance`.
std::vector<std::string> check_dependent_consistency(const CadVariableSet& set, const DimensionSchema& schema,
                                                     double tolerance = 1e-9);

}  // namespace planetopt
