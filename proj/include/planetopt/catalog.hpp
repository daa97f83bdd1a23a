#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "planetopt/design.hpp"

namespace planetopt {

struct CatalogError : Error {
  using Error::Error;
};

// Units throughout: mm, kg, N*m, MPa, kg/m^3.
struct MotorSpec {
  std::string name;
  double outer_diameter = 0.0;
  double stack_length = 0.0;
  double mass = 0.0;
  double peak_torque = 0.0;
  double shaft_diameter = 0.0;
  double bolt_circle_diameter = 0.0;
  int bolt_count = 0;

  void validate() const;
};

struct BearingEntry {
  std::string designation;
  double bore = 0.0;
  double outer_diameter = 0.0;
  double width = 0.0;
  double mass = 0.0;

  void validate() const;
};

struct FastenerEntry {
  std::string designation;
  double nominal_diameter = 0.0;
  double length = 0.0;
  double mass = 0.0;

  void validate() const;
};

struct Material {
  std::string name;
  double density = 0.0;                   // kg/m^3
  double allowable_bending_stress = 0.0;  // MPa

  void validate() const;
};

// Read-only registry of parts. Lookups never mutate, so a Catalog can be shared across threads.
class Catalog {
 public:
  Catalog() = default;
  Catalog(std::vector<MotorSpec> motors, std::vector<BearingEntry> bearings, std::vector<FastenerEntry> fasteners,
          std::vector<Material> materials);

  const std::vector<MotorSpec>& motors() const noexcept { return motors_; }
  const std::vector<BearingEntry>& bearings() const noexcept { return bearings_; }
  const std::vector<FastenerEntry>& fasteners() const noexcept { return fasteners_; }
  const std::vector<Material>& materials() const noexcept { return materials_; }

  const MotorSpec& motor(std::string_view name) const;
  const Material& material(std::string_view name) const;
  const BearingEntry& bearing(std::string_view designation) const;
  const FastenerEntry& fastener(std::string_view designation) const;

  // Lightest bearing with bore >= bore_required; equal masses resolve by designation.
  // Throws InfeasibleDesign when nothing is large enough.
  const BearingEntry& select_bearing(double bore_required) const;

  // Lightest fastener of the given nominal diameter that is at least min_length long.
  const FastenerEntry& select_fastener(double nominal_diameter, double min_length) const;

 private:
  void index();

  std::vector<MotorSpec> motors_;
  std::vector<BearingEntry> bearings_;  // sorted by bore
  std::vector<FastenerEntry> fasteners_;
  std::vector<Material> materials_;
  std::vector<std::size_t> best_from_;  // best_from_[i]: lightest bearing among bearings_[i..]
};

// Loads a catalog from a directory (motors.yaml, parts.yaml, materials.yaml) or from a single file
// holding any of the `motors`, `bearings`, `fasteners`, `materials` sequences.
Catalog load_catalog(const std::filesystem::path& path);

// Parses one catalog document; used by load_catalog and by tests with inline text.
Catalog parse_catalog(std::string_view text, std::string_view source = "<string>");

const BearingEntry& select_bearing(double bore_required, const Catalog& catalog);

}  // namespace planetopt
