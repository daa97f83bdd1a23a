#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace planetopt {

// -----------------------------
// Errors
// -----------------------------
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Structurally invalid design (wrong zero pattern, missing gear for a formula).
struct DesignError : Error {
  using Error::Error;
};

// Formula is singular for this design (WPG with I2 = 1, vanishing denominators).
struct DegenerateDesign : Error {
  using Error::Error;
};

// Design cannot be built from catalog parts (e.g. no bearing large enough).
struct InfeasibleDesign : Error {
  using Error::Error;
};

enum class Topology : int { sspg = 0, cpg = 1, dspg = 2, wpg = 3 };

inline constexpr std::array<Topology, 4> kAllTopologies{Topology::sspg, Topology::cpg, Topology::dspg,
                                                        Topology::wpg};

std::string_view to_string(Topology t) noexcept;
std::optional<Topology> parse_topology(std::string_view name) noexcept;

// Gear module stored in integer micrometres so that products like m*N compare exactly.
class Module {
 public:
  constexpr Module() = default;

  static constexpr Module from_micrometres(std::int32_t um) noexcept {
    Module m;
    m.um_ = um;
    return m;
  }
  static Module from_mm(double mm) { return from_micrometres(static_cast<std::int32_t>(std::llround(mm * 1000.0))); }

  constexpr std::int32_t micrometres() const noexcept { return um_; }
  constexpr double mm() const noexcept { return um_ / 1000.0; }
  constexpr bool is_zero() const noexcept { return um_ == 0; }

  auto operator<=>(const Module&) const = default;

 private:
  std::int32_t um_ = 0;
};

// One planetary layer. Inactive members are zero.
struct GearStage {
  int sun = 0;
  int planet = 0;
  int ring = 0;
  Module module{};
  int planets = 0;

  bool is_zero() const noexcept { return sun == 0 && planet == 0 && ring == 0 && module.is_zero() && planets == 0; }

  auto operator<=>(const GearStage&) const = default;
};

// X = [Ns1, Np1, Nr1, Ns2, Np2, Nr2, m1, m2, np1, np2] with modules in micrometres.
using VariableVector = std::array<std::int64_t, 10>;

struct GearboxDesign {
  Topology topology = Topology::sspg;
  GearStage stage1{};
  GearStage stage2{};

  VariableVector variables() const noexcept {
    return {stage1.sun,     stage1.planet,  stage1.ring,
            stage2.sun,     stage2.planet,  stage2.ring,
            stage1.module.micrometres(), stage2.module.micrometres(),
            stage1.planets, stage2.planets};
  }

  bool has_stages() const noexcept { return !(stage1.is_zero() && stage2.is_zero()); }

  bool operator==(const GearboxDesign&) const = default;
};

// Checks the zero pattern and shared-planet rules of the topology. Returns an empty string when the
// design is structurally valid, otherwise a description of the first problem.
std::string topology_problem(const GearboxDesign& design);

// Throws DesignError when topology_problem() is non-empty.
void require_valid_topology(const GearboxDesign& design);

std::string describe(const GearboxDesign& design);

}  // namespace planetopt
