#include <doctest.h>

#include "planetopt/catalog.hpp"

using namespace planetopt;

namespace {
const char* kSmall = R"(
motors:
  - {name: M, outer_diameter: 50, stack_length: 20, mass: 0.1, peak_torque: 1, shaft_diameter: 5, bolt_circle_diameter: 30, bolt_count: 4}
bearings:
  - {designation: "61802", bore: 15, outer_diameter: 24, width: 5, mass: 0.0074}
  - {designation: "61800", bore: 10, outer_diameter: 19, width: 5, mass: 0.0055}
  - {designation: "B", bore: 20, outer_diameter: 30, width: 5, mass: 0.0070}
  - {designation: "A", bore: 20, outer_diameter: 30, width: 5, mass: 0.0070}
  - {designation: "61806", bore: 30, outer_diameter: 42, width: 7, mass: 0.026}
fasteners:
  - {designation: M3x10, nominal_diameter: 3, length: 10, mass: 0.001}
  - {designation: M3x8, nominal_diameter: 3, length: 8, mass: 0.0008}
materials:
  - {name: PLA, density: 1240, allowable_bending_stress: 30}
)";
}

TEST_CASE("shipped catalog") {
  const Catalog c = load_catalog(PLANETOPT_DATA_DIR);
  CHECK(c.motor("MAD-M6C12").outer_diameter == 72.0);
  CHECK(c.motor("MN8014").outer_diameter == 87.8);
  CHECK(c.material("PLA").density == 1240.0);
  CHECK_FALSE(c.bearings().empty());
  CHECK_THROWS_AS(c.motor("nope"), CatalogError);
}

TEST_CASE("bearing selection") {
  const Catalog c = parse_catalog(kSmall);
  CHECK(c.select_bearing(10).designation == "61800");
  // 61802 (15 mm) is heavier than the 20 mm pair, which tie on mass and resolve by name.
  CHECK(c.select_bearing(12).designation == "A");
  CHECK(c.select_bearing(21).designation == "61806");
  CHECK_THROWS_AS(c.select_bearing(40), InfeasibleDesign);
  CHECK(c.select_fastener(3, 9).designation == "M3x10");
  CHECK(c.select_fastener(3, 8).designation == "M3x8");
  CHECK_THROWS(c.select_fastener(3, 20));
}

TEST_CASE("plain lookup: smallest sufficient bore when lighter parts are larger") {
  const Catalog c = parse_catalog(R"(
motors:
  - {name: M, outer_diameter: 50, stack_length: 20, mass: 0.1, peak_torque: 1, shaft_diameter: 5, bolt_circle_diameter: 30, bolt_count: 4}
materials:
  - {name: PLA, density: 1240, allowable_bending_stress: 30}
bearings:
  - {designation: "61800", bore: 10, outer_diameter: 19, width: 5, mass: 0.0055}
  - {designation: "61802", bore: 15, outer_diameter: 24, width: 5, mass: 0.0074}
)");
  CHECK(select_bearing(10, c).designation == "61800");
  CHECK(select_bearing(12, c).designation == "61802");
  CHECK_THROWS_AS(select_bearing(40, c), InfeasibleDesign);
}

TEST_CASE("catalog errors") {
  CHECK_THROWS_AS(parse_catalog(""), CatalogError);
  CHECK_THROWS_AS(parse_catalog("motors: [{name: X, outer_diameter: -1}]"), CatalogError);
  CHECK_THROWS_AS(parse_catalog("bearings: [{designation: Z, bore: 0, outer_diameter: 5, width: 1, mass: 1}]"),
                  CatalogError);
  CHECK_THROWS_AS(parse_catalog("motors: [oops"), CatalogError);
  CHECK_THROWS_AS(load_catalog("/nonexistent/catalog"), CatalogError);
  try {
    parse_catalog("motors: [{name: X, outer_diameter: -1, stack_length: 1, mass: 1, peak_torque: 1}]");
  } catch (const CatalogError& e) {
    CHECK(std::string(e.what()).find("X") != std::string::npos);
  }
}
