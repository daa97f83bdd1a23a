#include <doctest.h>

#include "planetopt/config.hpp"

using namespace planetopt;

TEST_CASE("shipped defaults") {
  const RunConfig c = default_config();
  CHECK_NOTHROW(c.validate());
  CHECK(c.motor == "MAD-M6C12");
  CHECK(c.constraints.diameter_factor == 1.25);
  CHECK(c.constraints.module_set.size() == 5);
  CHECK(c.output == "out");
  CHECK_NOTHROW(make_setup(c));
}

TEST_CASE("overlay and strict keys") {
  const RunConfig c = parse_config(R"(
motor: MN8014
workers: 3
constraints: {gr_min: 5, gr_max: 9, modules: [0.5, 1.0], interference: classical, ring_order: relaxed}
weights: {mass: 2, target: 7.5}
sweep: {min: 5, max: 10}
)",
                                   "/base");
  CHECK(c.motor == "MN8014");
  CHECK(c.workers == 3);
  CHECK(c.constraints.gr_min == 5);
  CHECK(c.constraints.module_set == std::vector<Module>{Module::from_mm(0.5), Module::from_mm(1.0)});
  CHECK(c.constraints.interference == InterferenceRule::classical);
  CHECK(c.constraints.ring_order == RingOrderRule::relaxed);
  CHECK(c.weights.mass == 2);
  CHECK(c.weights.target == 7.5);
  CHECK(c.weights.efficiency == 1);  // untouched keys keep the base value
  CHECK(c.sweep_max == 10);
  CHECK(parse_config("output: res", "/base").output == "/base/res");

  CHECK_THROWS(parse_config("motr: x", "."));
  CHECK_THROWS(parse_config("constraints: {grmin: 1}", "."));
  CHECK_THROWS(parse_config("constraints: {interference: fancy}", "."));
  CHECK_THROWS(parse_config("workers: many", "."));
  CHECK_THROWS(parse_config("[1, 2", "."));
  CHECK_THROWS(load_config("/nonexistent.yaml"));
}

TEST_CASE("ratio target") {
  RunConfig c = default_config();
  apply_ratio_target(c, 20, false);
  CHECK(c.constraints.gr_min == 19);
  CHECK(c.constraints.gr_max == 21);
  CHECK(c.weights.target == 20);
  RunConfig d = default_config();
  d.constraints.gr_min = 10;
  apply_ratio_target(d, 20, true);
  CHECK(d.constraints.gr_min == 10);
}

TEST_CASE("invalid settings") {
  RunConfig c = default_config();
  c.constraints.gr_min = 10;
  c.constraints.gr_max = 5;
  CHECK_THROWS(c.validate());
  c = default_config();
  c.motor = "nope";
  CHECK_THROWS_AS(make_setup(c), CatalogError);
  c = default_config();
  c.catalog = "/nonexistent";
  CHECK_THROWS_AS(make_setup(c), CatalogError);
}

TEST_CASE("json echo") {
  const auto j = to_json(default_config());
  CHECK(j["motor"] == "MAD-M6C12");
  CHECK(j["weights"]["target"].is_null());
  CHECK(j["constraints"]["modules"].size() == 5);
}
