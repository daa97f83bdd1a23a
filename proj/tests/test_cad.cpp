#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "planetopt/cad_export.hpp"
#include "support.hpp"

using namespace planetopt;

namespace {
struct Fixture {
  ProblemSetup setup;
  DesignEvaluation eval;
  explicit Fixture(Topology t) : setup(make_setup(testsupport::reference_config(t))) {
    eval = Evaluator(setup).evaluate(testsupport::reference(t).design, CostWeights{});
  }
};
}  // namespace

TEST_CASE("variable sets of the reference designs") {
  for (Topology t : kAllTopologies) {
    CAPTURE(to_string(t));
    const Fixture f(t);
    const CadVariableSet set = build_variable_set(f.eval, f.setup);
    CHECK(set.topology == t);
    CHECK(set.count(DimensionGroup::optimization) == 10);
    CHECK(set.variables.size() >= 120);
    CHECK(set.variables.size() <= 200);
    for (auto name : variable_names()) CHECK(set.find(name) != nullptr);
    CHECK(set.find("module_1")->value == doctest::Approx(f.eval.design.stage1.module.mm()));
    // Groups in order, names sorted within a group, no duplicates.
    for (std::size_t i = 1; i < set.variables.size(); ++i) {
      const auto& a = set.variables[i - 1];
      const auto& b = set.variables[i];
      CHECK((a.group < b.group || (a.group == b.group && a.name < b.name)));
    }
    const auto schema = layout_schema(f.eval.design, f.setup.motor, f.setup.layout);
    CHECK(check_dependent_consistency(set, schema).empty());
    const auto dep = derive_dependent_dimensions(f.eval.design, f.eval.widths, f.setup);
    CHECK(dep.size() == set.count(DimensionGroup::dependent));
  }
}

TEST_CASE("file round trip is byte identical") {
  for (Topology t : kAllTopologies) {
    const Fixture f(t);
    const CadVariableSet set = build_variable_set(f.eval, f.setup);
    const std::string a = format_variable_file(set);
    const CadVariableSet back = parse_variable_file(a);
    CHECK(back == quantized(set));
    CHECK(format_variable_file(back) == a);
    const auto path = std::filesystem::temp_directory_path() / ("planetopt_rt_" + std::string(to_string(t)) + ".txt");
    export_variable_file(set, path);
    CHECK(read_variable_file(path) == back);
    std::filesystem::remove(path);
  }
}

TEST_CASE("quantization") {
  CHECK(quantize(1.23456, Unit::mm) == 1.235);
  CHECK(quantize(0.1234567, Unit::dimensionless) == 0.123457);
  CHECK(quantize(2.6, Unit::count) == 3);
  CHECK(quantize(-0.0001, Unit::mm) == 0.0);
}

TEST_CASE("malformed files") {
  CHECK_THROWS_AS(parse_variable_file(""), CadFormatError);
  CHECK_THROWS_AS(parse_variable_file("# planetopt variables\n# schema = 99\n# topology = sspg\n"), CadFormatError);
  const std::string head = "# planetopt variables\n# schema = 1\n# topology = sspg\n\n# fixed dimensions\n";
  CHECK_THROWS_AS(parse_variable_file(head + "a = 1 mm\na = 2 mm\n"), CadFormatError);
  CHECK_THROWS_AS(parse_variable_file(head + "a = x mm\n"), CadFormatError);
  CHECK_THROWS_AS(parse_variable_file(head + "a = 1 furlong\n"), CadFormatError);
  CHECK_THROWS_AS(read_variable_file("/nonexistent/x.txt"), IoError);
  CHECK_THROWS_AS(export_variable_file(CadVariableSet{}, "/nonexistent/dir/x.txt"), IoError);
}

TEST_CASE("gear-less design has no dependent gear dimensions") {
  const Fixture f(Topology::sspg);
  GearboxDesign none;
  CHECK_THROWS_AS(derive_dependent_dimensions(none, f.eval.widths, f.setup), DesignError);
}
