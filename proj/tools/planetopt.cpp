// planetopt: search, sweep, evaluate and export planetary gearbox designs.
#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "planetopt/cad_export.hpp"
#include "planetopt/config.hpp"
#include "planetopt/report.hpp"

using namespace planetopt;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kUsage = 2, kInfeasible = 3, kIo = 4, kCatalog = 5 };

struct UsageError : Error {
  using Error::Error;
};

struct Flags {
  std::string config;
  std::string catalog;
  std::string motor;
  std::string gearbox = "all";
  std::optional<double> gr_min, gr_max, gr_target, kmgd;
  std::string weights;
  std::optional<int> workers;
  std::string out;
  std::string format;
  // eval / export
  std::string x;
  std::string from;
  std::string file;
  bool no_plot = false;
};

std::vector<Topology> topologies(const std::string& s) {
  if (s == "all") return {kAllTopologies.begin(), kAllTopologies.end()};
  std::vector<Topology> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto t = parse_topology(item);
    if (!t) throw UsageError("unknown gearbox '" + item + "'");
    out.push_back(*t);
  }
  if (out.empty()) throw UsageError("empty --gearbox");
  return out;
}

Topology single_topology(const Flags& f) {
  auto ts = topologies(f.gearbox);
  if (ts.size() != 1) throw UsageError("this command needs one --gearbox");
  return ts.front();
}

std::vector<double> numbers(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string("bad number in ") + what + ": '" + item + "'");
    }
  }
  return out;
}

RunConfig resolve_config(const Flags& f) {
  RunConfig c = default_config();
  if (!f.config.empty()) {
    if (!fs::exists(f.config)) throw IoError("config file not found: " + f.config);
    try {
      c = load_config(f.config, c);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  if (!f.catalog.empty()) c.catalog = f.catalog;
  if (!f.motor.empty()) c.motor = f.motor;
  if (f.kmgd) c.constraints.diameter_factor = *f.kmgd;
  if (f.gr_min) c.constraints.gr_min = *f.gr_min;
  if (f.gr_max) c.constraints.gr_max = *f.gr_max;
  if (f.gr_target) apply_ratio_target(c, *f.gr_target, f.gr_min || f.gr_max);
  if (f.gr_min && f.gr_max && *f.gr_min > *f.gr_max) throw UsageError("--gr-min exceeds --gr-max");
  if (!f.weights.empty()) {
    const auto w = numbers(f.weights, "--weights");
    if (w.size() != 4) throw UsageError("--weights needs km,ke,kw,kg");
    c.weights.mass = w[0];
    c.weights.efficiency = w[1];
    c.weights.width = w[2];
    c.weights.ratio = w[3];
  }
  if (f.workers) c.workers = *f.workers;
  if (!f.out.empty()) c.output = f.out;
  try {
    c.validate();
  } catch (const CatalogError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return c;
}

GearboxDesign design_from_x(Topology t, const std::string& x) {
  const auto v = numbers(x, "--x");
  if (v.size() != 10) throw UsageError("--x needs Ns1,Np1,Nr1,Ns2,Np2,Nr2,m1,m2,np1,np2");
  auto whole = [&](std::size_t i) {
    if (v[i] != std::floor(v[i]) || v[i] < 0) throw UsageError("--x entry " + std::to_string(i + 1) + " must be a whole number");
    return static_cast<int>(v[i]);
  };
  GearboxDesign d;
  d.topology = t;
  d.stage1 = {whole(0), whole(1), whole(2), Module::from_mm(v[6]), whole(8)};
  d.stage2 = {whole(3), whole(4), whole(5), Module::from_mm(v[7]), whole(9)};
  return d;
}

void write_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string format_of(const Flags& f, const char* fallback) {
  const std::string fmt = f.format.empty() ? fallback : f.format;
  if (fmt != "json" && fmt != "csv") throw UsageError("--format must be json or csv");
  return fmt;
}

int cmd_optimize(const Flags& f) {
  const RunConfig c = resolve_config(f);
  const auto ts = topologies(f.gearbox);
  const std::string fmt = format_of(f, "json");
  const Evaluator ev(make_setup(c));
  std::vector<OptimizeResult> results;
  for (Topology t : ts) {
    results.push_back(optimize(t, ev, c.weights, c.workers));
    const auto& r = results.back();
    std::cout << to_string(t) << ": " << r.stats.candidates << " candidates, " << r.stats.feasible << " feasible, "
              << r.stats.wall_seconds << " s\n";
    if (r.best)
      std::cout << evaluation_table(*r.best);
    else
      std::cout << "  no feasible design\n";
  }
  const fs::path path = c.output / ("optimize." + fmt);
  write_file(path, fmt == "json" ? optimize_json(results, c).dump(2) + "\n" : optimize_csv(results));
  std::cout << "wrote " << path.string() << "\n";
  const bool any = std::any_of(results.begin(), results.end(), [](const OptimizeResult& r) { return r.best.has_value(); });
  return any ? kOk : kInfeasible;
}

int cmd_sweep(const Flags& f) {
  RunConfig c = resolve_config(f);
  auto as_bin = [](double v, const char* what) {
    if (v != std::floor(v)) throw UsageError(std::string(what) + " must be a whole number for a sweep");
    return static_cast<int>(v);
  };
  if (f.gr_min) c.sweep_min = as_bin(*f.gr_min, "--gr-min");
  if (f.gr_max) c.sweep_max = as_bin(*f.gr_max, "--gr-max");
  if (c.sweep_min >= c.sweep_max) throw UsageError("sweep needs --gr-min < --gr-max");
  c.weights.target.reset();
  const std::string fmt = format_of(f, "csv");
  const Evaluator ev(make_setup(c));
  const SweepResult r = sweep(topologies(f.gearbox), ev, c.sweep_min, c.sweep_max, c.weights, c.workers);
  for (const auto& [t, s] : r.stats)
    std::cout << to_string(t) << ": " << s.candidates << " candidates, " << s.wall_seconds << " s\n";
  const fs::path data = c.output / ("sweep." + fmt);
  write_file(data, fmt == "csv" ? sweep_csv(r) : sweep_json(r, c).dump(2) + "\n");
  std::cout << "wrote " << data.string() << "\n";
  if (fmt == "csv") {
    // The CSV has no room for provenance; keep the resolved config next to it.
    const fs::path cfg = c.output / "sweep.config.json";
    write_file(cfg, to_json(c).dump(2) + "\n");
  }
  if (!f.no_plot) {
    const fs::path svg = c.output / "sweep.svg";
    write_file(svg, sweep_svg(r));
    std::cout << "wrote " << svg.string() << "\n";
  }
  return kOk;
}

int cmd_eval(const Flags& f) {
  const RunConfig c = resolve_config(f);
  if (f.x.empty()) throw UsageError("eval needs --x");
  const GearboxDesign d = design_from_x(single_topology(f), f.x);
  const Evaluator ev(make_setup(c));
  const DesignEvaluation e = ev.evaluate(d, c.weights);
  std::cout << evaluation_table(e);
  nlohmann::ordered_json j{{"command", "eval"}, {"config", to_json(c)}, {"evaluation", evaluation_json(e)}};
  const fs::path path = c.output / "eval.json";
  write_file(path, j.dump(2) + "\n");
  std::cout << "wrote " << path.string() << "\n";
  return e.feasibility.feasible ? kOk : kInfeasible;
}

GearboxDesign design_from_result(const std::string& file, const Flags& f) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read " + file);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(file + ": " + e.what());
  }
  const bool any = f.gearbox == "all";
  for (const auto& r : j.value("results", nlohmann::json::array())) {
    if (!r.contains("best")) continue;
    const auto& d = r["best"]["design"];
    const auto t = parse_topology(d["topology"].get<std::string>());
    if (!t || (!any && to_string(*t) != f.gearbox)) continue;
    std::string x;
    for (const auto& v : d["X"]) x += (x.empty() ? "" : ",") + v.dump();
    return design_from_x(*t, x);
  }
  throw UsageError(file + " holds no matching optimum");
}

int cmd_export(const Flags& f) {
  const RunConfig c = resolve_config(f);
  const ProblemSetup setup = make_setup(c);
  const Evaluator ev(setup);
  GearboxDesign d;
  if (!f.x.empty()) {
    d = design_from_x(single_topology(f), f.x);
  } else if (!f.from.empty()) {
    d = design_from_result(f.from, f);
  } else {
    const auto r = optimize(single_topology(f), ev, c.weights, c.workers);
    if (!r.best) {
      std::cout << "no feasible design\n";
      return kInfeasible;
    }
    d = r.best->design;
  }
  const DesignEvaluation e = ev.evaluate(d, c.weights);
  if (!e.feasibility.feasible) {
    std::cout << evaluation_table(e);
    return kInfeasible;
  }
  const CadVariableSet set = build_variable_set(e, setup);
  const fs::path path = f.file.empty() ? c.output / (std::string(to_string(d.topology)) + "_variables.txt") : fs::path(f.file);
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  export_variable_file(set, path);
  std::cout << "wrote " << set.variables.size() << " variables to " << path.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planetary gearbox design optimizer"};
  app.require_subcommand(1);
  Flags f;
  auto global = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "YAML run configuration")->envname("PLANETOPT_CONFIG");
    sub->add_option("--catalog", f.catalog, "catalog directory")->envname("PLANETOPT_CATALOG");
    sub->add_option("--motor", f.motor, "motor name")->envname("PLANETOPT_MOTOR");
    sub->add_option("--gearbox", f.gearbox, "sspg|cpg|dspg|wpg, comma separated, or all")->envname("PLANETOPT_GEARBOX");
    sub->add_option("--gr-min", f.gr_min, "lower ratio bound");
    sub->add_option("--gr-max", f.gr_max, "upper ratio bound");
    sub->add_option("--gr-target", f.gr_target, "target ratio (bounds default to target +/- 1)");
    sub->add_option("--kmgd", f.kmgd, "max gearbox diameter over motor diameter")->envname("PLANETOPT_KMGD");
    sub->add_option("--weights", f.weights, "km,ke,kw,kg")->envname("PLANETOPT_WEIGHTS");
    sub->add_option("--workers", f.workers, "search threads, 0 = hardware")->envname("PLANETOPT_WORKERS");
    sub->add_option("--out", f.out, "output directory")->envname("PLANETOPT_OUT");
    sub->add_option("--format", f.format, "json|csv")->envname("PLANETOPT_FORMAT");
  };
  auto* opt = app.add_subcommand("optimize", "global optimum per topology");
  auto* swp = app.add_subcommand("sweep", "best design per unit ratio bin");
  auto* evl = app.add_subcommand("eval", "check and evaluate one design");
  auto* exp = app.add_subcommand("export", "write the CAD variable file");
  for (auto* s : {opt, swp, evl, exp}) global(s);
  swp->add_flag("--no-plot", f.no_plot, "skip the SVG charts");
  for (auto* s : {evl, exp})
    s->add_option("--x", f.x, "Ns1,Np1,Nr1,Ns2,Np2,Nr2,m1,m2,np1,np2 (modules in mm)");
  exp->add_option("--from", f.from, "optimize.json to take the design from");
  exp->add_option("--file", f.file, "variable file path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  try {
    if (*opt) return cmd_optimize(f);
    if (*swp) return cmd_sweep(f);
    if (*evl) return cmd_eval(f);
    if (*exp) return cmd_export(f);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const CatalogError& e) {
    std::cerr << "catalog error: " << e.what() << "\n";
    return kCatalog;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kUsage;
}
