#include "planetopt/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

namespace planetopt {

using nlohmann::ordered_json;

namespace {

ordered_json stage_json(const GearStage& s) {
  return {{"sun", s.sun}, {"planet", s.planet}, {"ring", s.ring}, {"module_mm", s.module.mm()}, {"planets", s.planets}};
}

ordered_json violations_json(const std::vector<Violation>& v) {
  ordered_json a = ordered_json::array();
  for (const auto& x : v) a.push_back({{"family", std::string(to_string(x.family))}, {"detail", x.detail}});
  return a;
}

ordered_json stats_json(const SearchStats& s) {
  return {{"candidates", s.candidates}, {"feasible", s.feasible}};
}

ordered_json run_json(const SearchStats& s) { return {{"wall_seconds", s.wall_seconds}, {"workers", s.workers}}; }

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace

std::string rational_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

ordered_json design_json(const GearboxDesign& d) {
  ordered_json x = ordered_json::array();
  const VariableVector v = d.variables();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i == 6 || i == 7)
      x.push_back(static_cast<double>(v[i]) / 1000.0);
    else
      x.push_back(v[i]);
  }
  ordered_json j{{"topology", std::string(to_string(d.topology))}, {"X", x}, {"stage1", stage_json(d.stage1)}};
  if (!d.stage2.is_zero()) j["stage2"] = stage_json(d.stage2);
  return j;
}

ordered_json feasibility_json(const FeasibilityReport& r) {
  return {{"feasible", r.feasible}, {"violations", violations_json(r.violations)}, {"notes", violations_json(r.notes)}};
}

ordered_json evaluation_json(const DesignEvaluation& e) {
  ordered_json j{{"design", design_json(e.design)}};
  if (e.has_metrics) {
    j["ratio"] = {{"exact", rational_string(e.ratio.magnitude)},
                  {"signed", rational_string(e.ratio.signed_value)},
                  {"value", e.ratio.value},
                  {"reversed", e.ratio.reversed}};
    j["efficiency"] = e.efficiency;
    ordered_json faces = ordered_json::array();
    for (double b : e.widths.stage_face_widths) faces.push_back(b);
    j["widths_mm"] = {{"face", faces}, {"gearbox", e.widths.gearbox_width}, {"actuator", e.widths.actuator_width}};
    ordered_json comps = ordered_json::array();
    for (const auto& c : e.mass.components) {
      ordered_json cj{{"name", c.name}, {"count", c.count}, {"unit_kg", c.unit_mass}, {"kg", c.mass}};
      if (!c.part.empty()) cj["part"] = c.part;
      comps.push_back(cj);
    }
    j["mass_kg"] = {{"total", e.mass.total}, {"gearbox", e.mass.gearbox_mass}, {"motor", e.mass.motor_mass},
                    {"components", comps}};
    j["cost"] = e.cost;
  }
  j["feasibility"] = feasibility_json(e.feasibility);
  return j;
}

ordered_json optimize_json(const std::vector<OptimizeResult>& results, const RunConfig& config) {
  ordered_json out{{"command", "optimize"}, {"config", to_json(config)}};
  ordered_json rs = ordered_json::array();
  ordered_json run = ordered_json::array();
  for (const auto& r : results) {
    ordered_json j{{"topology", std::string(to_string(r.topology))}, {"feasible", r.best.has_value()}};
    if (r.best) j["best"] = evaluation_json(*r.best);
    j["statistics"] = stats_json(r.stats);
    rs.push_back(j);
    ordered_json rj = run_json(r.stats);
    rj["topology"] = std::string(to_string(r.topology));
    run.push_back(rj);
  }
  out["results"] = rs;
  out[kRunInfoKey] = run;
  return out;
}

ordered_json sweep_json(const SweepResult& sweep, const RunConfig& config) {
  ordered_json out{{"command", "sweep"}, {"config", to_json(config)}};
  ordered_json rows = ordered_json::array();
  for (const auto& r : sweep.rows) {
    ordered_json j{{"topology", std::string(to_string(r.topology))},
                   {"bin_lo", r.bin_lo},
                   {"bin_hi", r.bin_hi},
                   {"feasible", r.best.has_value()},
                   {"feasible_designs", r.feasible}};
    if (r.best) j["best"] = evaluation_json(*r.best);
    rows.push_back(j);
  }
  out["rows"] = rows;
  ordered_json stats = ordered_json::array(), run = ordered_json::array();
  for (const auto& [t, s] : sweep.stats) {
    ordered_json sj = stats_json(s);
    sj["topology"] = std::string(to_string(t));
    stats.push_back(sj);
    ordered_json rj = run_json(s);
    rj["topology"] = std::string(to_string(t));
    run.push_back(rj);
  }
  out["statistics"] = stats;
  out[kRunInfoKey] = run;
  return out;
}

namespace {

const char* kCsvHeader =
    "topology,bin_lo,bin_hi,feasible,mass_kg,efficiency,width_mm,cost,N_s1,N_p1,N_r1,N_s2,N_p2,N_r2,module_1,module_2,"
    "n_p1,n_p2\n";

std::string csv_metrics(const std::optional<DesignEvaluation>& best) {
  if (!best) return "false,,,,,,,,,,,,,,";
  const auto& e = *best;
  std::string s = "true," + fixed(e.mass.total, 6) + "," + fixed(e.efficiency, 6) + "," +
                  fixed(e.widths.actuator_width, 3) + "," + fixed(e.cost, 6);
  const VariableVector v = e.design.variables();
  for (std::size_t i = 0; i < v.size(); ++i)
    s += "," + ((i == 6 || i == 7) ? fixed(static_cast<double>(v[i]) / 1000.0, 3) : std::to_string(v[i]));
  return s;
}

}  // namespace

std::string sweep_csv(const SweepResult& sweep) {
  std::string out = kCsvHeader;
  for (const auto& r : sweep.rows)
    out += std::string(to_string(r.topology)) + "," + std::to_string(r.bin_lo) + "," + std::to_string(r.bin_hi) + "," +
           csv_metrics(r.best) + "\n";
  return out;
}

std::string optimize_csv(const std::vector<OptimizeResult>& results) {
  std::string out = kCsvHeader;
  for (const auto& r : results) {
    std::string lo, hi;
    if (r.best) {
      lo = fixed(r.best->ratio.value, 6);
      hi = lo;
    }
    out += std::string(to_string(r.topology)) + "," + lo + "," + hi + "," + csv_metrics(r.best) + "\n";
  }
  return out;
}

std::string sweep_svg(const SweepResult& sweep) {
  struct Panel {
    const char* title;
    double (*get)(const DesignEvaluation&);
  };
  const Panel panels[4] = {
      {"Mass (kg)", [](const DesignEvaluation& e) { return e.mass.total; }},
      {"Efficiency", [](const DesignEvaluation& e) { return e.efficiency; }},
      {"Width (mm)", [](const DesignEvaluation& e) { return e.widths.actuator_width; }},
      {"Cost", [](const DesignEvaluation& e) { return e.cost; }},
  };
  const std::map<Topology, const char*> colour{
      {Topology::sspg, "#1f77b4"}, {Topology::cpg, "#ff7f0e"}, {Topology::dspg, "#2ca02c"}, {Topology::wpg, "#d62728"}};
  const double pw = 420, ph = 280, ml = 60, mr = 20, mt = 30, mb = 40;
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  for (const auto& r : sweep.rows) {
    xlo = std::min(xlo, static_cast<double>(r.bin_lo));
    xhi = std::max(xhi, static_cast<double>(r.bin_hi));
  }
  if (!std::isfinite(xlo)) xlo = 0, xhi = 1;

  std::string s;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" font-family=\"sans-serif\" "
                "font-size=\"11\">\n",
                2 * pw, 2 * ph + 30);
  s += buf;
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int p = 0; p < 4; ++p) {
    const double ox = (p % 2) * pw, oy = (p / 2) * ph;
    double ylo = std::numeric_limits<double>::infinity(), yhi = -ylo;
    for (const auto& r : sweep.rows)
      if (r.best) {
        ylo = std::min(ylo, panels[p].get(*r.best));
        yhi = std::max(yhi, panels[p].get(*r.best));
      }
    if (!std::isfinite(ylo)) ylo = 0, yhi = 1;
    if (yhi - ylo < 1e-12) ylo -= 0.5, yhi += 0.5;
    const double pad = 0.05 * (yhi - ylo);
    ylo -= pad;
    yhi += pad;
    const double x0 = ox + ml, x1 = ox + pw - mr, y0 = oy + ph - mb, y1 = oy + mt;
    auto X = [&](double v) { return x0 + (v - xlo) / (xhi - xlo) * (x1 - x0); };
    auto Y = [&](double v) { return y0 - (v - ylo) / (yhi - ylo) * (y0 - y1); };
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" font-size=\"13\">%s</text>\n",
                  (x0 + x1) / 2, oy + 18, panels[p].title);
    s += buf;
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"#444\"/>\n", x0,
                  y1, x1 - x0, y0 - y1);
    s += buf;
    for (int i = 0; i <= 4; ++i) {
      const double v = ylo + (yhi - ylo) * i / 4.0;
      std::snprintf(buf, sizeof buf,
                    "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>"
                    "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.3g</text>\n",
                    x0, Y(v), x1, Y(v), x0 - 4, Y(v) + 4, v);
      s += buf;
    }
    const double step = std::max(1.0, std::ceil((xhi - xlo) / 8.0));
    for (double v = xlo; v <= xhi + 1e-9; v += step) {
      std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%g</text>\n", X(v), y0 + 15,
                    v);
      s += buf;
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">gear ratio</text>\n",
                  (x0 + x1) / 2, y0 + 32);
    s += buf;
    for (const auto& [t, c] : colour) {
      std::string pts;
      auto flush = [&] {
        if (!pts.empty())
          s += "<polyline fill=\"none\" stroke=\"" + std::string(c) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        pts.clear();
      };
      for (const auto& r : sweep.rows) {
        if (r.topology != t) continue;
        if (!r.best) {
          flush();
          continue;
        }
        std::snprintf(buf, sizeof buf, "%.1f,%.1f ", X(r.best->ratio.value), Y(panels[p].get(*r.best)));
        pts += buf;
      }
      flush();
    }
  }
  double lx = 20;
  for (const auto& [t, c] : colour) {
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"12\" height=\"12\" fill=\"%s\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\">%s</text>\n",
                  lx, 2 * ph + 8, c, lx + 16, 2 * ph + 18, std::string(to_string(t)).c_str());
    s += buf;
    lx += 80;
  }
  s += "</svg>\n";
  return s;
}

std::string evaluation_table(const DesignEvaluation& e) {
  std::string s = describe(e.design) + "\n";
  if (e.has_metrics) {
    s += "  ratio       " + fixed(e.ratio.value, 4) + " (" + rational_string(e.ratio.magnitude) + ")" +
         (e.ratio.reversed ? ", output reversed" : "") + "\n";
    s += "  efficiency  " + fixed(e.efficiency, 4) + "\n";
    s += "  mass        " + fixed(e.mass.total, 4) + " kg (gearbox " + fixed(e.mass.gearbox_mass, 4) + " kg)\n";
    s += "  width       " + fixed(e.widths.actuator_width, 2) + " mm (gearbox " + fixed(e.widths.gearbox_width, 2) +
         " mm)\n";
    s += "  cost        " + fixed(e.cost, 6) + "\n";
  }
  s += std::string("  feasible    ") + (e.feasibility.feasible ? "yes" : "no") + "\n";
  for (const auto& v : e.feasibility.violations)
    s += "  violation   [" + std::string(to_string(v.family)) + "] " + v.detail + "\n";
  for (const auto& v : e.feasibility.notes) s += "  note        [" + std::string(to_string(v.family)) + "] " + v.detail + "\n";
  return s;
}

}  // namespace planetopt
