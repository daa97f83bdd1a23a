#include "planetopt/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace planetopt {

void CostWeights::validate() const {
  for (double w : {mass, efficiency, width, ratio})
    if (!std::isfinite(w) || w < 0.0) throw Error("cost weights must be finite and non-negative");
  if (target && !(std::isfinite(*target) && *target > 0.0)) throw Error("target ratio must be positive");
}

double cost(const CostWeights& w, double mass_kg, double efficiency, double width_mm, double ratio) {
  double c = w.mass * mass_kg - w.efficiency * efficiency + w.width * width_mm;
  if (w.target) c += w.ratio * std::fabs(*w.target - ratio);
  return c;
}

void ProblemSetup::validate() const {
  motor.validate();
  constraints.validate();
  sizing.validate();
  mesh.validate();
  layout.validate();
}

std::map<std::string, double> ProblemSetup::fixed_values() const {
  return fixed_dimension_values(motor, sizing, constraints, mesh, layout);
}

int resolve_workers(int requested) noexcept {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

bool better(double cost_a, const GearboxDesign& a, double cost_b, const GearboxDesign& b) noexcept {
  if (cost_a != cost_b) return cost_a < cost_b;
  return a.variables() < b.variables();
}

// -----------------------------
// Evaluation
// -----------------------------
Evaluator::Evaluator(ProblemSetup setup)
    : setup_((setup.validate(), std::move(setup))),
      mass_(setup_.mass_template, setup_.catalog, setup_.motor, setup_.fixed_values()),
      dmax_um_(setup_.constraints.max_diameter_um(setup_.motor)) {}

std::optional<DesignMetrics> Evaluator::metrics(const GearboxDesign& d, const GearRatio& ratio,
                                                MassModel::Scratch& scratch) const {
  try {
    DesignMetrics m;
    m.ratio = ratio;
    m.efficiency = efficiency(d, setup_.mesh);
    const WidthBreakdown w = actuator_width(d, setup_.motor, setup_.sizing);
    m.gearbox_width = w.gearbox_width;
    m.actuator_width = w.actuator_width;
    m.mass = mass_.total(d, WidthOverride::from(w), scratch);
    return m;
  } catch (const DegenerateDesign&) {
    return std::nullopt;
  } catch (const InfeasibleDesign&) {
    return std::nullopt;
  }
}

std::optional<DesignMetrics> Evaluator::metrics(const GearboxDesign& d) const {
  GearRatio r;
  try {
    r = gear_ratio(d);
  } catch (const DegenerateDesign&) {
    return std::nullopt;
  }
  MassModel::Scratch scratch;
  return metrics(d, r, scratch);
}

DesignEvaluation Evaluator::evaluate(const GearboxDesign& d, const CostWeights& weights) const {
  DesignEvaluation e;
  e.design = d;
  e.feasibility = check_all(d, setup_.motor, setup_.constraints, false);
  if (!topology_problem(d).empty()) return e;
  try {
    e.ratio = gear_ratio(d);
    e.efficiency = efficiency(d, setup_.mesh);
    e.widths = actuator_width(d, setup_.motor, setup_.sizing);
    e.mass = actuator_mass(d, e.widths, mass_);
    e.cost = cost(weights, e.mass.total, e.efficiency, e.widths.actuator_width, e.ratio.value);
    e.has_metrics = true;
  } catch (const DegenerateDesign& ex) {
    auto& v = e.feasibility.violations;
    if (std::none_of(v.begin(), v.end(), [](const Violation& x) { return x.family == ConstraintFamily::gear_ratio; }))
      v.push_back({ConstraintFamily::gear_ratio, ex.what()});
  } catch (const InfeasibleDesign& ex) {
    e.feasibility.violations.push_back({ConstraintFamily::parts, ex.what()});
  }
  e.feasibility.feasible = e.feasibility.violations.empty();
  return e;
}

// -----------------------------
// Enumeration
// -----------------------------
namespace {

struct Limits {
  int nmin = 18;
  int cap = 0;
  int pmin = 2;
  int pmax = 7;
  std::vector<std::int64_t> modules;  // micrometres
  std::int64_t dmax = 0;
  std::int64_t rw = 0;
  bool strict_order = true;
  const ConstraintParams* params = nullptr;

  bool fits(std::int64_t teeth) const noexcept { return cap == 0 || teeth <= cap; }
};

Limits make_limits(std::int64_t dmax, const ConstraintParams& p) {
  Limits l;
  l.nmin = p.min_teeth;
  l.cap = p.max_teeth;
  l.pmin = p.min_planets;
  l.pmax = p.max_planets;
  for (const auto& m : p.module_set) l.modules.push_back(m.micrometres());
  l.dmax = dmax;
  l.rw = std::llround(p.ring_radial_width * 1000.0);
  l.strict_order = p.ring_order == RingOrderRule::strict;
  l.params = &p;
  return l;
}

// Loose double window for pruning; the exact check happens on the rational ratio.
struct Window {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

bool interferes(const GearStage& s, const Limits& l) { return interference_margin(s, *l.params) < 0.0; }

GearStage make_stage(int sun, int planet, int ring, std::int64_t m_um, int n) {
  return {sun, planet, ring, Module::from_micrometres(static_cast<std::int32_t>(m_um)), n};
}

std::int64_t floor_clamped(double v) {
  if (v <= -1e15) return -1'000'000'000'000'000LL;
  if (v >= 1e15) return 1'000'000'000'000'000LL;
  return static_cast<std::int64_t>(std::floor(v));
}

struct OuterKey {
  std::int64_t module = 0;
  int teeth = 0;  // sun 1; for DSPG the stage-1 list index
};

using Sink = std::function<void(const GearboxDesign&)>;

class Space {
 public:
  Space(Topology t, const Limits& l, Window w) : topology_(t), l_(l), w_(w) {
    if (t == Topology::dspg) {
      build_stage_list();
      for (std::size_t i = 0; i < stages_.size(); ++i) keys_.push_back({0, static_cast<int>(i)});
    } else {
      const std::int64_t rw = t == Topology::cpg ? 0 : l_.rw;
      for (std::int64_t m : l_.modules) {
        for (int ns = l_.nmin; m * (ns + 2 * l_.nmin) + rw <= l_.dmax && l_.fits(ns + 2 * l_.nmin); ++ns)
          keys_.push_back({m, ns});
      }
    }
  }

  std::size_t size() const noexcept { return keys_.size(); }

  void run(std::size_t index, const Sink& sink) const {
    const OuterKey& k = keys_[index];
    switch (topology_) {
      case Topology::sspg: run_sspg(k, sink); break;
      case Topology::cpg: run_cpg(k, sink); break;
      case Topology::wpg: run_wpg(k, sink); break;
      case Topology::dspg: run_dspg(k, sink); break;
    }
  }

 private:
  struct StageRec {
    double ratio;
    GearStage stage;
  };

  // Single-stage designs, optionally with a ratio window on Np.
  template <typename Emit>
  void sspg_stages(std::int64_t m, int ns, const Window& w, Emit&& emit) const {
    // ratio = 2 + 2 Np / Ns
    const std::int64_t np_lo = std::max<std::int64_t>(l_.nmin, floor_clamped((w.lo - 2.0) * ns / 2.0) - 1);
    const std::int64_t np_hi = std::isfinite(w.hi) ? floor_clamped((w.hi - 2.0) * ns / 2.0) + 2
                                                   : std::numeric_limits<std::int64_t>::max();
    for (int n = l_.pmin; n <= l_.pmax; ++n) {
      for (std::int64_t np = np_lo; np <= np_hi; ++np) {
        const std::int64_t nr = ns + 2 * np;
        if (m * nr + l_.rw > l_.dmax || !l_.fits(nr)) break;
        if ((ns + nr) % n != 0) continue;
        const GearStage s = make_stage(ns, static_cast<int>(np), static_cast<int>(nr), m, n);
        if (interferes(s, l_)) continue;
        emit(s);
      }
    }
  }

  void run_sspg(const OuterKey& k, const Sink& sink) const {
    sspg_stages(k.module, k.teeth, w_, [&](const GearStage& s) {
      GearboxDesign d;
      d.topology = Topology::sspg;
      d.stage1 = s;
      sink(d);
    });
  }

  void build_stage_list() {
    for (std::int64_t m : l_.modules) {
      for (int ns = l_.nmin; m * (ns + 2 * l_.nmin) + l_.rw <= l_.dmax && l_.fits(ns + 2 * l_.nmin); ++ns) {
        sspg_stages(m, ns, Window{}, [&](const GearStage& s) {
          stages_.push_back({to_double(stage_ratio(s)), s});
        });
      }
    }
    std::sort(stages_.begin(), stages_.end(), [](const StageRec& a, const StageRec& b) {
      if (a.ratio != b.ratio) return a.ratio < b.ratio;
      return a.stage < b.stage;
    });
  }

  void run_dspg(const OuterKey& k, const Sink& sink) const {
    const StageRec& first = stages_[static_cast<std::size_t>(k.teeth)];
    const double lo = w_.lo / first.ratio * (1.0 - 1e-9);
    const double hi = std::isfinite(w_.hi) ? w_.hi / first.ratio * (1.0 + 1e-9) : w_.hi;
    auto begin = std::lower_bound(stages_.begin(), stages_.end(), lo,
                                  [](const StageRec& r, double v) { return r.ratio < v; });
    GearboxDesign d;
    d.topology = Topology::dspg;
    d.stage1 = first.stage;
    for (auto it = begin; it != stages_.end() && it->ratio <= hi; ++it) {
      d.stage2 = it->stage;
      sink(d);
    }
  }

  void run_cpg(const OuterKey& k, const Sink& sink) const {
    const std::int64_t m = k.module;
    const int ns = k.teeth;
    GearboxDesign d;
    d.topology = Topology::cpg;
    for (int n = l_.pmin; n <= l_.pmax; ++n) {
      if (ns % n != 0) continue;
      for (int np1 = l_.nmin;; ++np1) {
        if (m * (ns + 2 * np1) > l_.dmax || !l_.fits(np1)) break;
        const GearStage s1 = make_stage(ns, np1, 0, m, n);
        if (interferes(s1, l_)) continue;
        // G = A (Np2 + Np1) / (Ns Np2), A = Ns + Np1, decreasing in Np2 towards A / Ns.
        const double a = ns + np1;
        std::int64_t lo = l_.nmin;
        std::int64_t hi = np1 - 1;
        if (std::isfinite(w_.hi)) {
          if (w_.hi * ns <= a) continue;
          lo = std::max(lo, floor_clamped(a * np1 / (w_.hi * ns - a)) - 1);
        }
        if (w_.lo * ns > a) hi = std::min(hi, floor_clamped(a * np1 / (w_.lo * ns - a)) + 2);
        if (l_.cap) hi = std::min<std::int64_t>(hi, l_.cap - ns - np1);
        lo = std::max<std::int64_t>(lo, l_.nmin);
        if (lo > hi) continue;
        // first Np2 with (Ns + Np1 + Np2) % n == 0
        std::int64_t np2 = lo + ((n - (ns + np1 + lo) % n) % n);
        for (; np2 <= hi; np2 += n) {
          d.stage1 = s1;
          d.stage2 = make_stage(0, static_cast<int>(np2), static_cast<int>(ns + np1 + np2), m, n);
          sink(d);
        }
      }
    }
  }

  void run_wpg(const OuterKey& k, const Sink& sink) const {
    const std::int64_t m1 = k.module;
    const int ns = k.teeth;
    GearboxDesign d;
    d.topology = Topology::wpg;
    for (int n = l_.pmin; n <= l_.pmax; ++n) {
      if (ns % n != 0) continue;
      for (int np1 = l_.nmin;; ++np1) {
        const int nr1 = ns + 2 * np1;
        if (m1 * nr1 + l_.rw > l_.dmax || !l_.fits(nr1)) break;
        if ((ns + nr1) % n != 0) continue;
        const GearStage s1 = make_stage(ns, np1, nr1, m1, n);
        if (interferes(s1, l_)) continue;
        const double k_ratio = static_cast<double>(nr1) / np1;  // I2 -> k as Np2 grows
        const double a = 1.0 + static_cast<double>(nr1) / ns;
        for (std::int64_t m2 : l_.modules) {
          const std::int64_t c_um = m1 * (ns + np1);
          if (c_um % m2 != 0) continue;
          const std::int64_t c = c_um / m2;  // Nr2 = C + Np2
          std::int64_t lo = l_.nmin;
          std::int64_t hi = (l_.dmax - l_.rw) / m2 - c;
          if (l_.strict_order) lo = std::max(lo, m1 * np1 / m2 + 1);
          if (l_.cap) hi = std::min<std::int64_t>(hi, std::min<std::int64_t>(l_.cap, l_.cap - c));
          if (lo > hi) continue;
          // Np2 ranges whose I2 keeps |G| = a / |1 - I2| inside the window.
          std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
          auto np2_of = [&](double i2) { return i2 * static_cast<double>(c) / (k_ratio - i2); };
          auto add_i2_range = [&](double i2_lo, double i2_hi) {
            if (i2_hi <= 0.0) return;
            i2_lo = std::max(i2_lo, 0.0);
            if (i2_lo >= k_ratio) return;
            const std::int64_t r_lo = std::max(lo, floor_clamped(np2_of(i2_lo)) - 1);
            const std::int64_t r_hi = i2_hi >= k_ratio ? hi : std::min(hi, floor_clamped(np2_of(i2_hi)) + 2);
            if (r_lo <= r_hi) ranges.emplace_back(r_lo, r_hi);
          };
          if (w_.lo <= 0.0 && !std::isfinite(w_.hi)) {
            ranges.emplace_back(lo, hi);
          } else {
            const double inv_hi = std::isfinite(w_.hi) ? a / w_.hi : 0.0;
            const double inv_lo = w_.lo > 0.0 ? a / w_.lo : std::numeric_limits<double>::infinity();
            add_i2_range(1.0 - inv_lo, 1.0 - inv_hi);  // forward output
            add_i2_range(1.0 + inv_hi, 1.0 + inv_lo);  // reversed output
          }
          std::sort(ranges.begin(), ranges.end());
          std::int64_t next = lo;
          for (auto [r_lo, r_hi] : ranges) {
            std::int64_t np2 = std::max(r_lo, next);
            np2 += (n - (c + np2) % n) % n;
            for (; np2 <= r_hi; np2 += n) {
              d.stage1 = s1;
              d.stage2 = make_stage(0, static_cast<int>(np2), static_cast<int>(c + np2), m2, n);
              sink(d);
            }
            next = std::max(next, r_hi + 1);
          }
        }
      }
    }
  }

  Topology topology_;
  Limits l_;
  Window w_;
  std::vector<OuterKey> keys_;
  std::vector<StageRec> stages_;
};

Window loose(const std::optional<RatioWindow>& w) {
  if (!w) return {};
  return {to_double(w->lo) * (1.0 - 1e-9), to_double(w->hi) * (1.0 + 1e-9)};
}

bool in_window(const GearboxDesign& d, const RatioWindow& w) {
  try {
    const GearRatio r = gear_ratio(d);
    return !(r.magnitude < w.lo) && !(r.magnitude > w.hi);
  } catch (const DegenerateDesign&) {
    return false;
  }
}

}  // namespace

void enumerate_designs(Topology topology, std::int64_t max_diameter_um, const ConstraintParams& params,
                       const std::optional<RatioWindow>& window, const Sink& sink) {
  params.validate();
  const Space space(topology, make_limits(max_diameter_um, params), loose(window));
  for (std::size_t i = 0; i < space.size(); ++i) {
    space.run(i, [&](const GearboxDesign& d) {
      if (!window || in_window(d, *window)) sink(d);
    });
  }
}

std::vector<GearboxDesign> enumerate_designs(Topology topology, std::int64_t max_diameter_um,
                                             const ConstraintParams& params, const std::optional<RatioWindow>& window) {
  std::vector<GearboxDesign> out;
  enumerate_designs(topology, max_diameter_um, params, window, [&](const GearboxDesign& d) { out.push_back(d); });
  return out;
}

// -----------------------------
// Search
// -----------------------------
namespace {

struct BinBest {
  bool set = false;
  double cost = 0.0;
  GearboxDesign design;
  std::uint64_t feasible = 0;

  void offer(double c, const GearboxDesign& d) {
    if (!set || better(c, d, cost, design)) {
      set = true;
      cost = c;
      design = d;
    }
  }
  void merge(const BinBest& o) {
    feasible += o.feasible;
    if (o.set && (!set || better(o.cost, o.design, cost, design))) {
      set = true;
      cost = o.cost;
      design = o.design;
    }
  }
};

struct SetupRefs {
  const MeshEfficiencyModel& mesh;
  const MotorSpec& motor;
  const SizingParams& sizing;
  const MassModel& mass;
};

struct SearchOutput {
  std::vector<BinBest> bins;
  SearchStats stats;
};

// Bins are ascending and may share end points; a ratio on a shared end point belongs to both.
SearchOutput search(Topology t, const Evaluator& ev, const std::vector<RatioWindow>& bins, const CostWeights& w,
                    int workers) {
  const auto start = std::chrono::steady_clock::now();
  workers = resolve_workers(workers);
  const ConstraintParams& params = ev.setup().constraints;
  const RatioWindow overall{bins.front().lo, bins.back().hi};
  const Space space(t, make_limits(ev.max_diameter_um(), params), loose(overall));

  std::vector<std::vector<BinBest>> local(static_cast<std::size_t>(workers), std::vector<BinBest>(bins.size()));
  std::vector<std::uint64_t> candidates(static_cast<std::size_t>(workers), 0);
  std::vector<std::uint64_t> evaluated(static_cast<std::size_t>(workers), 0);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const SetupRefs refs{ev.setup().mesh, ev.setup().motor, ev.setup().sizing, ev.mass_model()};

  auto work = [&](int id) {
    try {
      auto& best = local[static_cast<std::size_t>(id)];
      auto& count = candidates[static_cast<std::size_t>(id)];
      auto& good = evaluated[static_cast<std::size_t>(id)];
      MassModel::Scratch scratch;
      const SetupRefs& su = refs;
      const auto sink = [&](const GearboxDesign& d) {
        GearRatio r;
        try {
          r = gear_ratio(d);
        } catch (const DegenerateDesign&) {
          return;
        }
        if (r.magnitude < overall.lo || r.magnitude > overall.hi) return;
        ++count;
        if (!is_feasible(d, ev.max_diameter_um(), params, false)) return;
        auto first = std::lower_bound(bins.begin(), bins.end(), r.magnitude,
                                      [](const RatioWindow& b, const Rational& v) { return b.hi < v; });
        if (first == bins.end() || r.magnitude < first->lo) return;
        ++good;
        auto last = first;
        bool all_set = true;
        double worst = -std::numeric_limits<double>::infinity();
        for (; last != bins.end() && !(r.magnitude < last->lo); ++last) {
          BinBest& b = best[static_cast<std::size_t>(last - bins.begin())];
          ++b.feasible;
          all_set = all_set && b.set;
          if (b.set) worst = std::max(worst, b.cost);
        }
        double eta = 0.0;
        try {
          eta = efficiency(d, su.mesh);
        } catch (const DegenerateDesign&) {
          return;
        }
        const WidthBreakdown widths = actuator_width(d, su.motor, su.sizing);
        const WidthOverride over = WidthOverride::from(widths);
        double mass = 0.0;
        try {
          if (all_set) {
            // Exact screens: each bound can only undercut the true cost.
            const double tol = 1e-9 * (std::fabs(worst) + 1.0);
            for (bool quick : {true, false}) {
              const double lb = cost(w, su.mass.lower_bound(d, over, scratch, quick), eta, widths.actuator_width, r.value);
              if (lb > worst + tol) return;
              if (w.mass == 0.0) break;
            }
          }
          mass = su.mass.total(d, over, scratch);
        } catch (const InfeasibleDesign&) {
          return;
        }
        const double c = cost(w, mass, eta, widths.actuator_width, r.value);
        for (auto it = first; it != last; ++it) best[static_cast<std::size_t>(it - bins.begin())].offer(c, d);
      };
      for (std::size_t i = static_cast<std::size_t>(id); i < space.size(); i += static_cast<std::size_t>(workers))
        space.run(i, sink);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (int i = 0; i < workers; ++i) threads.emplace_back(work, i);
    for (auto& th : threads) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  SearchOutput out;
  out.bins.resize(bins.size());
  for (const auto& l : local)
    for (std::size_t b = 0; b < bins.size(); ++b) out.bins[b].merge(l[b]);
  for (auto c : candidates) out.stats.candidates += c;
  for (auto c : evaluated) out.stats.feasible += c;
  out.stats.workers = workers;
  out.stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace

OptimizeResult optimize(Topology topology, const Evaluator& ev, const CostWeights& weights, int workers) {
  weights.validate();
  const ConstraintParams& p = ev.setup().constraints;
  const std::vector<RatioWindow> bins{{rational_from_decimal(p.gr_min), rational_from_decimal(p.gr_max)}};
  SearchOutput s = search(topology, ev, bins, weights, workers);
  OptimizeResult r;
  r.topology = topology;
  r.stats = s.stats;
  if (s.bins[0].set) r.best = ev.evaluate(s.bins[0].design, weights);
  return r;
}

SweepResult sweep(const std::vector<Topology>& topologies, const Evaluator& ev, int g_lo, int g_hi,
                  CostWeights weights, int workers) {
  if (g_lo >= g_hi) throw Error("sweep needs g_lo < g_hi");
  weights.target.reset();  // range mode
  weights.validate();
  std::vector<RatioWindow> bins;
  for (int g = g_lo; g < g_hi; ++g) bins.push_back({Rational(g), Rational(g + 1)});
  SweepResult result;
  for (Topology t : topologies) {
    SearchOutput s = search(t, ev, bins, weights, workers);
    for (std::size_t b = 0; b < bins.size(); ++b) {
      SweepRow row;
      row.topology = t;
      row.bin_lo = g_lo + static_cast<int>(b);
      row.bin_hi = row.bin_lo + 1;
      row.feasible = s.bins[b].feasible;
      if (s.bins[b].set) row.best = ev.evaluate(s.bins[b].design, weights);
      result.rows.push_back(std::move(row));
    }
    result.stats.emplace_back(t, s.stats);
  }
  return result;
}

}  // namespace planetopt
