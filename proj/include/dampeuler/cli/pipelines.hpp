#pragma once

// The experiment pipelines behind each subcommand. Each `run_*` computes in
// memory; the matching `write_*` turns the result into files, and `verify_*`
// re-checks the invariants a result must satisfy.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dampeuler/burgers/characteristics.hpp"
#include "dampeuler/burgers/grid_solver.hpp"
#include "dampeuler/burgers/profile.hpp"
#include "dampeuler/cli/artifacts.hpp"
#include "dampeuler/cli/config.hpp"
#include "dampeuler/core/damping.hpp"
#include "dampeuler/diagnostics/blowup.hpp"
#include "dampeuler/diagnostics/data_families.hpp"
#include "dampeuler/diagnostics/energy.hpp"
#include "dampeuler/diagnostics/testbench.hpp"
#include "dampeuler/euler2d/snapshot.hpp"
#include "dampeuler/euler2d/solver.hpp"
#include "dampeuler/specfun/hypergeometric.hpp"
#include "dampeuler/specfun/riemann.hpp"

namespace dampeuler::cli {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

inline bool all_passed(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

inline void write_checks(ArtifactWriter& w, const std::vector<Check>& checks) {
  CsvTable t({"check", "passed", "detail"});
  for (const auto& c : checks) t.row(c.name, c.passed, c.detail);
  w.write_csv("verify.csv", t, "post-run invariant checks");
}

namespace detail {

inline std::string num(double x) { return fmt(x); }

/// Case labels use d = 2 throughout; for the 1-D Burgers model the
/// global/blowup threshold mu > 1 at lambda = 1 coincides with 3 - d at d = 2.
inline CaseLabel label_of(const DampingLaw& law) { return classify_case(law, 2); }

inline std::string case_name(CaseLabel l) { return to_string(l.kind); }

}  // namespace detail

// ================================================================ burgers

struct BurgersComparison {
  double t = 0.0;
  double sup_error = 0.0;
  double sup_v = 0.0;
};

struct BurgersResult {
  DampingLaw law{1.0, 1.0};
  CaseLabel label{Case::One, 2};
  double eps = 0.0;
  burgers::ProfileFamily family{burgers::ProfileKind::Bump, 1.0, 1.0};
  double min_slope = 0.0;
  burgers::Lifespan exact;
  burgers::GridResult grid;
  std::vector<BurgersComparison> comparisons;
};

inline bool before_fold(const burgers::Lifespan& life, double t) {
  return !life.finite || std::log1p(t) < life.log1p_time;
}

inline BurgersResult run_burgers(const ExperimentConfig& c) {
  BurgersResult r;
  r.law = c.law.law();
  r.label = detail::label_of(r.law);
  r.eps = c.eps;
  r.family = burgers::ProfileFamily::unit_slope(burgers::profile_kind_from_string(c.data.profile),
                                                c.data.M);
  const auto profile = burgers::sample_profile(r.family);
  r.min_slope = profile.min_slope();
  r.exact = burgers::lifespan(profile, c.eps, r.law);

  burgers::GridOptions o;
  o.nx = c.grid.nx;
  o.t_end = c.t_end;
  o.capture_times = c.solver.snapshot_times;
  r.grid = burgers::grid_solve(r.family, c.eps, r.law, o);

  std::vector<const burgers::GridSnapshot*> states;
  for (const auto& s : r.grid.captures) states.push_back(&s);
  if (!r.grid.blowup_time) states.push_back(&r.grid.final_state);
  for (const auto* s : states) {
    if (!before_fold(r.exact, s->t)) continue;
    const burgers::ExactSolution ex(r.family, c.eps, r.law, s->t);
    BurgersComparison cmp{s->t, 0.0, 0.0};
    for (std::size_t i = 0; i < s->x.size(); ++i) {
      cmp.sup_error = std::max(cmp.sup_error, std::abs(s->v[i] - ex(s->x[i])));
      cmp.sup_v = std::max(cmp.sup_v, std::abs(s->v[i]));
    }
    r.comparisons.push_back(cmp);
  }
  return r;
}

inline void write_burgers(ArtifactWriter& w, const ExperimentConfig& c, const BurgersResult& r) {
  CsvTable life({"lambda", "mu", "eps", "profile", "M", "min_slope", "case", "finite", "log1p_T",
                 "T", "grid_nx", "grid_t_end", "grid_blowup_t", "grid_relative_shift"});
  std::optional<double> shift;
  if (r.grid.blowup_time && r.exact.finite) shift = *r.grid.blowup_time / r.exact.time() - 1.0;
  life.row(c.law.lambda.text, c.law.mu.text, r.eps, c.data.profile, c.data.M, r.min_slope,
           detail::case_name(r.label), r.exact.finite, r.exact.log1p_time, r.exact.time(),
           c.grid.nx, c.t_end, r.grid.blowup_time, shift);
  w.write_csv("lifespan.csv", life, "exact lifespan and grid-detected blowup");

  CsvTable series({"t", "sup_v", "max_slope"});
  for (const auto& s : r.grid.series) series.row(s.t, s.sup_v, s.max_slope);
  w.write_csv("series.csv", series, "grid solution history");

  CsvTable cmp({"t", "sup_error", "sup_v"});
  for (const auto& s : r.comparisons) cmp.row(s.t, s.sup_error, s.sup_v);
  w.write_csv("comparison.csv", cmp, "grid solution against the characteristic solution");

  CsvTable prof({"t", "x", "v"});
  for (const auto& s : r.grid.captures) {
    for (std::size_t i = 0; i < s.x.size(); ++i) prof.row(s.t, s.x[i], s.v[i]);
  }
  w.write_csv("profiles.csv", prof, "captured grid profiles");
}

inline std::vector<Check> verify_burgers(const BurgersResult& r) {
  std::vector<Check> out;
  const bool global = !is_blowup_case(r.label.kind);
  out.push_back({"lifespan_matches_case", global == !r.exact.finite,
                 detail::case_name(r.label) + (r.exact.finite ? " finite" : " infinite")});
  // |v| <= eps max|v0| / Xi(t) along characteristics.
  bool bounded = true;
  double worst = 0.0;
  const double v0 = r.eps * r.family.max_abs_value();
  for (const auto& s : r.grid.series) {
    const double bound = v0 / xi(r.law, s.t);
    worst = std::max(worst, s.sup_v / bound);
    if (s.sup_v > bound * (1.0 + 1e-9)) bounded = false;
  }
  out.push_back({"sup_v_below_damped_bound", bounded, "max ratio " + detail::num(worst)});
  const double t_end = r.grid.final_state.t;
  if (r.exact.finite && r.exact.time() < t_end) {
    const bool ok = r.grid.blowup_time &&
                    std::abs(*r.grid.blowup_time / r.exact.time() - 1.0) < 0.05;
    out.push_back({"grid_blowup_within_5pct", ok,
                   "exact " + detail::num(r.exact.time()) + " grid " +
                       (r.grid.blowup_time ? detail::num(*r.grid.blowup_time) : "none")});
  } else if (!r.exact.finite || r.exact.time() > 1.1 * t_end) {
    out.push_back({"no_grid_blowup_before_lifespan", !r.grid.blowup_time,
                   r.grid.blowup_time ? "grid reported " + detail::num(*r.grid.blowup_time)
                                      : "none"});
  }
  return out;
}

// ================================================================ euler2d

struct EulerSample {
  double t = 0.0;
  double sup_theta = 0.0;
  double sup_u = 0.0;
  double excess_mass = 0.0;
  double vorticity_l2 = 0.0;
  /// ||w|| Xi(t)^(1/3)
  double vorticity_scaled = 0.0;
  double gradient_ratio = 0.0;
  std::optional<double> energy_t;
  std::optional<double> calE2;
  std::optional<double> E2;
};

struct EulerResult {
  CaseLabel label{Case::One, 2};
  euler2d::SolverParams params;
  euler2d::FlowState2D initial;
  euler2d::RunResult run;
  std::vector<EulerSample> series;
  std::vector<euler2d::FlowState2D> snapshots;
  /// ||curl u|| of the discrete initial data.
  double curl_floor = 0.0;
};

using StepHook = std::function<void(const euler2d::StateHistory&)>;

inline euler2d::FlowState2D initial_state(const ExperimentConfig& c) {
  const auto gas = c.gas.gas();
  const euler2d::Grid2D g(c.grid.L, c.grid.n);
  const diagnostics::FamilyParams fp{diagnostics::data_family_from_string(c.data.family), c.data.M,
                                     c.data.rho_amplitude, c.data.u_amplitude, c.data.Lambda};
  const auto d = diagnostics::make_initial_data(fp, gas, g);
  return euler2d::init_state(gas, c.eps, d.rho0, d.u10, d.u20, g);
}

inline EulerSample sample_state(const euler2d::StateHistory& h, const DampingLaw& law,
                                const GasLaw& gas, double initial_gradient, bool energies) {
  const auto& s = h.latest();
  const double hx = s.grid.h();
  EulerSample e;
  e.t = s.t;
  e.sup_theta = s.theta.max_abs();
  e.sup_u = std::max(s.u1.max_abs(), s.u2.max_abs());
  e.excess_mass = euler2d::excess_mass(s, gas);
  e.vorticity_l2 = euler2d::vorticity(s).l2(hx);
  e.vorticity_scaled = e.vorticity_l2 * std::exp(log_xi(law, s.t) / 3.0);
  e.gradient_ratio =
      initial_gradient > 0.0 ? euler2d::max_gradient(s).value / initial_gradient : 0.0;
  if (energies && h.size() >= 3) {
    const auto a = diagnostics::energy_calE(h, 2, law);
    e.energy_t = a.t;
    e.calE2 = a.value;
    e.E2 = diagnostics::energy_E(h, 2).value;
  }
  return e;
}

inline EulerResult run_euler2d(const ExperimentConfig& c, int threads, const StepHook& hook = {}) {
  EulerResult r;
  const auto law = c.law.law();
  const auto gas = c.gas.gas();
  r.label = detail::label_of(law);
  r.params = euler2d::SolverParams{law, gas, c.solver.hyperviscosity, c.data.M, c.solver.cfl,
                                   std::max(1, threads)};
  r.initial = initial_state(c);
  r.curl_floor = euler2d::vorticity(r.initial).l2(r.initial.grid.h());
  const double g0 = euler2d::max_gradient(r.initial).value;

  euler2d::RunOptions o;
  o.t_end = c.t_end;
  o.blowup_threshold = c.solver.blowup_threshold;
  o.extra_thresholds = c.solver.extra_thresholds;

  std::vector<double> snap_times = c.solver.snapshot_times;
  std::sort(snap_times.begin(), snap_times.end());
  std::size_t next_snap = 0;
  long next_sample = 0;
  const double tol = 1e-12 * std::max(1.0, c.t_end);
  auto observe = [&](const euler2d::StateHistory& h) {
    const auto& s = h.latest();
    if (s.t + tol >= next_sample * c.solver.sample_every || s.t + tol >= c.t_end) {
      r.series.push_back(sample_state(h, law, gas, g0, c.solver.energies));
      while (next_sample * c.solver.sample_every <= s.t + tol) ++next_sample;
    }
    while (next_snap < snap_times.size() && s.t + tol >= snap_times[next_snap]) {
      r.snapshots.push_back(s);
      ++next_snap;
    }
    if (hook) hook(h);
  };
  r.run = euler2d::run(r.initial, r.params, o, observe);
  if (r.series.empty() || r.series.back().t != r.run.final_state.t) {
    euler2d::StateHistory last;
    last.push(r.run.final_state);
    r.series.push_back(sample_state(last, law, gas, g0, false));
  }
  return r;
}

inline std::string outcome_of(const euler2d::RunResult& run) {
  return run.blowup ? "blowup" : "global-to-t_end";
}

inline void write_euler2d(ArtifactWriter& w, const ExperimentConfig& c, const EulerResult& r) {
  CsvTable series({"t", "sup_theta", "sup_u", "excess_mass", "vorticity_l2", "vorticity_xi13",
                   "gradient_ratio", "energy_t", "calE2", "E2"});
  for (const auto& s : r.series) {
    series.row(s.t, s.sup_theta, s.sup_u, s.excess_mass, s.vorticity_l2, s.vorticity_scaled,
               s.gradient_ratio, s.energy_t, s.calE2, s.E2);
  }
  w.write_csv("series.csv", series, "sampled diagnostics of the euler2d run");

  CsvTable summary({"lambda", "mu", "eps", "gamma", "family", "n", "L", "t_end", "case", "outcome",
                    "t_blowup", "reason", "x1", "x2", "gradient_ratio", "steps", "curl_floor"});
  const auto& b = r.run.blowup;
  summary.row(c.law.lambda.text, c.law.mu.text, c.eps, c.gas.gamma, c.data.family, c.grid.n,
              c.grid.L, c.t_end, detail::case_name(r.label), outcome_of(r.run),
              b ? std::optional<double>(b->t) : std::nullopt,
              b ? euler2d::to_string(b->reason) : std::string(),
              b ? std::optional<double>(b->x1) : std::nullopt,
              b ? std::optional<double>(b->x2) : std::nullopt,
              b ? std::optional<double>(b->ratio) : std::nullopt, r.run.steps, r.curl_floor);
  w.write_csv("summary.csv", summary, "run outcome");

  CsvTable cross({"threshold", "detected", "t", "x1", "x2", "reason", "ratio"});
  for (const auto& x : r.run.crossings) {
    if (x.report) {
      cross.row(x.threshold, true, x.report->t, x.report->x1, x.report->x2,
                euler2d::to_string(x.report->reason), x.report->ratio);
    } else {
      cross.row(x.threshold, false, "", "", "", "", "");
    }
  }
  w.write_csv("thresholds.csv", cross, "first crossing of each gradient threshold");

  w.write_snapshot("initial.del1", r.initial);
  w.write_snapshot("final.del1", r.run.final_state);
  for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
    w.write_snapshot("snapshot_" + std::to_string(k) + ".del1", r.snapshots[k]);
  }
}

/// Largest |field| at cells farther than t + M + 4h from the origin.
inline double outside_support(const euler2d::FlowState2D& s, double M) {
  const double rad = s.t + M + 4.0 * s.grid.h();
  double m = 0.0;
  for (int j = 0; j < s.grid.n; ++j) {
    for (int i = 0; i < s.grid.n; ++i) {
      if (std::hypot(s.grid.coord(i), s.grid.coord(j)) <= rad) continue;
      m = std::max({m, std::abs(s.theta(i, j)), std::abs(s.u1(i, j)), std::abs(s.u2(i, j))});
    }
  }
  return m;
}

inline std::vector<Check> verify_euler2d(const ExperimentConfig& c, const EulerResult& r) {
  std::vector<Check> out;
  const auto& fin = r.run.final_state;
  const bool hard_failure = r.run.blowup && r.run.blowup->reason != euler2d::BlowupReason::Gradient;
  out.push_back({"no_nonfinite_or_vacuum", !hard_failure,
                 hard_failure ? euler2d::to_string(r.run.blowup->reason) : "ok"});

  const double m0 = r.series.front().excess_mass;
  double drift = 0.0;
  for (const auto& s : r.series) drift = std::max(drift, std::abs(s.excess_mass - m0));
  if (m0 != 0.0) {
    out.push_back({"mass_drift_below_1e-3", drift / std::abs(m0) < 1e-3,
                   "relative drift " + detail::num(drift / std::abs(m0))});
  }

  if (!r.run.blowup) {
    const double th0 = r.initial.theta.max_abs();
    const double u0 = std::max(r.initial.u1.max_abs(), r.initial.u2.max_abs());
    double th = 0.0, u = 0.0;
    for (const auto& s : r.series) th = std::max(th, s.sup_theta), u = std::max(u, s.sup_u);
    const bool ok = th <= 2.0 * th0 && u <= 2.0 * u0;
    out.push_back({"sup_within_twice_initial", ok,
                   "theta " + detail::num(th / th0) + "x, u " + detail::num(u0 > 0 ? u / u0 : 0.0) +
                       "x"});
  }

  std::ostringstream buf(std::ios::binary);
  euler2d::write_snapshot(buf, fin);
  std::istringstream in(buf.str(), std::ios::binary);
  out.push_back({"snapshot_round_trip", euler2d::read_snapshot(in) == fin, "final state"});

  const double leak = outside_support(fin, c.data.M);
  out.push_back({"zero_beyond_t_plus_M_plus_4h", leak == 0.0, "max " + detail::num(leak)});

  if (c.data.family == "irrotational") {
    double w = 0.0;
    for (const auto& s : r.series) w = std::max(w, s.vorticity_l2);
    out.push_back({"irrotational_curl_within_10x_floor", w <= 10.0 * r.curl_floor,
                   "max ||w|| " + detail::num(w) + ", floor " + detail::num(r.curl_floor)});
  }

  if (r.label.kind == Case::One && c.data.family == "rotational" && c.t_end > 5.0) {
    // ||w|| Xi^(1/3) non-increasing on [5, t_end] up to 5% jitter.
    double lowest = INFINITY, worst = 0.0;
    for (const auto& s : r.series) {
      if (s.t < 5.0) continue;
      if (std::isfinite(lowest)) worst = std::max(worst, s.vorticity_scaled / lowest);
      lowest = std::min(lowest, s.vorticity_scaled);
    }
    out.push_back({"vorticity_xi13_nonincreasing", worst <= 1.05,
                   "max rebound " + detail::num(worst)});
  }
  return out;
}

// ================================================================ diagnose

struct FunctionalSample {
  double t = 0.0;
  double P_mid = 0.0;
  double bound_mid = 0.0;
  /// min over the strip of (P - bound) / q0(M0).
  double strip_margin = 0.0;
  double F2 = 0.0;
};

struct DiagnoseResult {
  EulerResult euler;
  diagnostics::BlowupData data;
  double l_bar = 0.0;
  double q0_bar = 0.0;
  std::vector<FunctionalSample> functionals;
  std::vector<diagnostics::FSample> F;
  double t_to = 0.0;
  /// No blowup was detected, so the window runs to t_end.
  bool window_truncated = false;
  /// min over sampled t <= t_to of P(t, t + l_bar) / bound.
  double min_ratio_mid = INFINITY;
  double min_strip_margin = INFINITY;
  diagnostics::OdeReport ode;
};

inline DiagnoseResult run_diagnose(const ExperimentConfig& c, int threads) {
  const auto law = c.law.law();
  const auto gas = c.gas.gas();
  if (law.lambda() < 1.0) {
    throw UsageError("law.lambda", "the blowup functionals need lambda >= 1");
  }
  DiagnoseResult r;
  r.data = diagnostics::BlowupData::for_law(law, c.data.M, c.data.M_tilde, c.data.Lambda);
  const double M = r.data.M, M0 = r.data.M0;
  r.l_bar = 0.5 * (M0 + M);

  const auto s0 = initial_state(c);
  const auto excess0 = diagnostics::density_excess(s0, gas);
  const auto strip0 = diagnostics::strip_grid(0.0, M0, M);
  std::vector<double> q0_strip;
  for (double l : strip0) q0_strip.push_back(diagnostics::q0(excess0, s0.grid, l));
  r.q0_bar = diagnostics::q0(excess0, s0.grid, r.l_bar);
  const double q0_edge = q0_strip.front();

  std::vector<double> times, F2;
  auto hook = [&](const euler2d::StateHistory& h) {
    const auto& s = h.latest();
    const auto lg = diagnostics::strip_grid(s.t, M0, M);
    const auto P = diagnostics::p_functional(s, lg, gas);
    const double damp = 0.25 * std::exp(-0.5 * log_xi(law, s.t));
    FunctionalSample f;
    f.t = s.t;
    f.P_mid = diagnostics::half_plane_moment(
        diagnostics::column_integrals(diagnostics::density_excess(s, gas), s.grid), s.grid,
        s.t + r.l_bar, 2);
    f.bound_mid = damp * r.q0_bar;
    f.strip_margin = INFINITY;
    for (std::size_t k = 0; k < lg.size(); ++k) {
      f.strip_margin = std::min(f.strip_margin, (P[k] - damp * q0_strip[k]) / q0_edge);
    }
    f.F2 = diagnostics::f_second_derivative(lg, P, M0, M);
    times.push_back(s.t);
    F2.push_back(f.F2);
    r.functionals.push_back(f);
  };
  r.euler = run_euler2d(c, threads, hook);
  r.F = diagnostics::f_functional(times, F2);

  if (r.euler.run.blowup) {
    r.t_to = c.diagnose.window_fraction * r.euler.run.blowup->t;
  } else {
    r.t_to = c.t_end;
    r.window_truncated = true;
  }
  for (const auto& f : r.functionals) {
    if (f.t > r.t_to) break;
    r.min_ratio_mid = std::min(r.min_ratio_mid, f.bound_mid > 0 ? f.P_mid / f.bound_mid : INFINITY);
    r.min_strip_margin = std::min(r.min_strip_margin, f.strip_margin);
  }
  r.ode = diagnostics::monitor_ode_inequalities(r.F, c.eps, M, r.euler.label, gas.gamma(), r.t_to);
  return r;
}

inline void write_diagnose(ArtifactWriter& w, const ExperimentConfig& c, const DiagnoseResult& r) {
  write_euler2d(w, c, r.euler);
  CsvTable f({"t", "P_mid", "P_bound_mid", "strip_margin", "F2", "F1", "F"});
  for (std::size_t k = 0; k < r.functionals.size(); ++k) {
    const auto& a = r.functionals[k];
    f.row(a.t, a.P_mid, a.bound_mid, a.strip_margin, a.F2, r.F[k].F1, r.F[k].F);
  }
  w.write_csv("functionals.csv", f, "half-plane functional P and the doubly integrated F");

  CsvTable m({"monitor", "t_from", "t_to", "samples", "infimum", "argmin", "window"});
  const std::string window = r.window_truncated ? "t_end (no blowup detected)" : "fraction of t_blowup";
  auto add = [&](const diagnostics::RatioMonitor& x) {
    m.row(x.name, x.t_from, x.t_to, x.samples, x.infimum, x.argmin, window);
  };
  if (r.ode.applicable) {
    add(r.ode.linear);
    add(r.ode.quadratic);
    if (r.ode.power) add(*r.ode.power);
  }
  w.write_csv("monitors.csv", m, r.ode.applicable ? "ODE-inequality ratio infima" : r.ode.reason);

  CsvTable b({"M", "M_tilde", "M0", "delta0", "Lambda", "l_bar", "q0_l_bar", "t_to",
              "window_truncated", "min_P_ratio_mid", "min_strip_margin"});
  b.row(r.data.M, r.data.M_tilde, r.data.M0, r.data.delta0, r.data.Lambda, r.l_bar, r.q0_bar,
        r.t_to, r.window_truncated, r.min_ratio_mid, r.min_strip_margin);
  w.write_csv("blowup_data.csv", b, "radii and the P lower-bound check");
}

inline std::vector<Check> verify_diagnose(const ExperimentConfig& c, const DiagnoseResult& r) {
  auto out = verify_euler2d(c, r.euler);
  out.push_back({"P_lower_bound_at_l_bar", r.min_ratio_mid >= 1.0,
                 "min ratio " + detail::num(r.min_ratio_mid) +
                     (r.window_truncated ? " (window to t_end)" : "")});
  if (r.ode.applicable) {
    auto positive = [](const diagnostics::RatioMonitor& m) {
      return m.infimum && *m.infimum > 0.0;
    };
    out.push_back({"linear_ratio_positive", positive(r.ode.linear),
                   "inf " + fmt(r.ode.linear.infimum)});
    out.push_back({"quadratic_ratio_positive", positive(r.ode.quadratic),
                   "inf " + fmt(r.ode.quadratic.infimum)});
    if (r.ode.power) {
      out.push_back({"power_ratio_positive", positive(*r.ode.power),
                     "inf " + fmt(r.ode.power->infimum)});
    }
  }
  return out;
}

/// Diagnostics of a stored snapshot.
inline CsvTable diagnose_snapshot(const ExperimentConfig& c, const euler2d::FlowState2D& s) {
  const auto gas = c.gas.gas();
  const auto law = c.law.law();
  const double hx = s.grid.h();
  const auto excess = diagnostics::density_excess(s, gas);
  const auto mom = diagnostics::momentum1(s, gas);
  CsvTable t({"t", "n", "L", "sup_theta", "sup_u", "excess_mass", "vorticity_l2", "vorticity_xi13",
              "max_gradient", "q0_at_M", "q1_at_M"});
  const double w = euler2d::vorticity(s).l2(hx);
  t.row(s.t, s.grid.n, s.grid.L, s.theta.max_abs(), std::max(s.u1.max_abs(), s.u2.max_abs()),
        euler2d::excess_mass(s, gas), w, w * std::exp(log_xi(law, s.t) / 3.0),
        euler2d::max_gradient(s).value, diagnostics::q0(excess, s.grid, s.t + c.data.M * 0.5),
        diagnostics::q1(mom, s.grid, s.t + c.data.M * 0.5));
  return t;
}

// ================================================================ testbench

struct BenchRow {
  std::string bench;
  std::string function;
  double t = 0.0;
  diagnostics::BenchResult result;
};

struct StabilityRow {
  std::string bench;
  std::string function;
  double c_min = 0.0;
  double c_max = 0.0;
  double ratio() const { return c_max / c_min; }
};

struct TestbenchResult {
  std::vector<BenchRow> rows;
  std::vector<StabilityRow> stability;
  std::vector<BenchRow> random_divcurl;
  double stability_limit = 1.5;
};

namespace detail {

/// Samples Phi(t, .) on a grid with four empty cells around the support.
inline euler2d::Field sample_catalog(const diagnostics::CatalogEntry& e, double t,
                                     const euler2d::Grid2D& g) {
  euler2d::Field f(g.n);
  for (int j = 0; j < g.n; ++j) {
    for (int i = 0; i < g.n; ++i) {
      f(i, j) = diagnostics::evaluate_jet(e.phi, t, g.coord(i), g.coord(j)).v;
    }
  }
  return f;
}

}  // namespace detail

inline TestbenchResult run_testbench(const ExperimentConfig& c) {
  using namespace diagnostics;
  TestbenchResult r;
  r.stability_limit = c.testbench.stability_ratio;
  const auto catalog = analytic_catalog(c.testbench.catalog_M);
  const int N = c.testbench.samples;
  for (std::size_t k = 0; k < catalog.size(); ++k) {
    const auto& e = catalog[k];
    const auto& partner = catalog[(k + 1) % catalog.size()];
    for (double t : c.testbench.times) {
      const Sampling s = catalog_sampling(e, t, N);
      r.rows.push_back({"klainerman", e.name, t, testbench_klainerman(e.phi, t, s)});
      r.rows.push_back(
          {"pointwise-nu-0.5", e.name, t, testbench_weighted_pointwise(e.phi, t, e.M, 0.5, s)});
      r.rows.push_back({"l2-ell-0", e.name, t, testbench_weighted_l2(e.phi, t, e.M, 0.0, s)});
      r.rows.push_back({"l2-ell-0.5", e.name, t, testbench_weighted_l2(e.phi, t, e.M, 0.5, s)});
      const double R = t + e.M;
      const int n = c.testbench.divcurl_n;
      // Support radius R plus five cells of margin.
      const euler2d::Grid2D g(R * n / (n - 10.0), n);
      const auto U1 = detail::sample_catalog(e, t, g);
      const auto U2 = detail::sample_catalog(partner, t, g);
      r.rows.push_back({"divcurl", e.name + "/" + partner.name, t, testbench_divcurl(U1, U2, g)});
    }
  }
  for (const auto& row : r.rows) {
    auto it = std::find_if(r.stability.begin(), r.stability.end(), [&](const StabilityRow& s) {
      return s.bench == row.bench && s.function == row.function;
    });
    const double C = row.result.constant();
    if (it == r.stability.end()) {
      r.stability.push_back({row.bench, row.function, C, C});
    } else {
      it->c_min = std::min(it->c_min, C);
      it->c_max = std::max(it->c_max, C);
    }
  }
  std::mt19937_64 rng(c.seed);
  const euler2d::Grid2D g(1.0, c.testbench.divcurl_n);
  for (int k = 0; k < c.testbench.random_fields; ++k) {
    const auto [U1, U2] = random_bump_field(rng, g);
    r.random_divcurl.push_back({"divcurl", "random-" + std::to_string(k), 0.0,
                                testbench_divcurl(U1, U2, g)});
  }
  return r;
}

inline void write_testbench(ArtifactWriter& w, const TestbenchResult& r) {
  CsvTable t({"bench", "function", "t", "lhs", "rhs", "constant"});
  for (const auto& x : r.rows) {
    t.row(x.bench, x.function, x.t, x.result.lhs, x.result.rhs, x.result.constant());
  }
  w.write_csv("testbench.csv", t, "inequality sides on the analytic catalog");
  CsvTable s({"bench", "function", "c_min", "c_max", "ratio", "stable"});
  for (const auto& x : r.stability) {
    s.row(x.bench, x.function, x.c_min, x.c_max, x.ratio(), x.ratio() <= r.stability_limit);
  }
  w.write_csv("stability.csv", s, "spread of the empirical constant across times");
  CsvTable d({"function", "lhs", "rhs", "constant"});
  for (const auto& x : r.random_divcurl) {
    d.row(x.function, x.result.lhs, x.result.rhs, x.result.constant());
  }
  w.write_csv("divcurl_random.csv", d, "div-curl inequality on random compactly supported fields");
}

inline std::vector<Check> verify_testbench(const TestbenchResult& r) {
  std::vector<Check> out;
  int nonpositive = 0, unstable = 0, divcurl_violations = 0;
  double worst = 0.0;
  for (const auto& x : r.rows) {
    const double C = x.result.constant();
    if (!(C > 0.0) || !std::isfinite(C)) ++nonpositive;
  }
  for (const auto& s : r.stability) {
    worst = std::max(worst, s.ratio());
    if (!(s.ratio() <= r.stability_limit)) ++unstable;
  }
  for (const auto& rows : {&r.rows, &r.random_divcurl}) {
    for (const auto& x : *rows) {
      if (x.bench == "divcurl" && x.result.lhs > x.result.rhs * (1.0 + 1e-12)) ++divcurl_violations;
    }
  }
  out.push_back({"constants_positive_and_finite", nonpositive == 0,
                 std::to_string(nonpositive) + " failing rows"});
  out.push_back({"constants_stable_across_t", unstable == 0,
                 "worst max/min " + detail::num(worst) + " (limit " +
                     detail::num(r.stability_limit) + ")"});
  out.push_back({"divcurl_lhs_below_rhs", divcurl_violations == 0,
                 std::to_string(divcurl_violations) + " violations"});
  return out;
}

// ================================================================ specfun-check

struct PsiIdentityRow {
  double lambda = 0.0;
  double mu = 0.0;
  double z = 0.0;
  double psi = 0.0;
  double psi_shifted = 0.0;
  double fd_derivative = 0.0;
  double identity = 0.0;
  /// |fd - identity| / max(|identity|, |psi|)
  double residual = 0.0;
};

struct Delta0Row {
  std::string lambda;
  double mu = 0.0;
  double delta0 = 0.0;
  bool verified = false;
};

struct AdjointRow {
  double lambda = 0.0;
  double mu = 0.0;
  specfun::CharPoint p;
  specfun::CharPoint a;
  double residual_h = 0.0;
  double residual_h2 = 0.0;
  double ratio() const { return std::abs(residual_h / residual_h2); }
};

struct SpecfunResult {
  std::vector<PsiIdentityRow> psi;
  std::vector<Delta0Row> delta0;
  std::vector<AdjointRow> adjoint;
  std::array<double, 2> bracket{};
};

/// Law with lambda in [1, 3] (exactly 1 a quarter of the time) and mu in [0.1, 3].
inline DampingLaw random_law(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double lam = U(rng) < 0.25 ? 1.0 : 1.0 + 2.0 * U(rng);
  return DampingLaw(0.1 + 2.9 * U(rng), lam);
}

/// Apex A and a point P below it, at least 0.2 away from both characteristics
/// through A and inside t >= 0.
inline std::pair<specfun::CharPoint, specfun::CharPoint> random_interior_point(
    std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double xa = 1.5 + 1.5 * U(rng);
  const double za = xa + 0.5 + 3.5 * U(rng);
  const double xp = 1.0 + (xa - 0.2 - 1.0) * U(rng);
  const double zlo = std::max(xp, 2.0 - xp);
  const double zp = zlo + (za - 0.2 - zlo) * U(rng);
  return {specfun::CharPoint{xp, zp}, specfun::CharPoint{xa, za}};
}

inline SpecfunResult run_specfun_check(const ExperimentConfig& c) {
  using namespace specfun;
  SpecfunResult r;
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double h = 1e-5;
  for (int k = 0; k < c.specfun.psi_samples; ++k) {
    const DampingLaw law = random_law(rng);
    const auto p = HyperParams::from_law(law);
    PsiIdentityRow row;
    row.lambda = law.lambda();
    row.mu = law.mu();
    // z in (-1/2, 0], pulled in by h so both difference points stay in range.
    row.z = -h - (0.5 - 2.0 * h) * U(rng);
    row.psi = psi(p, row.z);
    row.psi_shifted = psi_shifted(p, row.z);
    row.fd_derivative = (psi(p, row.z + h) - psi(p, row.z - h)) / (2.0 * h);
    row.identity = p.prod_ab / p.c * row.psi_shifted;
    row.residual = std::abs(row.fd_derivative - row.identity) /
                   std::max(std::abs(row.identity), std::abs(row.psi));
    r.psi.push_back(row);
  }
  const double mu = c.law.mu.value;
  for (const auto& lam : c.specfun.lambdas) {
    const DampingLaw law(mu, lam.value);
    const Delta0Options opt;
    const double d0 = delta0_search(law, opt);
    r.delta0.push_back({lam.text, mu, d0,
                        psi_bound_holds(HyperParams::from_law(law), d0, 10 * opt.samples)});
  }
  for (const auto& lam : c.specfun.lambdas) {
    const DampingLaw law(mu, lam.value);
    for (int k = 0; k < c.specfun.adjoint_points; ++k) {
      const auto [p, a] = random_interior_point(rng);
      r.adjoint.push_back({lam.value, mu, p, a, adjoint_residual(p, a, law, 1e-2),
                           adjoint_residual(p, a, law, 5e-3)});
    }
  }
  r.bracket = adjoint_bracket_critical_coefficients();
  return r;
}

inline void write_specfun_check(ArtifactWriter& w, const SpecfunResult& r) {
  CsvTable p({"lambda", "mu", "z", "psi", "psi_shifted", "fd_derivative", "identity", "residual"});
  for (const auto& x : r.psi) {
    p.row(x.lambda, x.mu, x.z, x.psi, x.psi_shifted, x.fd_derivative, x.identity, x.residual);
  }
  w.write_csv("psi_identity.csv", p, "derivative identity under central differences");
  CsvTable d({"lambda", "mu", "delta0", "verified_10x"});
  for (const auto& x : r.delta0) d.row(x.lambda, x.mu, x.delta0, x.verified);
  w.write_csv("delta0.csv", d, "window where Psi stays in [1/2, 3/2]");
  CsvTable a({"lambda", "mu", "xi", "zeta", "xi_A", "zeta_A", "residual_h", "residual_h_half",
              "ratio"});
  for (const auto& x : r.adjoint) {
    a.row(x.lambda, x.mu, x.p.xi, x.p.zeta, x.a.xi, x.a.zeta, x.residual_h, x.residual_h2,
          x.ratio());
  }
  w.write_csv("adjoint.csv", a, "adjoint identity residual at h = 1e-2 and 5e-3");
  CsvTable b({"coefficient", "value"});
  b.row("mu", r.bracket[0]);
  b.row("mu^2", r.bracket[1]);
  w.write_csv("bracket.csv", b, "critical-power bracket coefficients");
}

inline std::vector<Check> verify_specfun_check(const SpecfunResult& r) {
  std::vector<Check> out;
  double worst = 0.0;
  for (const auto& x : r.psi) worst = std::max(worst, x.residual);
  out.push_back({"derivative_identity_1e-6", worst <= 1e-6, "max residual " + detail::num(worst)});
  const bool d0 = std::all_of(r.delta0.begin(), r.delta0.end(),
                              [](const Delta0Row& x) { return x.verified; });
  out.push_back({"delta0_bound_at_10x_resolution", d0, std::to_string(r.delta0.size()) + " laws"});
  double lo = INFINITY, hi = 0.0;
  for (const auto& x : r.adjoint) lo = std::min(lo, x.ratio()), hi = std::max(hi, x.ratio());
  const bool second = r.adjoint.empty() || (lo >= 3.5 && hi <= 4.5);
  out.push_back({"adjoint_second_order", second,
                 "ratios in [" + detail::num(lo) + ", " + detail::num(hi) + "]"});
  out.push_back({"critical_bracket_exactly_zero", r.bracket[0] == 0.0 && r.bracket[1] == 0.0,
                 detail::num(r.bracket[0]) + ", " + detail::num(r.bracket[1])});
  return out;
}

// ================================================================ sweep

struct SweepRow {
  Decimal lambda;
  Decimal mu;
  double eps = 0.0;
  CaseLabel label{Case::One, 2};
  /// global | global-to-t_end | blowup | failed
  std::string outcome;
  std::optional<double> t_blowup;
  std::optional<double> log1p_t_blowup;
  std::string detail;

  std::string expected() const { return is_blowup_case(label.kind) ? "blowup" : "global"; }
  bool consistent() const {
    return outcome != "failed" && (outcome == "blowup") == is_blowup_case(label.kind);
  }
};

inline SweepRow run_sweep_cell(const ExperimentConfig& base, const Decimal& lambda,
                               const Decimal& mu, double eps) {
  SweepRow row;
  row.lambda = lambda;
  row.mu = mu;
  row.eps = eps;
  try {
    ExperimentConfig c = base;
    c.law = {lambda, mu};
    c.eps = eps;
    const DampingLaw law = c.law.law();
    row.label = detail::label_of(law);
    if (base.sweep.cell_mode == "burgers") {
      const auto fam = burgers::ProfileFamily::unit_slope(
          burgers::profile_kind_from_string(c.data.profile), c.data.M);
      const auto life = burgers::lifespan(burgers::sample_profile(fam), eps, law);
      row.outcome = life.finite ? "blowup" : "global";
      if (life.finite) row.t_blowup = life.time(), row.log1p_t_blowup = life.log1p_time;
    } else {
      c.mode = Mode::Euler2d;
      c.solver.energies = false;
      c.solver.snapshot_times.clear();
      c.solver.sample_every = c.t_end;
      const auto r = run_euler2d(c, 1);
      row.outcome = outcome_of(r.run);
      if (r.run.blowup) {
        row.t_blowup = r.run.blowup->t;
        row.log1p_t_blowup = std::log1p(r.run.blowup->t);
        row.detail = euler2d::to_string(r.run.blowup->reason);
      } else {
        row.detail = "max gradient ratio " + fmt(r.series.back().gradient_ratio);
      }
    }
  } catch (const std::exception& e) {
    row.outcome = "failed";
    row.detail = e.what();
  }
  return row;
}

/// One row per (lambda, mu, eps) cell in lambda-major order. Cells run on up
/// to `threads` workers and are independent of one another.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& c, int threads) {
  struct Cell {
    Decimal lambda, mu;
    double eps;
  };
  std::vector<Cell> cells;
  for (const auto& l : c.sweep.lambda) {
    for (const auto& m : c.sweep.mu) {
      for (double e : c.sweep.eps) cells.push_back({l, m, e});
    }
  }
  std::vector<SweepRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < cells.size(); k = next++) {
      rows[k] = run_sweep_cell(c, cells[k].lambda, cells[k].mu, cells[k].eps);
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

inline void write_sweep(ArtifactWriter& w, const ExperimentConfig& c,
                        const std::vector<SweepRow>& rows) {
  CsvTable t({"lambda", "mu", "eps", "case", "dimension", "outcome", "t_blowup", "log1p_t_blowup",
              "expected", "consistent", "detail"});
  for (const auto& r : rows) {
    t.row(r.lambda.text, r.mu.text, r.eps, detail::case_name(r.label), r.label.dimension,
          r.outcome, r.t_blowup, r.log1p_t_blowup, r.expected(), r.consistent(), r.detail);
  }
  w.write_csv("phase_diagram.csv", t, "phase diagram, cell mode " + c.sweep.cell_mode);
}

inline std::vector<Check> verify_sweep(const std::vector<SweepRow>& rows) {
  int failed = 0, inconsistent = 0;
  for (const auto& r : rows) {
    if (r.outcome == "failed") ++failed;
    else if (!r.consistent()) ++inconsistent;
  }
  return {{"no_failed_cells", failed == 0, std::to_string(failed) + " failed"},
          {"outcomes_match_case", inconsistent == 0, std::to_string(inconsistent) + " mismatched"}};
}

}  // namespace dampeuler::cli
