#pragma once

// Method of lines for
//   theta_t + u . grad theta + (1 + (gamma-1) theta) div u = 0,
//   u_t + alpha(t) u + u . grad u + grad theta = 0,
// with fourth-order central differences, sixth-difference hyperviscosity
// (sigma / h) (delta6_x + delta6_y) and classical RK4.

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dampeuler/core/damping.hpp"
#include "dampeuler/core/errors.hpp"
#include "dampeuler/euler2d/grid.hpp"
#include "dampeuler/euler2d/state.hpp"

namespace dampeuler::euler2d {

struct SolverParams {
  DampingLaw law{1.0, 1.0};
  GasLaw gas{2.0, 1.0};
  /// Hyperviscosity coefficient sigma; the term is sigma h^5 times a
  /// sixth-derivative approximation.
  double hyperviscosity = 0.01;
  /// Initial support radius M; fields are zeroed outside t + M + 4h.
  double support_radius = 1.0;
  double cfl = 0.4;
  int threads = 1;
};

/// Time derivative of each field; shares the state layout.
using Tendency = FlowState2D;

inline Tendency rhs(const FlowState2D& s, const SolverParams& p) {
  const int n = s.grid.n;
  const double h = s.grid.h();
  const double inv12h = 1.0 / (12.0 * h);
  const double hv = p.hyperviscosity / h;
  const double a = alpha(p.law, s.t);
  const double g1 = p.gas.gamma() - 1.0;
  const std::ptrdiff_t sy = s.theta.stride();
  Tendency out(s.grid, s.t);
  for_rows(n, p.threads, [&](int j0, int j1) {
    for (int j = j0; j < j1; ++j) {
      const double* th = s.theta.row(j);
      const double* v1 = s.u1.row(j);
      const double* v2 = s.u2.row(j);
      double* dth = out.theta.row(j);
      double* dv1 = out.u1.row(j);
      double* dv2 = out.u2.row(j);
      for (int i = 0; i < n; ++i) {
        const double th_x = stencil::d1(th + i, 1, inv12h);
        const double th_y = stencil::d1(th + i, sy, inv12h);
        const double a_x = stencil::d1(v1 + i, 1, inv12h);
        const double a_y = stencil::d1(v1 + i, sy, inv12h);
        const double b_x = stencil::d1(v2 + i, 1, inv12h);
        const double b_y = stencil::d1(v2 + i, sy, inv12h);
        const double w1 = v1[i], w2 = v2[i];
        dth[i] = -(w1 * th_x + w2 * th_y + (1.0 + g1 * th[i]) * (a_x + b_y)) +
                 hv * (stencil::delta6(th + i, 1) + stencil::delta6(th + i, sy));
        dv1[i] = -(a * w1 + w1 * a_x + w2 * a_y + th_x) +
                 hv * (stencil::delta6(v1 + i, 1) + stencil::delta6(v1 + i, sy));
        dv2[i] = -(a * w2 + w1 * b_x + w2 * b_y + th_y) +
                 hv * (stencil::delta6(v2 + i, 1) + stencil::delta6(v2 + i, sy));
      }
    }
  });
  return out;
}

/// max over cells of |u| + c, c^2 = 1 + (gamma-1) theta (clamped at 0).
inline double max_wave_speed(const FlowState2D& s, const GasLaw& gas) {
  const double g1 = gas.gamma() - 1.0;
  double m = 0.0;
  for (int j = 0; j < s.grid.n; ++j) {
    for (int i = 0; i < s.grid.n; ++i) {
      const double c2 = std::max(0.0, 1.0 + g1 * s.theta(i, j));
      const double sp = std::hypot(s.u1(i, j), s.u2(i, j)) + std::sqrt(c2);
      if (!(sp <= m)) m = sp;  // propagates NaN
    }
  }
  return m;
}

inline double stable_dt(const FlowState2D& s, const SolverParams& p) {
  return p.cfl * s.grid.h() / max_wave_speed(s, p.gas);
}

/// Zero every field outside radius t + M + 4h.
inline void apply_support_guard(FlowState2D& s, const SolverParams& p) {
  const double r = s.t + p.support_radius + 4.0 * s.grid.h();
  const double r2 = r * r;
  for (int j = 0; j < s.grid.n; ++j) {
    const double x2 = s.grid.coord(j);
    for (int i = 0; i < s.grid.n; ++i) {
      const double x1 = s.grid.coord(i);
      if (x1 * x1 + x2 * x2 > r2) s.theta(i, j) = s.u1(i, j) = s.u2(i, j) = 0.0;
    }
  }
}

namespace detail {

// out = base + c * k, interior only.
inline void axpy_state(FlowState2D& out, const FlowState2D& base, double c, const Tendency& k) {
  const int n = base.grid.n;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      out.theta(i, j) = base.theta(i, j) + c * k.theta(i, j);
      out.u1(i, j) = base.u1(i, j) + c * k.u1(i, j);
      out.u2(i, j) = base.u2(i, j) + c * k.u2(i, j);
    }
  }
}

}  // namespace detail

/// One classical RK4 step. Throws DomainError if dt exceeds the CFL limit
/// of the current state.
inline FlowState2D step(const FlowState2D& s, const SolverParams& p, double dt) {
  if (!(dt > 0.0)) throw DomainError("step: dt must be positive");
  const double limit = stable_dt(s, p);
  if (dt > limit * (1.0 + 1e-12)) {
    throw DomainError("step: dt " + std::to_string(dt) + " violates CFL limit " +
                      std::to_string(limit));
  }
  FlowState2D stage(s.grid, s.t);
  const Tendency k1 = rhs(s, p);
  detail::axpy_state(stage, s, 0.5 * dt, k1);
  stage.t = s.t + 0.5 * dt;
  const Tendency k2 = rhs(stage, p);
  detail::axpy_state(stage, s, 0.5 * dt, k2);
  const Tendency k3 = rhs(stage, p);
  detail::axpy_state(stage, s, dt, k3);
  stage.t = s.t + dt;
  const Tendency k4 = rhs(stage, p);

  FlowState2D next(s.grid, s.t + dt);
  const int n = s.grid.n;
  const double c = dt / 6.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      next.theta(i, j) = s.theta(i, j) + c * (k1.theta(i, j) + 2.0 * k2.theta(i, j) +
                                              2.0 * k3.theta(i, j) + k4.theta(i, j));
      next.u1(i, j) =
          s.u1(i, j) + c * (k1.u1(i, j) + 2.0 * k2.u1(i, j) + 2.0 * k3.u1(i, j) + k4.u1(i, j));
      next.u2(i, j) =
          s.u2(i, j) + c * (k1.u2(i, j) + 2.0 * k2.u2(i, j) + 2.0 * k3.u2(i, j) + k4.u2(i, j));
    }
  }
  apply_support_guard(next, p);
  return next;
}

enum class BlowupReason { Gradient, NonFinite, Positivity };

inline std::string to_string(BlowupReason r) {
  switch (r) {
    case BlowupReason::Gradient: return "gradient";
    case BlowupReason::NonFinite: return "non-finite";
    case BlowupReason::Positivity: return "positivity";
  }
  return "?";
}

struct BlowupReport {
  double t = 0.0;
  double x1 = 0.0;
  double x2 = 0.0;
  BlowupReason reason = BlowupReason::Gradient;
  /// Gradient measure over its initial value at detection.
  double ratio = 0.0;
};

struct GradientPeak {
  double value = 0.0;
  int i = 0;
  int j = 0;
};

/// max over cells of max(|grad theta|, |grad u|) with |grad u| the Frobenius
/// norm of the velocity gradient.
inline GradientPeak max_gradient(const FlowState2D& s) {
  const int n = s.grid.n;
  const double inv12h = 1.0 / (12.0 * s.grid.h());
  const std::ptrdiff_t sy = s.theta.stride();
  GradientPeak peak;
  for (int j = 0; j < n; ++j) {
    const double* th = s.theta.row(j);
    const double* v1 = s.u1.row(j);
    const double* v2 = s.u2.row(j);
    for (int i = 0; i < n; ++i) {
      const double gt = std::hypot(stencil::d1(th + i, 1, inv12h), stencil::d1(th + i, sy, inv12h));
      const double a_x = stencil::d1(v1 + i, 1, inv12h), a_y = stencil::d1(v1 + i, sy, inv12h);
      const double b_x = stencil::d1(v2 + i, 1, inv12h), b_y = stencil::d1(v2 + i, sy, inv12h);
      const double gu = std::sqrt(a_x * a_x + a_y * a_y + b_x * b_x + b_y * b_y);
      const double g = std::max(gt, gu);
      if (g > peak.value) peak = {g, i, j};
    }
  }
  return peak;
}

/// Reports non-finite values, loss of positivity of 1 + (gamma-1) theta, or
/// a gradient above threshold * initial_gradient (ignored when the initial
/// gradient is zero).
inline std::optional<BlowupReport> detect_blowup(const FlowState2D& s, const GasLaw& gas,
                                                 double initial_gradient, double threshold) {
  const int n = s.grid.n;
  const double g1 = gas.gamma() - 1.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double th = s.theta(i, j);
      if (!std::isfinite(th) || !std::isfinite(s.u1(i, j)) || !std::isfinite(s.u2(i, j))) {
        return BlowupReport{s.t, s.grid.coord(i), s.grid.coord(j), BlowupReason::NonFinite,
                            std::numeric_limits<double>::infinity()};
      }
      if (!(1.0 + g1 * th > 0.0)) {
        return BlowupReport{s.t, s.grid.coord(i), s.grid.coord(j), BlowupReason::Positivity,
                            std::numeric_limits<double>::infinity()};
      }
    }
  }
  if (initial_gradient > 0.0) {
    const auto peak = max_gradient(s);
    const double ratio = peak.value / initial_gradient;
    if (ratio > threshold) {
      return BlowupReport{s.t, s.grid.coord(peak.i), s.grid.coord(peak.j),
                          BlowupReason::Gradient, ratio};
    }
  }
  return std::nullopt;
}

/// The three most recent states, oldest first.
class StateHistory {
 public:
  void push(FlowState2D s) {
    levels_.push_back(std::move(s));
    if (levels_.size() > 3) levels_.pop_front();
  }
  std::size_t size() const { return levels_.size(); }
  const FlowState2D& operator[](std::size_t k) const { return levels_[k]; }
  const FlowState2D& latest() const { return levels_.back(); }

 private:
  std::deque<FlowState2D> levels_;
};

struct RunOptions {
  double t_end = 1.0;
  /// Constant step instead of the CFL step (the last step is shortened to
  /// land on t_end).
  std::optional<double> fixed_dt;
  double blowup_threshold = 1e3;
  /// Further thresholds whose first crossing times are also reported; the run
  /// continues until all are crossed or t_end is reached.
  std::vector<double> extra_thresholds;
};

struct ThresholdCrossing {
  double threshold = 0.0;
  std::optional<BlowupReport> report;
};

struct RunResult {
  FlowState2D final_state;
  std::optional<BlowupReport> blowup;
  std::vector<ThresholdCrossing> crossings;
  long steps = 0;
  double initial_gradient = 0.0;
};

/// Called with the history after the initial state and after every step.
using Observer = std::function<void(const StateHistory&)>;

inline RunResult run(FlowState2D state, const SolverParams& p, const RunOptions& opt,
                     const Observer& observe = {}) {
  if (!(opt.t_end > state.t)) throw DomainError("run: t_end must exceed the initial time");
  RunResult out;
  out.initial_gradient = max_gradient(state).value;
  out.crossings.push_back({opt.blowup_threshold, std::nullopt});
  for (double k : opt.extra_thresholds) out.crossings.push_back({k, std::nullopt});

  StateHistory history;
  history.push(state);
  if (observe) observe(history);

  auto pending = [&] {
    return std::any_of(out.crossings.begin(), out.crossings.end(),
                       [](const ThresholdCrossing& c) { return !c.report; });
  };
  const double t_tol = 1e-12 * std::max(1.0, opt.t_end);
  while (state.t < opt.t_end - t_tol && pending()) {
    double dt = opt.fixed_dt ? *opt.fixed_dt : stable_dt(state, p);
    if (!std::isfinite(dt)) break;
    if (state.t + dt > opt.t_end - t_tol) dt = opt.t_end - state.t;
    state = step(state, p, dt);
    if (state.t > opt.t_end - t_tol) state.t = opt.t_end;
    ++out.steps;
    history.push(state);
    if (observe) observe(history);
    // Hard failures do not depend on the threshold; check them once, then
    // compare a single gradient scan against every pending threshold.
    if (auto hard = detect_blowup(state, p.gas, 0.0, 0.0)) {
      for (auto& c : out.crossings) {
        if (!c.report) c.report = hard;
      }
    } else if (out.initial_gradient > 0.0) {
      const auto peak = max_gradient(state);
      const double ratio = peak.value / out.initial_gradient;
      for (auto& c : out.crossings) {
        if (!c.report && ratio > c.threshold) {
          c.report = BlowupReport{state.t, state.grid.coord(peak.i), state.grid.coord(peak.j),
                                  BlowupReason::Gradient, ratio};
        }
      }
    }
    if (out.crossings.front().report && !out.blowup) out.blowup = out.crossings.front().report;
    if (out.blowup && out.blowup->reason != BlowupReason::Gradient) break;
  }
  out.final_state = std::move(state);
  return out;
}

}  // namespace dampeuler::euler2d
