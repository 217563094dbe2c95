#pragma once

// Finite-volume solver for v_t + (v^2/2)_x = -alpha(t) v, used to cross-check
// the characteristic solution.
//
// The damping is removed exactly by the integrating factor: w = Xi v obeys
// w_t + Xi^{-1} (w^2/2)_x = 0, so a step of length dt is a Godunov step for
// plain Burgers with pseudo-time increment I(t+dt) - I(t).

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dampeuler/burgers/profile.hpp"
#include "dampeuler/core/damping.hpp"
#include "dampeuler/core/errors.hpp"

namespace dampeuler::burgers {

struct GridSnapshot {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> v;
};

class SolverDiverged : public std::runtime_error {
 public:
  SolverDiverged(const std::string& what, GridSnapshot last_good)
      : std::runtime_error(what), last_good_(std::move(last_good)) {}
  const GridSnapshot& last_good() const noexcept { return last_good_; }

 private:
  GridSnapshot last_good_;
};

struct GridOptions {
  int nx = 1024;
  double t_end = 1.0;
  double cfl = 0.9;
  /// Gradient catastrophe is declared when the undamped slope max|dw/dx|,
  /// w = Xi v, exceeds this multiple of its initial value.
  double blowup_factor = 30.0;
  /// Extra cells on each side beyond the furthest characteristic.
  int margin_cells = 16;
  /// Record a series row every this many steps (the final step is always
  /// recorded).
  int record_every = 10;
  /// Times at which the solution is captured (in addition to the final state).
  std::vector<double> capture_times;
};

struct SeriesRow {
  double t;
  double sup_v;
  double max_slope;
};

struct GridResult {
  std::vector<SeriesRow> series;
  std::optional<double> blowup_time;
  GridSnapshot final_state;
  std::vector<GridSnapshot> captures;
  double dx = 0.0;
};

namespace detail {

inline double godunov_burgers_flux(double wl, double wr) {
  auto f = [](double w) { return 0.5 * w * w; };
  if (wl > wr) {
    return (wl + wr) > 0.0 ? f(wl) : f(wr);
  }
  if (wl > 0.0) return f(wl);
  if (wr < 0.0) return f(wr);
  return 0.0;
}

}  // namespace detail

inline GridResult grid_solve(const ProfileFamily& family, double eps, const DampingLaw& law,
                             const GridOptions& opt) {
  if (opt.nx < 64) throw DomainError("grid_solve: nx must be at least 64");
  if (!(opt.t_end > 0.0)) throw DomainError("grid_solve: t_end must be positive");
  const double M = family.support();
  const double reach = eps * family.max_abs_value() * xi_inverse_integral(law, opt.t_end);
  const double half_width = M + reach;
  // Margin expressed in cells of the final grid: solve for dx self-consistently.
  const double dx = 2.0 * half_width / (opt.nx - 2 * opt.margin_cells);
  const double x_left = -half_width - opt.margin_cells * dx;
  const int n = opt.nx;

  GridResult out;
  out.dx = dx;
  std::vector<double> x(n), w(n), flux(n + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    x[i] = x_left + (i + 0.5) * dx;
    w[i] = eps * family.value(x[i]);
  }

  auto max_slope_of = [&](const std::vector<double>& f) {
    double s = 0.0;
    for (int i = 0; i + 1 < n; ++i) s = std::max(s, std::abs(f[i + 1] - f[i]) / dx);
    return s;
  };
  auto snapshot = [&](double t, double xi_t) {
    GridSnapshot s{t, x, w};
    for (auto& vi : s.v) vi /= xi_t;
    return s;
  };

  const double slope0 = max_slope_of(w);
  double t = 0.0;
  double xi_t = 1.0;
  double I_t = 0.0;
  std::size_t next_capture = 0;
  std::vector<double> captures = opt.capture_times;
  std::sort(captures.begin(), captures.end());

  auto record = [&](double tt, double xi_tt) {
    double sup = 0.0;
    for (double wi : w) sup = std::max(sup, std::abs(wi));
    out.series.push_back({tt, sup / xi_tt, max_slope_of(w) / xi_tt});
  };
  record(0.0, 1.0);

  GridSnapshot last_good = snapshot(0.0, 1.0);
  long step = 0;
  while (t < opt.t_end) {
    double wmax = 0.0;
    for (double wi : w) wmax = std::max(wmax, std::abs(wi));
    double dt = wmax > 0.0 ? opt.cfl * dx * xi_t / wmax : opt.t_end - t;
    bool hit_capture = false;
    if (next_capture < captures.size() && t + dt >= captures[next_capture]) {
      dt = captures[next_capture] - t;
      hit_capture = true;
    }
    dt = std::min(dt, opt.t_end - t);
    const double t_new = t + dt;
    const double I_new = xi_inverse_integral(law, t_new);
    const double dI = I_new - I_t;

    for (int i = 1; i < n; ++i) flux[i] = detail::godunov_burgers_flux(w[i - 1], w[i]);
    flux[0] = detail::godunov_burgers_flux(0.0, w[0]);
    flux[n] = detail::godunov_burgers_flux(w[n - 1], 0.0);
    const double ratio = dI / dx;
    for (int i = 0; i < n; ++i) w[i] -= ratio * (flux[i + 1] - flux[i]);

    t = t_new;
    I_t = I_new;
    xi_t = xi(law, t);
    ++step;

    for (double wi : w) {
      if (!std::isfinite(wi)) {
        throw SolverDiverged("grid_solve: non-finite state", last_good);
      }
    }
    last_good = snapshot(t, xi_t);
    if (hit_capture) {
      out.captures.push_back(last_good);
      ++next_capture;
    }
    const double slope = max_slope_of(w);
    if (!out.blowup_time && slope > opt.blowup_factor * slope0) {
      out.blowup_time = t;
      record(t, xi_t);
      break;
    }
    if (step % opt.record_every == 0 || t >= opt.t_end) record(t, xi_t);
  }
  out.final_state = snapshot(t, xi_t);
  return out;
}

}  // namespace dampeuler::burgers
