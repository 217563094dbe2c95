#pragma once

// Half-plane functionals of a 2-D flow and the ODE inequalities they obey.
//
//   q0(l)   = int_{x1>l} (x1-l)^2 (rho(0) - rho_bar) dx
//   q1(l)   = 2 int_{x1>l} (x1-l) (rho u1)(0) dx
//   P(t,l)  = int_{x1>l} (x1-l)^2 (rho(t) - rho_bar) dx
//   F''(t)  = int_{t+M0}^{t+M} P(t,l) dl / sqrt(l),  F(0) = F'(0) = 0.
//
// Cells are integrated exactly in x1 against the weight, so a cell cut by
// x1 = l contributes only its part beyond the line.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dampeuler/core/damping.hpp"
#include "dampeuler/core/errors.hpp"
#include "dampeuler/euler2d/grid.hpp"
#include "dampeuler/euler2d/state.hpp"
#include "dampeuler/specfun/hypergeometric.hpp"

namespace dampeuler::diagnostics {

using euler2d::Field;
using euler2d::FlowState2D;
using euler2d::Grid2D;

/// Column integrals S_i = int f(x1_i, x2) dx2 by the midpoint rule.
inline std::vector<double> column_integrals(const Field& f, const Grid2D& g) {
  std::vector<double> s(g.n, 0.0);
  for (int j = 0; j < g.n; ++j) {
    for (int i = 0; i < g.n; ++i) s[i] += f(i, j);
  }
  for (double& v : s) v *= g.h();
  return s;
}

/// int_{x1>l} (x1-l)^power g(x1) dx1 with g piecewise constant per column.
inline double half_plane_moment(const std::vector<double>& columns, const Grid2D& g, double l,
                                int power) {
  const double h = g.h();
  double acc = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double xb = g.coord(i) + 0.5 * h;
    if (xb <= l) continue;
    const double xa = std::max(g.coord(i) - 0.5 * h, l);
    const double a = xa - l, b = xb - l;
    double w = 0.0;
    switch (power) {
      case 1: w = 0.5 * (b * b - a * a); break;
      case 2: w = (b * b * b - a * a * a) / 3.0; break;
      default: throw DomainError("half_plane_moment: power must be 1 or 2");
    }
    acc += columns[i] * w;
  }
  return acc;
}

/// rho - rho_bar on the grid.
inline Field density_excess(const FlowState2D& s, const GasLaw& gas) {
  Field f = euler2d::density(s, gas);
  for (int j = 0; j < s.grid.n; ++j) {
    for (int i = 0; i < s.grid.n; ++i) f(i, j) -= gas.rho_bar();
  }
  return f;
}

inline double q0(const Field& excess, const Grid2D& g, double l) {
  return half_plane_moment(column_integrals(excess, g), g, l, 2);
}

inline double q1(const Field& momentum1, const Grid2D& g, double l) {
  return 2.0 * half_plane_moment(column_integrals(momentum1, g), g, l, 1);
}

/// rho u1 on the grid.
inline Field momentum1(const FlowState2D& s, const GasLaw& gas) {
  Field m = euler2d::density(s, gas);
  for (int j = 0; j < s.grid.n; ++j) {
    for (int i = 0; i < s.grid.n; ++i) m(i, j) *= s.u1(i, j);
  }
  return m;
}

inline std::vector<double> p_functional(const FlowState2D& s, const std::vector<double>& l_grid,
                                        const GasLaw& gas) {
  const auto cols = column_integrals(density_excess(s, gas), s.grid);
  std::vector<double> out;
  out.reserve(l_grid.size());
  for (double l : l_grid) out.push_back(half_plane_moment(cols, s.grid, l, 2));
  return out;
}

/// Radii 0 <= M_tilde < M, max(M_tilde, M - delta0) <= M0 < M and the
/// momentum ratio Lambda >= 3 ab.
struct BlowupData {
  double M = 1.0;
  double M_tilde = 0.0;
  double M0 = 0.5;
  double Lambda = 3.0;
  double delta0 = 0.5;

  /// Smallest admissible M0 for the law's delta0.
  static BlowupData for_law(const DampingLaw& law, double M, double M_tilde, double Lambda) {
    BlowupData d;
    d.M = M;
    d.M_tilde = M_tilde;
    d.Lambda = Lambda;
    d.delta0 = specfun::delta0_search(law);
    d.M0 = std::max(M_tilde, M - d.delta0);
    d.validate(law);
    return d;
  }

  void validate(const DampingLaw& law) const {
    if (!(M > 0.0) || !(M_tilde >= 0.0) || !(M_tilde < M)) {
      throw DomainError("BlowupData: need 0 <= M_tilde < M");
    }
    if (!(M0 >= std::max(M_tilde, M - delta0)) || !(M0 < M) || !(M0 > 0.0)) {
      throw DomainError("BlowupData: need max(M_tilde, M - delta0) <= M0 < M, M0 > 0");
    }
    const double ab = specfun::HyperParams::from_law(law).prod_ab;
    if (!(Lambda >= 3.0 * ab)) throw DomainError("BlowupData: need Lambda >= 3ab");
  }
};

/// The 65-point l-grid t + M0 + k (M - M0)/64 used for F''.
inline std::vector<double> strip_grid(double t, double M0, double M, int intervals = 64) {
  std::vector<double> l(intervals + 1);
  for (int k = 0; k <= intervals; ++k) l[k] = t + M0 + (M - M0) * k / intervals;
  return l;
}

/// F''(t) = int P dl / sqrt(l) by composite Simpson on an even, uniform
/// l-grid with spacing at most (M - M0)/64.
inline double f_second_derivative(const std::vector<double>& l_grid, const std::vector<double>& P,
                                  double M0, double M) {
  const std::size_t m = l_grid.size();
  if (m != P.size()) throw DomainError("f_functional: P and l-grid sizes differ");
  if (m < 3 || (m - 1) % 2 != 0) throw DomainError("f_functional: need an even number of intervals");
  const double dl = (l_grid.back() - l_grid.front()) / static_cast<double>(m - 1);
  if (dl > (M - M0) / 64.0 * (1.0 + 1e-12)) {
    throw DomainError("f_functional: l-grid spacing exceeds (M - M0)/64");
  }
  if (!(l_grid.front() > 0.0)) throw DomainError("f_functional: l must be positive");
  double acc = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double w = (k == 0 || k + 1 == m) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    acc += w * P[k] / std::sqrt(l_grid[k]);
  }
  return acc * dl / 3.0;
}

struct FSample {
  double t;
  double F;
  double F1;
  double F2;
};

/// F' and F by cumulative trapezoid from F(0) = F'(0) = 0.
inline std::vector<FSample> f_functional(const std::vector<double>& times,
                                         const std::vector<double>& F2) {
  if (times.size() != F2.size() || times.empty()) {
    throw DomainError("f_functional: times and F'' must be nonempty and equal length");
  }
  std::vector<FSample> out;
  out.reserve(times.size());
  out.push_back({times[0], 0.0, 0.0, F2[0]});
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double dt = times[k] - times[k - 1];
    if (!(dt > 0.0)) throw DomainError("f_functional: times must increase");
    const auto& prev = out.back();
    const double F1 = prev.F1 + 0.5 * dt * (prev.F2 + F2[k]);
    const double F = prev.F + 0.5 * dt * (prev.F1 + F1);
    out.push_back({times[k], F, F1, F2[k]});
  }
  return out;
}

struct RatioMonitor {
  std::string name;
  double t_from = 0.0;
  double t_to = 0.0;
  std::optional<double> infimum;
  std::optional<double> argmin;
  std::size_t samples = 0;
};

struct OdeReport {
  bool applicable = false;
  std::string reason;
  /// F''(t+M)/eps over [0, t_to].
  RatioMonitor linear;
  /// F''(t+M)^3 log(t/M+1) / F^2 over [M e^2, t_to].
  RatioMonitor quadratic;
  /// F'' (t+M)^(1+gamma) log^(gamma/2)(t/M+1) / F^gamma, reported for 1 < gamma < 2.
  std::optional<RatioMonitor> power;
};

/// Empirical infima of the blowup ratios over samples with t <= t_to.
/// Declines for the global-existence cases.
inline OdeReport monitor_ode_inequalities(const std::vector<FSample>& series, double eps, double M,
                                          CaseLabel label, double gamma, double t_to) {
  OdeReport r;
  if (!is_blowup_case(label.kind)) {
    r.reason = "case " + to_string(label.kind) + " is a global-existence regime";
    return r;
  }
  r.applicable = true;
  const double t1 = M * std::exp(2.0);
  r.linear = {"F''(t+M)/eps", 0.0, t_to, std::nullopt, std::nullopt, 0};
  r.quadratic = {"F''(t+M)^3 log(t/M+1)/F^2", t1, t_to, std::nullopt, std::nullopt, 0};
  if (gamma > 1.0 && gamma < 2.0) {
    r.power = RatioMonitor{"F''(t+M)^(1+g) log^(g/2)(t/M+1)/F^g", t1, t_to, std::nullopt,
                           std::nullopt, 0};
  }
  auto take = [](RatioMonitor& m, double t, double v) {
    ++m.samples;
    if (!m.infimum || v < *m.infimum) {
      m.infimum = v;
      m.argmin = t;
    }
  };
  for (const auto& s : series) {
    if (s.t > t_to) break;
    take(r.linear, s.t, s.F2 * (s.t + M) / eps);
    if (s.t >= t1 && s.F > 0.0) {
      const double lg = std::log(s.t / M + 1.0);
      take(r.quadratic, s.t, s.F2 * std::pow(s.t + M, 3) * lg / (s.F * s.F));
      if (r.power) {
        take(*r.power, s.t,
             s.F2 * std::pow(s.t + M, 1.0 + gamma) * std::pow(lg, 0.5 * gamma) /
                 std::pow(s.F, gamma));
      }
    }
  }
  return r;
}

}  // namespace dampeuler::diagnostics
