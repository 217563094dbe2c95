#pragma once

// Quadrature and root-finding helpers shared by every module.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <utility>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "dampeuler/core/errors.hpp"

namespace dampeuler::numerics {

struct QuadratureTolerance {
  double relative = 1e-10;
  double absolute = 1e-14;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (QUADPACK qk15).
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    kronrod += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive 15-point Gauss-Kronrod on [a, b]: the panel with the
/// largest error estimate is bisected until the summed estimate drops below
/// max(relative*|value|, absolute). Throws ConvergenceError carrying the
/// partial estimate when the panel budget runs out.
template <class F>
QuadratureResult integrate(F&& f, double a, double b,
                           QuadratureTolerance tol = {},
                           std::size_t max_panels = 4000) {
  if (a == b) return {};
  std::priority_queue<detail::Panel> panels;
  auto first = detail::gk15(f, a, b);
  double value = first.value;
  double error = first.error;
  panels.push(first);
  while (error > std::max(tol.relative * std::abs(value), tol.absolute)) {
    if (panels.size() >= max_panels || !std::isfinite(value)) {
      throw ConvergenceError("adaptive quadrature did not converge", value, error);
    }
    const auto worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const auto left = detail::gk15(f, worst.a, mid);
    const auto right = detail::gk15(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  // Re-sum to shed accumulated cancellation from the running updates.
  double sum = 0.0;
  double err = 0.0;
  while (!panels.empty()) {
    sum += panels.top().value;
    err += panels.top().error;
    panels.pop();
  }
  return {sum, err};
}

/// Root of f on [lo, hi] where f(lo) and f(hi) have opposite signs. Stops
/// when the bracket is narrower than max(rel_tol * |x|, abs_tol).
template <class F>
double find_root(F&& f, double lo, double hi, double rel_tol = 1e-10,
                 double abs_tol = 1e-300) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    throw DomainError("find_root: interval does not bracket a root");
  }
  std::uintmax_t iters = 200;
  auto tol = [rel_tol, abs_tol](double x, double y) {
    return std::abs(x - y) <= std::max(rel_tol * std::max(std::abs(x), std::abs(y)), abs_tol);
  };
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  if (iters >= 200) {
    throw ConvergenceError("find_root: iteration limit", 0.5 * (a + b));
  }
  return 0.5 * (a + b);
}

}  // namespace dampeuler::numerics
