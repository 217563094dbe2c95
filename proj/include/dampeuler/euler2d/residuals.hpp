#pragma once

// Consistency checks on solver output: the vorticity transport equation and
// the damped wave equation for theta with its quadratic source Q = Q1 + Q2.
// Time derivatives come from three stored levels, never from rhs().

#include <array>
#include <cstdint>
#include <string>

#include "dampeuler/core/damping.hpp"
#include "dampeuler/core/errors.hpp"
#include "dampeuler/euler2d/grid.hpp"
#include "dampeuler/euler2d/solver.hpp"
#include "dampeuler/euler2d/state.hpp"

namespace dampeuler::euler2d {

/// Weights of the three-point first and second time derivatives at the
/// middle of (t0, t1, t2), valid for unequal spacing.
struct TimeStencil {
  std::array<double, 3> first{};
  std::array<double, 3> second{};
  double t = 0.0;

  static TimeStencil from_history(const StateHistory& h) {
    if (h.size() < 3) throw DomainError("residual: need three stored time levels");
    const double t0 = h[0].t, t1 = h[1].t, t2 = h[2].t;
    const double a = t1 - t0, b = t2 - t1;
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("residual: time levels must increase");
    TimeStencil s;
    s.t = t1;
    s.first = {-b / (a * (a + b)), (b - a) / (a * b), a / (b * (a + b))};
    s.second = {2.0 / (a * (a + b)), -2.0 / (a * b), 2.0 / (b * (a + b))};
    return s;
  }

  template <class Get>
  Field apply(const StateHistory& h, const std::array<double, 3>& w, Get get) const {
    const int n = h[1].grid.n;
    Field out(n);
    const Field& f0 = get(h[0]);
    const Field& f1 = get(h[1]);
    const Field& f2 = get(h[2]);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) out(i, j) = w[0] * f0(i, j) + w[1] * f1(i, j) + w[2] * f2(i, j);
    }
    return out;
  }
};

/// w_t + alpha w + u . grad w + w div u at the middle level.
inline Field vorticity_residual(const StateHistory& h, const DampingLaw& law) {
  const auto ts = TimeStencil::from_history(h);
  const FlowState2D& s = h[1];
  const int n = s.grid.n;
  const Field w0 = vorticity(h[0]), w1 = vorticity(h[1]), w2 = vorticity(h[2]);
  const double inv12h = 1.0 / (12.0 * s.grid.h());
  const std::ptrdiff_t sy = w1.stride();
  const double a = alpha(law, ts.t);
  Field out(n);
  for (int j = 0; j < n; ++j) {
    const double* w = w1.row(j);
    const double* v1 = s.u1.row(j);
    const double* v2 = s.u2.row(j);
    for (int i = 0; i < n; ++i) {
      const double wt = ts.first[0] * w0(i, j) + ts.first[1] * w[i] + ts.first[2] * w2(i, j);
      const double div = stencil::d1(v1 + i, 1, inv12h) + stencil::d1(v2 + i, sy, inv12h);
      const double adv = v1[i] * stencil::d1(w + i, 1, inv12h) + v2[i] * stencil::d1(w + i, sy, inv12h);
      out(i, j) = wt + a * w[i] + adv + w[i] * div;
    }
  }
  return out;
}

/// The eight terms of Q = Q1 + Q2 in two space dimensions.
enum class QTerm : int {
  ThetaLaplacian = 0,   ///< (gamma-1) theta lap theta
  DampedAdvection,      ///< -alpha u . grad theta
  MixedTime,            ///< -2 u . grad theta_t
  Hessian,              ///< -sum u_i u_j d_ij theta
  Stretching,           ///< -sum u_i d_i u_j d_j theta
  Acceleration,         ///< -u_t . grad theta
  Commutator,           ///< (1 + (gamma-1) theta) sum d_i u_j d_j u_i
  Divergence,           ///< (1 + (gamma-1) theta) (gamma-1) (div u)^2
};
inline constexpr int kQTermCount = 8;

inline std::string to_string(QTerm q) {
  static const char* names[kQTermCount] = {"theta-laplacian", "damped-advection", "mixed-time",
                                           "hessian",         "stretching",       "acceleration",
                                           "commutator",      "divergence"};
  return names[static_cast<int>(q)];
}

/// theta_tt + alpha theta_t - lap theta - Q at the middle level. Bit k of
/// `flip_mask` reverses the sign of QTerm k; nonzero masks exist only to
/// confirm that the check notices a wrong term.
inline Field wave_residual(const StateHistory& h, const DampingLaw& law, const GasLaw& gas,
                           std::uint32_t flip_mask = 0) {
  const auto ts = TimeStencil::from_history(h);
  const FlowState2D& s = h[1];
  const int n = s.grid.n;
  const double hx = s.grid.h();
  const double inv12h = 1.0 / (12.0 * hx);
  const double inv12h2 = 1.0 / (12.0 * hx * hx);
  const double inv144h2 = 1.0 / (144.0 * hx * hx);
  const double a = alpha(law, ts.t);
  const double g1 = gas.gamma() - 1.0;

  auto theta = [](const FlowState2D& x) -> const Field& { return x.theta; };
  auto u1 = [](const FlowState2D& x) -> const Field& { return x.u1; };
  auto u2 = [](const FlowState2D& x) -> const Field& { return x.u2; };
  const Field th_t = ts.apply(h, ts.first, theta);
  const Field th_tt = ts.apply(h, ts.second, theta);
  const Field u1_t = ts.apply(h, ts.first, u1);
  const Field u2_t = ts.apply(h, ts.first, u2);

  std::array<double, kQTermCount> sign;
  for (int k = 0; k < kQTermCount; ++k) sign[k] = (flip_mask >> k) & 1u ? -1.0 : 1.0;

  const std::ptrdiff_t sy = s.theta.stride();
  Field out(n);
  for (int j = 0; j < n; ++j) {
    const double* th = s.theta.row(j);
    const double* v1 = s.u1.row(j);
    const double* v2 = s.u2.row(j);
    const double* tht = th_t.row(j);
    for (int i = 0; i < n; ++i) {
      const double p1 = stencil::d1(th + i, 1, inv12h);
      const double p2 = stencil::d1(th + i, sy, inv12h);
      const double p11 = stencil::d2(th + i, 1, inv12h2);
      const double p22 = stencil::d2(th + i, sy, inv12h2);
      const double p12 = stencil::d12(th + i, 1, sy, inv144h2);
      const double lap = p11 + p22;
      const double a1 = stencil::d1(v1 + i, 1, inv12h), a2 = stencil::d1(v1 + i, sy, inv12h);
      const double b1 = stencil::d1(v2 + i, 1, inv12h), b2 = stencil::d1(v2 + i, sy, inv12h);
      const double tt1 = stencil::d1(tht + i, 1, inv12h), tt2 = stencil::d1(tht + i, sy, inv12h);
      const double w1 = v1[i], w2 = v2[i];
      const double c2 = 1.0 + g1 * th[i];
      const double div = a1 + b2;

      std::array<double, kQTermCount> q;
      q[0] = g1 * th[i] * lap;
      q[1] = -a * (w1 * p1 + w2 * p2);
      q[2] = -2.0 * (w1 * tt1 + w2 * tt2);
      q[3] = -(w1 * w1 * p11 + 2.0 * w1 * w2 * p12 + w2 * w2 * p22);
      // sum_ij u_i d_i u_j d_j theta = (u . grad u1) p1 + (u . grad u2) p2
      q[4] = -((w1 * a1 + w2 * a2) * p1 + (w1 * b1 + w2 * b2) * p2);
      q[5] = -(u1_t(i, j) * p1 + u2_t(i, j) * p2);
      // sum_ij d_i u_j d_j u_i = (d1 u1)^2 + 2 d2 u1 d1 u2 + (d2 u2)^2
      q[6] = c2 * (a1 * a1 + 2.0 * a2 * b1 + b2 * b2);
      q[7] = c2 * g1 * div * div;

      double Q = 0.0;
      for (int k = 0; k < kQTermCount; ++k) Q += sign[k] * q[k];
      out(i, j) = th_tt(i, j) + a * tht[i] - lap - Q;
    }
  }
  return out;
}

}  // namespace dampeuler::euler2d
