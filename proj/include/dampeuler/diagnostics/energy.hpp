#pragma once

// Low-order energies of a stored solution history.
//
//   calE_k[Phi](t) = (1+t)^lambda sum_{1 <= |a|+j <= k} ||d_t^j grad^a Phi|| + ||Phi||
//   E_k[Phi](t)    = (1+t)^(1/2) sum_{|a| <= k-1} ||d Z^a Phi|| + (1+t)^(-1/2) ||Phi||
//
// with d = (d_t, d_1, d_2) and Z = (d_t, d_1, d_2, S, R, H_1, H_2),
// S = t d_t + x . grad, R = x1 d_2 - x2 d_1, H_i = x_i d_t + t d_i. Both are
// summed over Phi in {theta, u1, u2}; only k <= 2 is supported.

#include <array>
#include <cmath>

#include "dampeuler/core/damping.hpp"
#include "dampeuler/core/errors.hpp"
#include "dampeuler/euler2d/grid.hpp"
#include "dampeuler/euler2d/residuals.hpp"
#include "dampeuler/euler2d/solver.hpp"

namespace dampeuler::diagnostics {

using euler2d::Field;
using euler2d::Grid2D;
using euler2d::StateHistory;

inline double sigma_minus(double t, double r) { return std::sqrt(1.0 + (r - t) * (r - t)); }

/// Derivatives of one scalar field up to second order in (t, x1, x2) at a
/// single time level.
struct FieldJet {
  double t = 0.0;
  Field f, ft, ftt, f1, f2, ft1, ft2, f11, f12, f22;
};

enum class Component { Theta, U1, U2 };

inline const Field& component(const euler2d::FlowState2D& s, Component c) {
  switch (c) {
    case Component::Theta: return s.theta;
    case Component::U1: return s.u1;
    case Component::U2: return s.u2;
  }
  return s.theta;
}

/// Time derivatives use the middle of three levels when available; with two
/// levels only first derivatives exist (backward difference at the latest).
inline FieldJet field_jet(const StateHistory& h, Component c, int time_order) {
  if (h.size() == 0) throw DomainError("energy: empty history");
  if (time_order >= 2 && h.size() < 3) throw DomainError("energy: need three stored levels");
  if (time_order == 1 && h.size() < 2) throw DomainError("energy: need two stored levels");
  const bool centred = h.size() >= 3 && time_order >= 1;
  const auto& s = centred ? h[1] : h.latest();
  const int n = s.grid.n;
  const double hx = s.grid.h();
  FieldJet J;
  J.t = s.t;
  J.f = component(s, c);
  J.ft = Field(n);
  J.ftt = Field(n);
  if (time_order >= 1) {
    if (centred) {
      const auto ts = euler2d::TimeStencil::from_history(h);
      auto get = [c](const euler2d::FlowState2D& x) -> const Field& { return component(x, c); };
      J.ft = ts.apply(h, ts.first, get);
      J.ftt = ts.apply(h, ts.second, get);
    } else {
      const auto& a = h[h.size() - 2];
      const double dt = s.t - a.t;
      if (!(dt > 0.0)) throw DomainError("energy: time levels must increase");
      const Field& fa = component(a, c);
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) J.ft(i, j) = (J.f(i, j) - fa(i, j)) / dt;
      }
    }
  }
  J.f1 = Field(n), J.f2 = Field(n), J.ft1 = Field(n), J.ft2 = Field(n);
  J.f11 = Field(n), J.f12 = Field(n), J.f22 = Field(n);
  const double inv12h = 1.0 / (12.0 * hx);
  const double inv12h2 = 1.0 / (12.0 * hx * hx);
  const double inv144h2 = 1.0 / (144.0 * hx * hx);
  const std::ptrdiff_t sy = J.f.stride();
  for (int j = 0; j < n; ++j) {
    const double* p = J.f.row(j);
    const double* q = J.ft.row(j);
    for (int i = 0; i < n; ++i) {
      J.f1(i, j) = euler2d::stencil::d1(p + i, 1, inv12h);
      J.f2(i, j) = euler2d::stencil::d1(p + i, sy, inv12h);
      J.ft1(i, j) = euler2d::stencil::d1(q + i, 1, inv12h);
      J.ft2(i, j) = euler2d::stencil::d1(q + i, sy, inv12h);
      J.f11(i, j) = euler2d::stencil::d2(p + i, 1, inv12h2);
      J.f22(i, j) = euler2d::stencil::d2(p + i, sy, inv12h2);
      J.f12(i, j) = euler2d::stencil::d12(p + i, 1, sy, inv144h2);
    }
  }
  return J;
}

struct EnergyValue {
  double t = 0.0;
  double value = 0.0;
};

inline EnergyValue energy_calE(const StateHistory& h, int k, const DampingLaw& law) {
  if (k < 0 || k > 2) throw DomainError("energy_calE: k must be 0, 1 or 2");
  const int levels = static_cast<int>(h.size());
  if (levels < k + 1) throw DomainError("energy_calE: history depth must be at least k+1");
  EnergyValue out;
  for (Component c : {Component::Theta, Component::U1, Component::U2}) {
    const FieldJet J = field_jet(h, c, k);
    const double hx = h.latest().grid.h();
    out.t = J.t;
    double derivs = 0.0;
    if (k >= 1) derivs += J.ft.l2(hx) + J.f1.l2(hx) + J.f2.l2(hx);
    if (k >= 2) {
      derivs += J.ftt.l2(hx) + J.ft1.l2(hx) + J.ft2.l2(hx) + J.f11.l2(hx) + J.f12.l2(hx) +
                J.f22.l2(hx);
    }
    out.value += std::pow(1.0 + J.t, law.lambda()) * derivs + J.f.l2(hx);
  }
  return out;
}

/// ||(d_t Psi, d_1 Psi, d_2 Psi)|| with the three components assembled
/// pointwise by `at(i, j) -> {psi_t, psi_1, psi_2}`.
template <class At>
double spacetime_gradient_norm(const euler2d::Grid2D& g, At&& at) {
  double s = 0.0;
  for (int j = 0; j < g.n; ++j) {
    double rs = 0.0;
    for (int i = 0; i < g.n; ++i) {
      const std::array<double, 3> d = at(i, j);
      rs += d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    }
    s += rs;
  }
  return std::sqrt(s) * g.h();
}

/// Per-field contributions ||d Z_a Phi||, a = 0..6, at the jet's time.
inline std::array<double, 7> z_gradient_norms(const FieldJet& J, const euler2d::Grid2D& g) {
  const double t = J.t;
  std::array<double, 7> out{};
  // d_t, d_1, d_2 applied first.
  out[0] = spacetime_gradient_norm(g, [&](int i, int j) {
    return std::array<double, 3>{J.ftt(i, j), J.ft1(i, j), J.ft2(i, j)};
  });
  out[1] = spacetime_gradient_norm(g, [&](int i, int j) {
    return std::array<double, 3>{J.ft1(i, j), J.f11(i, j), J.f12(i, j)};
  });
  out[2] = spacetime_gradient_norm(g, [&](int i, int j) {
    return std::array<double, 3>{J.ft2(i, j), J.f12(i, j), J.f22(i, j)};
  });
  // S = t d_t + x . grad
  out[3] = spacetime_gradient_norm(g, [&](int i, int j) {
    const double x1 = g.coord(i), x2 = g.coord(j);
    return std::array<double, 3>{
        J.ft(i, j) + t * J.ftt(i, j) + x1 * J.ft1(i, j) + x2 * J.ft2(i, j),
        J.f1(i, j) + t * J.ft1(i, j) + x1 * J.f11(i, j) + x2 * J.f12(i, j),
        J.f2(i, j) + t * J.ft2(i, j) + x1 * J.f12(i, j) + x2 * J.f22(i, j)};
  });
  // R = x1 d_2 - x2 d_1
  out[4] = spacetime_gradient_norm(g, [&](int i, int j) {
    const double x1 = g.coord(i), x2 = g.coord(j);
    return std::array<double, 3>{x1 * J.ft2(i, j) - x2 * J.ft1(i, j),
                                 J.f2(i, j) + x1 * J.f12(i, j) - x2 * J.f11(i, j),
                                 -J.f1(i, j) + x1 * J.f22(i, j) - x2 * J.f12(i, j)};
  });
  // H_1 = x1 d_t + t d_1
  out[5] = spacetime_gradient_norm(g, [&](int i, int j) {
    const double x1 = g.coord(i);
    return std::array<double, 3>{x1 * J.ftt(i, j) + J.f1(i, j) + t * J.ft1(i, j),
                                 J.ft(i, j) + x1 * J.ft1(i, j) + t * J.f11(i, j),
                                 x1 * J.ft2(i, j) + t * J.f12(i, j)};
  });
  // H_2 = x2 d_t + t d_2
  out[6] = spacetime_gradient_norm(g, [&](int i, int j) {
    const double x2 = g.coord(j);
    return std::array<double, 3>{x2 * J.ftt(i, j) + J.f2(i, j) + t * J.ft2(i, j),
                                 x2 * J.ft1(i, j) + t * J.f12(i, j),
                                 J.ft(i, j) + x2 * J.ft2(i, j) + t * J.f22(i, j)};
  });
  return out;
}

inline EnergyValue energy_E(const StateHistory& h, int k) {
  if (k < 0 || k > 2) throw DomainError("energy_E: k must be 0, 1 or 2");
  if (k >= 1 && h.size() < 2) throw DomainError("energy_E: history depth must be at least 2");
  if (k == 2 && h.size() < 3) throw DomainError("energy_E: k = 2 needs three stored levels");
  EnergyValue out;
  const auto& g = h.latest().grid;
  for (Component c : {Component::Theta, Component::U1, Component::U2}) {
    const FieldJet J = field_jet(h, c, k == 0 ? 0 : (k == 1 ? 1 : 2));
    out.t = J.t;
    const double hx = g.h();
    double sum = 0.0;
    if (k >= 1) {
      sum += spacetime_gradient_norm(g, [&](int i, int j) {
        return std::array<double, 3>{J.ft(i, j), J.f1(i, j), J.f2(i, j)};
      });
    }
    if (k >= 2) {
      for (double v : z_gradient_norms(J, g)) sum += v;
    }
    out.value += std::sqrt(1.0 + J.t) * sum + J.f.l2(hx) / std::sqrt(1.0 + J.t);
  }
  return out;
}

}  // namespace dampeuler::diagnostics
