#pragma once

#include <cmath>

#include "dampeuler/core/damping.hpp"
#include "dampeuler/core/errors.hpp"
#include "dampeuler/euler2d/grid.hpp"

namespace dampeuler::euler2d {

/// Sound-speed variable theta and velocity (u1, u2) at time t.
struct FlowState2D {
  Grid2D grid;
  double t = 0.0;
  Field theta;
  Field u1;
  Field u2;

  explicit FlowState2D(const Grid2D& g = Grid2D{}, double time = 0.0)
      : grid(g), t(time), theta(g.n), u1(g.n), u2(g.n) {}

  bool operator==(const FlowState2D&) const = default;
};

/// theta(0) = [(1 + eps rho0 / rho_bar)^(gamma-1) - 1] / (gamma - 1), u(0) = eps u0.
inline FlowState2D init_state(const GasLaw& gas, double eps, const Field& rho0, const Field& u10,
                              const Field& u20, const Grid2D& grid) {
  if (rho0.n() != grid.n || u10.n() != grid.n || u20.n() != grid.n) {
    throw DomainError("init_state: field size does not match grid");
  }
  FlowState2D s(grid, 0.0);
  const double g1 = gas.gamma() - 1.0;
  for (int j = 0; j < grid.n; ++j) {
    for (int i = 0; i < grid.n; ++i) {
      const double ratio = eps * rho0(i, j) / gas.rho_bar();
      if (!(1.0 + ratio > 0.0)) throw DomainError("init_state: density must stay positive");
      s.theta(i, j) = std::expm1(g1 * std::log1p(ratio)) / g1;
      s.u1(i, j) = eps * u10(i, j);
      s.u2(i, j) = eps * u20(i, j);
    }
  }
  return s;
}

struct DerivedFields {
  Field rho;
  Field pressure;
  Field vorticity;
};

inline Field density(const FlowState2D& s, const GasLaw& gas) {
  Field rho(s.grid.n);
  for (int j = 0; j < s.grid.n; ++j) {
    for (int i = 0; i < s.grid.n; ++i) rho(i, j) = gas.rho_of_theta(s.theta(i, j));
  }
  return rho;
}

/// Discrete curl d1 u2 - d2 u1, fourth-order central.
inline Field vorticity(const FlowState2D& s) {
  const int n = s.grid.n;
  const double inv12h = 1.0 / (12.0 * s.grid.h());
  const std::ptrdiff_t sy = s.u1.stride();
  Field w(n);
  for (int j = 0; j < n; ++j) {
    const double* a = s.u1.row(j);
    const double* b = s.u2.row(j);
    double* out = w.row(j);
    for (int i = 0; i < n; ++i) {
      out[i] = stencil::d1(b + i, 1, inv12h) - stencil::d1(a + i, sy, inv12h);
    }
  }
  return w;
}

inline DerivedFields derived_fields(const FlowState2D& s, const GasLaw& gas) {
  DerivedFields d{density(s, gas), Field(s.grid.n), vorticity(s)};
  for (int j = 0; j < s.grid.n; ++j) {
    for (int i = 0; i < s.grid.n; ++i) d.pressure(i, j) = gas.pressure(d.rho(i, j));
  }
  return d;
}

/// int (rho - rho_bar) dx.
inline double excess_mass(const FlowState2D& s, const GasLaw& gas) {
  Field rho = density(s, gas);
  const int n = s.grid.n;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) rho(i, j) -= gas.rho_bar();
  }
  return rho.sum(s.grid.h());
}

}  // namespace dampeuler::euler2d
