#pragma once

// Compactly supported initial data (rho0, u0) built on the smooth bump
// b(r) = exp(1 - 1/(1 - r^2/M^2)), b(0) = 1, with closed-form gradients.

#include <cmath>
#include <string>

#include "dampeuler/core/damping.hpp"
#include "dampeuler/core/errors.hpp"
#include "dampeuler/euler2d/grid.hpp"

namespace dampeuler::diagnostics {

using euler2d::Field;
using euler2d::Grid2D;

struct InitialData {
  Field rho0;
  Field u10;
  Field u20;
  /// Radius M of the support.
  double support = 1.0;
};

struct Bump {
  double M = 1.0;

  double operator()(double x1, double x2) const {
    const double q = 1.0 - (x1 * x1 + x2 * x2) / (M * M);
    return q > 0.0 ? std::exp(1.0 - 1.0 / q) : 0.0;
  }
  /// d b / d x_k = b * (-2 x_k / M^2) / q^2.
  double d(double x1, double x2, int k) const {
    const double q = 1.0 - (x1 * x1 + x2 * x2) / (M * M);
    if (q <= 0.0) return 0.0;
    const double xk = k == 1 ? x1 : x2;
    return std::exp(1.0 - 1.0 / q) * (-2.0 * xk / (M * M)) / (q * q);
  }
};

enum class DataFamily {
  Zero,
  Rotational,     ///< rho0 = A b, u0 = B (-x2, x1) b: nonzero curl
  Irrotational,   ///< rho0 = A b, u0 = B grad b: curl-free
  Outflow,       ///< rho0 = A b, u1 = x1 rho0 Lambda / rho_bar, u2 = 0
};

inline DataFamily data_family_from_string(const std::string& s) {
  if (s == "zero") return DataFamily::Zero;
  if (s == "rotational") return DataFamily::Rotational;
  if (s == "irrotational") return DataFamily::Irrotational;
  if (s == "outflow") return DataFamily::Outflow;
  throw UsageError("data.family", "unknown data family '" + s + "'");
}

inline std::string to_string(DataFamily f) {
  switch (f) {
    case DataFamily::Zero: return "zero";
    case DataFamily::Rotational: return "rotational";
    case DataFamily::Irrotational: return "irrotational";
    case DataFamily::Outflow: return "outflow";
  }
  return "?";
}

/// u1 = x1 rho0 Lambda / rho_bar, u2 = 0. rho0 must be nonnegative.
inline InitialData outflow_data(const Field& rho0, double Lambda, const GasLaw& gas,
                                 const Grid2D& grid, double support) {
  if (!(Lambda >= 0.0)) throw DomainError("outflow_data: Lambda must be nonnegative");
  InitialData d{rho0, Field(grid.n), Field(grid.n), support};
  for (int j = 0; j < grid.n; ++j) {
    for (int i = 0; i < grid.n; ++i) {
      if (rho0(i, j) < 0.0) throw DomainError("outflow_data: rho0 must be nonnegative");
      d.u10(i, j) = grid.coord(i) * rho0(i, j) * Lambda / gas.rho_bar();
    }
  }
  return d;
}

struct FamilyParams {
  DataFamily family = DataFamily::Zero;
  double M = 1.0;
  double rho_amplitude = 1.0;
  double u_amplitude = 1.0;
  double Lambda = 0.0;
};

inline InitialData make_initial_data(const FamilyParams& p, const GasLaw& gas,
                                     const Grid2D& grid) {
  if (!(p.M > 0.0)) throw DomainError("initial data: M must be positive");
  const Bump b{p.M};
  InitialData d{Field(grid.n), Field(grid.n), Field(grid.n), p.M};
  if (p.family == DataFamily::Zero) return d;
  d.rho0 = euler2d::sample_field(grid, [&](double x1, double x2) { return p.rho_amplitude * b(x1, x2); });
  switch (p.family) {
    case DataFamily::Rotational:
      d.u10 = euler2d::sample_field(grid, [&](double x1, double x2) { return -p.u_amplitude * x2 * b(x1, x2); });
      d.u20 = euler2d::sample_field(grid, [&](double x1, double x2) { return p.u_amplitude * x1 * b(x1, x2); });
      break;
    case DataFamily::Irrotational:
      d.u10 = euler2d::sample_field(grid, [&](double x1, double x2) { return p.u_amplitude * b.d(x1, x2, 1); });
      d.u20 = euler2d::sample_field(grid, [&](double x1, double x2) { return p.u_amplitude * b.d(x1, x2, 2); });
      break;
    case DataFamily::Outflow:
      return outflow_data(d.rho0, p.Lambda, gas, grid, p.M);
    case DataFamily::Zero: break;
  }
  return d;
}

}  // namespace dampeuler::diagnostics
