#pragma once

// Numerical checks of the functional inequalities used by the energy
// arguments, evaluated on synthetic fields:
//
//   div-curl     ||grad U|| <= ||curl U|| + ||div U||
//   Klainerman   (1+t+r) sigma_- |Phi|^2 <= C sum_{|a|<=2} ||Z^a Phi||^2
//   weighted     |sigma_-^(nu-1) Phi|_inf <= C |sigma_-^nu grad Phi|_inf
//                ||sigma_-^(-l) Phi|| <= C (t+M)^((1-l)_+) ||grad Phi||
//
// Each check returns both sides; the empirical constant is lhs / rhs.

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dampeuler/core/errors.hpp"
#include "dampeuler/diagnostics/energy.hpp"
#include "dampeuler/diagnostics/jet.hpp"
#include "dampeuler/euler2d/grid.hpp"

namespace dampeuler::diagnostics {

struct BenchResult {
  double lhs = 0.0;
  double rhs = 0.0;
  /// lhs / rhs, or 0 when both sides vanish.
  double constant() const { return rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? INFINITY : 0.0); }
};

// ---------------------------------------------------------------- div-curl

struct DivCurlNorms {
  double grad = 0.0;
  double div = 0.0;
  double curl = 0.0;
};

/// Discrete norms with the fourth-order central stencil. U must vanish in the
/// outer four cells of the grid; then grad^2 = div^2 + curl^2 up to rounding.
inline DivCurlNorms divcurl_norms(const Field& U1, const Field& U2, const Grid2D& g) {
  const int n = g.n;
  if (U1.n() != n || U2.n() != n) throw DomainError("testbench_divcurl: field size mismatch");
  constexpr int margin = 4;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const bool edge = i < margin || j < margin || i >= n - margin || j >= n - margin;
      if (edge && (U1(i, j) != 0.0 || U2(i, j) != 0.0)) {
        throw DomainError("testbench_divcurl: support reaches within 4 cells of the boundary");
      }
    }
  }
  const double inv12h = 1.0 / (12.0 * g.h());
  const std::ptrdiff_t sy = U1.stride();
  double grad2 = 0.0, div2 = 0.0, curl2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const double* a = U1.row(j);
    const double* b = U2.row(j);
    double rg = 0.0, rd = 0.0, rc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double a1 = euler2d::stencil::d1(a + i, 1, inv12h);
      const double a2 = euler2d::stencil::d1(a + i, sy, inv12h);
      const double b1 = euler2d::stencil::d1(b + i, 1, inv12h);
      const double b2 = euler2d::stencil::d1(b + i, sy, inv12h);
      rg += a1 * a1 + a2 * a2 + b1 * b1 + b2 * b2;
      rd += (a1 + b2) * (a1 + b2);
      rc += (b1 - a2) * (b1 - a2);
    }
    grad2 += rg, div2 += rd, curl2 += rc;
  }
  const double h = g.h();
  return {std::sqrt(grad2) * h, std::sqrt(div2) * h, std::sqrt(curl2) * h};
}

/// lhs = ||grad U||, rhs = ||curl U|| + ||div U||.
inline BenchResult testbench_divcurl(const Field& U1, const Field& U2, const Grid2D& g) {
  const auto d = divcurl_norms(U1, U2, g);
  return {d.grad, d.curl + d.div};
}

/// Sum of three compactly supported wave packets a (1 - |x-c|^2/s^2)_+^4 cos(k.(x-c) + phi)
/// per component, with |k| s <= 3 and supports inside |x| <= 0.7 L.
inline std::pair<Field, Field> random_bump_field(std::mt19937_64& rng, const Grid2D& g) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Field f[2] = {Field(g.n), Field(g.n)};
  for (auto& comp : f) {
    for (int b = 0; b < 3; ++b) {
      const double amp = 2.0 * U(rng) - 1.0;
      const double s = g.L * (0.15 + 0.15 * U(rng));
      const double cr = (0.7 * g.L - s) * U(rng), ca = 2.0 * M_PI * U(rng);
      const double c1 = cr * std::cos(ca), c2 = cr * std::sin(ca);
      const double kr = 3.0 / s * U(rng), ka = 2.0 * M_PI * U(rng);
      const double k1 = kr * std::cos(ka), k2 = kr * std::sin(ka);
      const double phase = 2.0 * M_PI * U(rng);
      for (int j = 0; j < g.n; ++j) {
        for (int i = 0; i < g.n; ++i) {
          const double y1 = g.coord(i) - c1, y2 = g.coord(j) - c2;
          const double q = 1.0 - (y1 * y1 + y2 * y2) / (s * s);
          if (q > 0.0) comp(i, j) += amp * std::pow(q, 4) * std::cos(k1 * y1 + k2 * y2 + phase);
        }
      }
    }
  }
  return {std::move(f[0]), std::move(f[1])};
}

// ------------------------------------------------------ space-time functions

/// Phi(t, x1, x2) evaluated on jets seeded in (t, x1, x2).
using SpaceTimeFunction = std::function<Jet2(const Jet2& t, const Jet2& x1, const Jet2& x2)>;

inline Jet2 evaluate_jet(const SpaceTimeFunction& phi, double t, double x1, double x2) {
  return phi(Jet2::variable(t, 0), Jet2::variable(x1, 1), Jet2::variable(x2, 2));
}

/// Midpoint sampling of [-R, R]^2 with N points per axis.
struct Sampling {
  double R = 1.0;
  int N = 192;

  double coord(int i) const { return -R + (i + 0.5) * (2.0 * R / N); }
  double cell_area() const { return (2.0 * R / N) * (2.0 * R / N); }
};

namespace detail {

/// Coefficients of Z_a in the basis (d_t, d_1, d_2).
inline std::array<double, 3> z_coeff(int a, double t, double x1, double x2) {
  switch (a) {
    case 0: return {1.0, 0.0, 0.0};
    case 1: return {0.0, 1.0, 0.0};
    case 2: return {0.0, 0.0, 1.0};
    case 3: return {t, x1, x2};
    case 4: return {0.0, -x2, x1};
    case 5: return {x1, t, 0.0};
    default: return {x2, 0.0, t};
  }
}

/// D[j][k] = d_j of the k-th coefficient of Z_a (constant for every field).
inline std::array<std::array<double, 3>, 3> z_coeff_jacobian(int a) {
  std::array<std::array<double, 3>, 3> D{};
  switch (a) {
    case 3: D[0][0] = D[1][1] = D[2][2] = 1.0; break;
    case 4: D[1][2] = 1.0, D[2][1] = -1.0; break;
    case 5: D[0][1] = 1.0, D[1][0] = 1.0; break;
    case 6: D[0][2] = 1.0, D[2][0] = 1.0; break;
    default: break;
  }
  return D;
}

}  // namespace detail

inline constexpr int kZFieldCount = 7;

/// Z^a Phi for every ordered index of length <= 2: entry 0 is Phi, entries
/// 1..7 are Z_a Phi, then Z_a Z_b Phi at 8 + 7a + b.
inline std::array<double, 1 + kZFieldCount + kZFieldCount * kZFieldCount> z_derivatives(
    const Jet2& J, double t, double x1, double x2) {
  std::array<double, 1 + kZFieldCount + kZFieldCount * kZFieldCount> out{};
  out[0] = J.v;
  for (int b = 0; b < kZFieldCount; ++b) {
    const auto cb = detail::z_coeff(b, t, x1, x2);
    out[1 + b] = cb[0] * J.g[0] + cb[1] * J.g[1] + cb[2] * J.g[2];
  }
  for (int a = 0; a < kZFieldCount; ++a) {
    const auto ca = detail::z_coeff(a, t, x1, x2);
    for (int b = 0; b < kZFieldCount; ++b) {
      const auto cb = detail::z_coeff(b, t, x1, x2);
      const auto Db = detail::z_coeff_jacobian(b);
      double s = 0.0;
      for (int j = 0; j < 3; ++j) {
        double inner = 0.0;
        for (int k = 0; k < 3; ++k) inner += Db[j][k] * J.g[k] + cb[k] * J.H[j][k];
        s += ca[j] * inner;
      }
      out[1 + kZFieldCount + kZFieldCount * a + b] = s;
    }
  }
  return out;
}

// ------------------------------------------------------------- Klainerman

/// lhs = max_x (1+t+r) sigma_- Phi^2, rhs = sum_{|a|<=2} ||Z^a Phi||^2.
inline BenchResult testbench_klainerman(const SpaceTimeFunction& phi, double t,
                                        const Sampling& s) {
  if (!(t >= 0.0)) throw DomainError("testbench_klainerman: t must be nonnegative");
  BenchResult r;
  double sum = 0.0;
  for (int j = 0; j < s.N; ++j) {
    const double x2 = s.coord(j);
    double row = 0.0;
    for (int i = 0; i < s.N; ++i) {
      const double x1 = s.coord(i);
      const Jet2 J = evaluate_jet(phi, t, x1, x2);
      const double rad = std::hypot(x1, x2);
      r.lhs = std::max(r.lhs, (1.0 + t + rad) * sigma_minus(t, rad) * J.v * J.v);
      for (double z : z_derivatives(J, t, x1, x2)) row += z * z;
    }
    sum += row;
  }
  r.rhs = sum * s.cell_area();
  return r;
}

// --------------------------------------------------------------- weighted

namespace detail {

inline void check_support(double v, double rad, double t, double M) {
  if (v != 0.0 && rad > t + M) {
    throw DomainError("testbench_weighted: Phi is not supported in |x| <= t+M");
  }
}

}  // namespace detail

/// Pointwise form: lhs = max sigma_-^(nu-1) |Phi|, rhs = max sigma_-^nu |grad Phi|.
inline BenchResult testbench_weighted_pointwise(const SpaceTimeFunction& phi, double t, double M,
                                                double nu, const Sampling& s) {
  if (!(nu < 1.0)) throw DomainError("testbench_weighted: nu must be below 1");
  if (!(M > 0.0) || !(t >= 0.0)) throw DomainError("testbench_weighted: need M > 0, t >= 0");
  BenchResult r;
  for (int j = 0; j < s.N; ++j) {
    for (int i = 0; i < s.N; ++i) {
      const double x1 = s.coord(i), x2 = s.coord(j);
      const Jet2 J = evaluate_jet(phi, t, x1, x2);
      const double rad = std::hypot(x1, x2);
      detail::check_support(J.v, rad, t, M);
      const double sm = sigma_minus(t, rad);
      r.lhs = std::max(r.lhs, std::pow(sm, nu - 1.0) * std::abs(J.v));
      r.rhs = std::max(r.rhs, std::pow(sm, nu) * std::hypot(J.g[1], J.g[2]));
    }
  }
  return r;
}

/// L^2 form: lhs = ||sigma_-^(-l) Phi||, rhs = (t+M)^((1-l)_+) ||grad Phi||.
inline BenchResult testbench_weighted_l2(const SpaceTimeFunction& phi, double t, double M,
                                         double ell, const Sampling& s) {
  if (ell == 1.0) throw DomainError("testbench_weighted: l = 1 is excluded");
  if (!(M > 0.0) || !(t >= 0.0)) throw DomainError("testbench_weighted: need M > 0, t >= 0");
  double a = 0.0, b = 0.0;
  for (int j = 0; j < s.N; ++j) {
    double ra = 0.0, rb = 0.0;
    for (int i = 0; i < s.N; ++i) {
      const double x1 = s.coord(i), x2 = s.coord(j);
      const Jet2 J = evaluate_jet(phi, t, x1, x2);
      const double rad = std::hypot(x1, x2);
      detail::check_support(J.v, rad, t, M);
      const double w = std::pow(sigma_minus(t, rad), -ell) * J.v;
      ra += w * w;
      rb += J.g[1] * J.g[1] + J.g[2] * J.g[2];
    }
    a += ra, b += rb;
  }
  const double area = s.cell_area();
  return {std::sqrt(a * area), std::pow(t + M, std::max(1.0 - ell, 0.0)) * std::sqrt(b * area)};
}

// ---------------------------------------------------------------- catalog

/// Outgoing wave packets Phi = g((r - t - r0)/w) A(x/r) / sqrt(r) with
/// r0 = M - w, so the support lies in t + M - 2w <= |x| <= t + M.
struct CatalogEntry {
  std::string name;
  double M = 50.0;
  SpaceTimeFunction phi;
};

namespace detail {

using Profile = std::function<Jet2(const Jet2& u)>;
using Angular = std::function<Jet2(const Jet2& c, const Jet2& s)>;

inline SpaceTimeFunction outgoing_packet(double M, double w, Profile g, Angular A) {
  const double r0 = M - w;
  return [=](const Jet2& t, const Jet2& x1, const Jet2& x2) {
    const double rv = std::hypot(x1.v, x2.v);
    if (std::abs(rv - t.v - r0) >= w) return Jet2(0.0);
    const Jet2 r = sqrt(x1 * x1 + x2 * x2);
    const Jet2 u = (r - t - Jet2(r0)) * Jet2(1.0 / w);
    return g(u) * A(x1 / r, x2 / r) / sqrt(r);
  };
}

}  // namespace detail

inline std::vector<CatalogEntry> analytic_catalog(double M = 50.0) {
  if (!(M > 16.0)) throw DomainError("analytic_catalog: M must exceed 16");
  auto q = [](const Jet2& u) { return Jet2(1.0) - u * u; };
  const detail::Profile p3 = [=](const Jet2& u) { return pos_pow(q(u), 3); };
  const detail::Profile p4 = [=](const Jet2& u) { return pos_pow(q(u), 4); };
  const detail::Profile sm = [=](const Jet2& u) { return smooth_cutoff(q(u)); };
  const detail::Profile skew = [=](const Jet2& u) {
    return pos_pow(q(u), 4) * (Jet2(1.0) + Jet2(0.5) * u);
  };
  const detail::Profile odd = [=](const Jet2& u) { return u * pos_pow(q(u), 4); };
  const detail::Angular one = [](const Jet2&, const Jet2&) { return Jet2(1.0); };
  const detail::Angular m1 = [](const Jet2& c, const Jet2&) { return c; };
  const detail::Angular m2 = [](const Jet2& c, const Jet2& s) { return Jet2(2.0) * c * s; };
  const detail::Angular m3 = [](const Jet2& c, const Jet2& s) {
    return c * c * c - Jet2(3.0) * c * s * s;
  };
  const detail::Angular lop = [](const Jet2& c, const Jet2&) {
    return Jet2(1.0) + Jet2(0.5) * c;
  };
  using detail::outgoing_packet;
  return {
      {"radial-p3", M, outgoing_packet(M, 4.0, p3, one)},
      {"radial-p4", M, outgoing_packet(M, 4.0, p4, one)},
      {"radial-smooth", M, outgoing_packet(M, 4.0, sm, one)},
      {"radial-skew", M, outgoing_packet(M, 6.0, skew, one)},
      {"radial-odd", M, outgoing_packet(M, 4.0, odd, one)},
      {"dipole", M, outgoing_packet(M, 4.0, p4, m1)},
      {"quadrupole", M, outgoing_packet(M, 4.0, p4, m2)},
      {"hexapole", M, outgoing_packet(M, 5.0, p3, m3)},
      {"lopsided", M, outgoing_packet(M, 3.0, sm, lop)},
      {"wide-dipole", M, outgoing_packet(M, 8.0, skew, m1)},
  };
}

/// Sampling box for a catalog function at time t.
inline Sampling catalog_sampling(const CatalogEntry& e, double t, int N = 384) {
  return Sampling{1.02 * (t + e.M), N};
}

}  // namespace dampeuler::diagnostics
