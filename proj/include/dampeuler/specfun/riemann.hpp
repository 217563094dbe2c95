#pragma once

// Riemann function of the damped 1-D wave operator in characteristic
// coordinates xi = 1+t-l, zeta = 1+t+l, and the lower bound it yields for
// the half-plane functional P(t, l).

#include <array>
#include <cmath>
#include <functional>

#include "dampeuler/core/damping.hpp"
#include "dampeuler/core/errors.hpp"
#include "dampeuler/core/numerics.hpp"
#include "dampeuler/specfun/hypergeometric.hpp"

namespace dampeuler::specfun {

struct CharPoint {
  double xi = 1.0;
  double zeta = 1.0;
};

struct TimeSpace {
  double t = 0.0;
  double l = 0.0;
};

inline CharPoint to_characteristic(double t, double l) { return {1.0 + t - l, 1.0 + t + l}; }

inline TimeSpace from_characteristic(CharPoint p) {
  return {0.5 * (p.xi + p.zeta) - 1.0, 0.5 * (p.zeta - p.xi)};
}

/// z = -(xi_A - xi)(zeta_A - zeta) / ((xi_A + zeta_A)(xi + zeta)).
inline double riemann_z(CharPoint p, CharPoint a) {
  const double s = p.xi + p.zeta;
  const double sa = a.xi + a.zeta;
  if (!(s > 0.0) || !(sa > 0.0)) {
    throw DomainError("riemann_z: xi + zeta must be positive at both points");
  }
  return -((a.xi - p.xi) * (a.zeta - p.zeta)) / (sa * s);
}

/// 2^(lambda-2), evaluated as exp((lambda-2) ln 2) since lambda is real.
inline double riemann_exponent(const DampingLaw& law) {
  return std::exp((law.lambda() - 2.0) * std::log(2.0));
}

/// R(p; A) = [Xi(xi+zeta-1) / Xi(xi_A+zeta_A-1)]^(2^(lambda-2)) Psi(a, b, 1; z).
inline double riemann_R(CharPoint p, CharPoint a, const DampingLaw& law) {
  const auto params = HyperParams::from_law(law, 1.0);
  const double z = riemann_z(p, a);
  const double log_ratio =
      log_xi(law, p.xi + p.zeta - 1.0) - log_xi(law, a.xi + a.zeta - 1.0);
  return std::exp(riemann_exponent(law) * log_ratio) * psi(params, z);
}

/// Coefficient c(s) in L*R = c(s) R, s = xi + zeta:
///   2^(lambda-2) mu lambda / s^(lambda+1) - ab / s^2 - 4^(lambda-2) mu^2 / s^(2 lambda).
inline double adjoint_bracket(double s, const DampingLaw& law) {
  const double mu = law.mu();
  const double lam = law.lambda();
  const double ab = HyperParams::from_law(law).prod_ab;
  const double e = riemann_exponent(law);
  return e * mu * lam / std::pow(s, lam + 1.0) - ab / (s * s) -
         e * e * mu * mu / std::pow(s, 2.0 * lam);
}

/// Polynomial-in-mu coefficients {[mu^1], [mu^2]} of s^2 * bracket at
/// lambda = 1, where every term scales as 1/s^2:
///   2^(-1) mu lambda  ->  {1/2, 0}
///   -ab = -(mu/2)(1 - mu/2)  ->  {-1/2, 1/4}
///   -4^(-1) mu^2  ->  {0, -1/4}
/// The sum is exactly zero in binary floating point.
inline std::array<double, 2> adjoint_bracket_critical_coefficients() {
  const double half = std::exp2(-1.0);
  const double quarter = std::exp2(-2.0);
  const std::array<double, 2> damping{half, 0.0};
  const std::array<double, 2> product{-half, quarter};
  const std::array<double, 2> square{0.0, -quarter};
  return {damping[0] + product[0] + square[0], damping[1] + product[1] + square[1]};
}

/// Central-difference L*R at p minus the closed form c(s) R.
///   L*R = R_{xi zeta} - beta(s)(R_xi + R_zeta) + 2^(lambda-1) mu lambda / s^(lambda+1) R,
///   beta(s) = 2^(lambda-2) mu / s^lambda.
inline double adjoint_residual(CharPoint p, CharPoint a, const DampingLaw& law, double h) {
  auto R = [&](double dx, double dz) {
    return riemann_R({p.xi + dx, p.zeta + dz}, a, law);
  };
  const double r0 = R(0, 0);
  const double r_pp = R(h, h), r_pm = R(h, -h), r_mp = R(-h, h), r_mm = R(-h, -h);
  const double r_xi = (R(h, 0) - R(-h, 0)) / (2.0 * h);
  const double r_zeta = (R(0, h) - R(0, -h)) / (2.0 * h);
  const double r_xz = (r_pp - r_pm - r_mp + r_mm) / (4.0 * h * h);

  const double s = p.xi + p.zeta;
  const double mu = law.mu();
  const double lam = law.lambda();
  const double e = riemann_exponent(law);
  const double beta = e * mu / std::pow(s, lam);
  const double zeroth = 2.0 * e * mu * lam / std::pow(s, lam + 1.0);
  const double lstar = r_xz - beta * (r_xi + r_zeta) + zeroth * r0;
  return lstar - adjoint_bracket(s, law) * r0;
}

/// Right side of the P lower bound at (t, l):
///   (1/4) Xi(t)^(-1/2) q0(l - t)
///   + (1/4) int_0^t int_{l-t+tau}^{l+t-tau} (Xi(tau)/Xi(t))^(1/2) f(tau, y) dy dtau.
/// Evaluated with nested adaptive Gauss-Kronrod at 1e-8 relative.
inline double p_lower_bound(double t, double l, const std::function<double(double)>& q0,
                            const std::function<double(double, double)>& f,
                            const DampingLaw& law, double rel_tol = 1e-8) {
  if (!(t >= 0.0)) throw DomainError("p_lower_bound: t must be >= 0");
  const double log_xi_t = log_xi(law, t);
  const double initial = 0.25 * std::exp(-0.5 * log_xi_t) * q0(l - t);
  if (t == 0.0) return initial;
  const numerics::QuadratureTolerance tol{rel_tol, 1e-300};
  auto inner = [&](double tau) {
    const double w = std::exp(0.5 * (log_xi(law, tau) - log_xi_t));
    auto fy = [&](double y) { return f(tau, y); };
    const double lo = l - t + tau;
    const double hi = l + t - tau;
    if (hi <= lo) return 0.0;
    return w * numerics::integrate(fy, lo, hi, tol).value;
  };
  const double volume = numerics::integrate(inner, 0.0, t, tol).value;
  return initial + 0.25 * volume;
}

}  // namespace dampeuler::specfun
