#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "dampeuler/core/errors.hpp"
#include "dampeuler/core/numerics.hpp"

namespace dampeuler {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Time-dependent friction alpha(t) = mu / (1+t)^lambda.
///
/// lambda is kept exactly as parsed; every branch on "lambda == 1" is an exact
/// floating-point comparison because the global/blowup dichotomy is
/// discontinuous there.
class DampingLaw {
 public:
  DampingLaw(double mu, double lambda) : mu_(mu), lambda_(lambda) {
    if (!(mu > 0.0) || !std::isfinite(mu)) {
      throw DomainError("DampingLaw: mu must be a positive finite number");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw DomainError("DampingLaw: lambda must be non-negative and finite");
    }
  }

  double mu() const noexcept { return mu_; }
  double lambda() const noexcept { return lambda_; }

  bool critical_power() const noexcept { return lambda_ == 1.0; }

  friend bool operator==(const DampingLaw&, const DampingLaw&) = default;

 private:
  double mu_;
  double lambda_;
};

inline double alpha(const DampingLaw& law, double t) {
  return law.mu() / std::pow(1.0 + t, law.lambda());
}

/// ln Xi(t). Defined for t > -1, which the characteristic-coordinate code
/// relies on when it evaluates Xi off the physical half-line.
inline double log_xi(const DampingLaw& law, double t) {
  const double mu = law.mu();
  const double lam = law.lambda();
  if (lam == 1.0) return mu * std::log1p(t);
  if (lam == 0.0) return mu * t;
  // mu/(1-lam) * ((1+t)^(1-lam) - 1), written with expm1 for small t.
  return mu / (1.0 - lam) * std::expm1((1.0 - lam) * std::log1p(t));
}

/// Integrating factor: Xi' = alpha Xi, Xi(0) = 1.
inline double xi(const DampingLaw& law, double t) {
  if (t == 0.0) return 1.0;
  return std::exp(log_xi(law, t));
}

/// sup_t Xi(t); finite only when lambda > 1.
inline double xi_limit(const DampingLaw& law) {
  if (law.lambda() > 1.0) return std::exp(law.mu() / (law.lambda() - 1.0));
  return kInfinity;
}

/// Whether I(+inf) = int_0^inf ds/Xi(s) is finite.
inline bool xi_inverse_integral_finite(const DampingLaw& law) {
  return law.lambda() < 1.0 || (law.lambda() == 1.0 && law.mu() > 1.0);
}

namespace detail {

// I expressed through u = ln(1+t), so that lifespans like e^1000 stay
// representable: I(u) = int_0^u e^v / Xi(e^v - 1) dv.
inline double xi_inverse_integral_log_quadrature(const DampingLaw& law, double u) {
  auto integrand = [&law](double v) {
    const double t = std::expm1(v);
    return std::exp(v - log_xi(law, t));
  };
  return numerics::integrate(integrand, 0.0, u, {1e-10, 1e-14}).value;
}

// I(+inf) for 0 < lambda < 1 via v = (1+s)^(1-lambda):
//   I = e^k/(1-lambda) * int_1^inf v^p e^{-k v} dv, k = mu/(1-lambda),
//   p = lambda/(1-lambda).
// The range is cut where Xi exceeds 1e16; beyond that log-concavity of the
// integrand bounds the tail by f(v*)/(k - p/v*), which is added.
inline double xi_inverse_integral_infinite_sublinear(const DampingLaw& law) {
  const double lam = law.lambda();
  const double k = law.mu() / (1.0 - lam);
  const double p = lam / (1.0 - lam);
  auto scaled = [k, p](double v) {
    // e^{-k(v-1)} v^p, i.e. 1/Xi times the Jacobian up to 1/(1-lambda).
    return std::exp(p * std::log(v) - k * (v - 1.0));
  };
  double v_cut = 1.0 + std::log(1e16) / k;
  // The tail bound needs the integrand to be decreasing past the cut.
  v_cut = std::max(v_cut, 2.0 * p / k);
  const auto body = numerics::integrate(scaled, 1.0, v_cut, {1e-11, 1e-15});
  const double tail = scaled(v_cut) / (k - p / v_cut);
  return (body.value + tail) / (1.0 - lam);
}

}  // namespace detail

/// I(t) = int_0^t ds / Xi(s), with t given through u = ln(1+t).
/// u = +inf returns I(+inf), which is +inf unless lambda < 1 or
/// (lambda == 1 and mu > 1).
inline double xi_inverse_integral_log(const DampingLaw& law, double u) {
  if (!(u >= 0.0)) throw DomainError("xi_inverse_integral: t must be >= 0");
  const double mu = law.mu();
  const double lam = law.lambda();
  if (std::isinf(u)) {
    if (!xi_inverse_integral_finite(law)) return kInfinity;
    if (lam == 0.0) return 1.0 / mu;
    if (lam == 1.0) return 1.0 / (mu - 1.0);
    return detail::xi_inverse_integral_infinite_sublinear(law);
  }
  if (lam == 1.0) {
    if (mu == 1.0) return u;
    return std::expm1((1.0 - mu) * u) / (1.0 - mu);
  }
  if (lam == 0.0) {
    const double t = std::expm1(u);
    return -std::expm1(-mu * t) / mu;
  }
  return detail::xi_inverse_integral_log_quadrature(law, u);
}

/// I(t) = int_0^t ds / Xi(s); accepts t = +inf.
inline double xi_inverse_integral(const DampingLaw& law, double t) {
  if (!(t >= 0.0)) throw DomainError("xi_inverse_integral: t must be >= 0");
  return xi_inverse_integral_log(law, std::isinf(t) ? kInfinity : std::log1p(t));
}

enum class Case { One = 1, Two = 2, Three = 3, Four = 4 };

struct CaseLabel {
  Case kind;
  int dimension;

  friend bool operator==(const CaseLabel&, const CaseLabel&) = default;
};

inline std::string to_string(Case c) {
  return "Case" + std::to_string(static_cast<int>(c));
}

/// Phase-diagram cell of (lambda, mu) in dimension d.
inline CaseLabel classify_case(const DampingLaw& law, int d) {
  if (d != 2 && d != 3) throw DomainError("classify_case: dimension must be 2 or 3");
  const double lam = law.lambda();
  if (lam < 1.0) return {Case::One, d};
  if (lam > 1.0) return {Case::Four, d};
  // lambda == 1; for d == 3, mu > 3 - d = 0 always holds.
  if (law.mu() > 3.0 - d) return {Case::Two, d};
  return {Case::Three, d};
}

/// Whether the case is one where small smooth solutions blow up in finite time.
inline bool is_blowup_case(Case c) { return c == Case::Three || c == Case::Four; }

/// Polytropic gas p = A rho^gamma with A fixed by c(rho_bar) = 1.
class GasLaw {
 public:
  GasLaw(double gamma, double rho_bar) : gamma_(gamma), rho_bar_(rho_bar) {
    if (!(gamma > 1.0)) throw DomainError("GasLaw: gamma must exceed 1");
    if (!(rho_bar > 0.0)) throw DomainError("GasLaw: rho_bar must be positive");
    A_ = 1.0 / (gamma * std::pow(rho_bar, gamma - 1.0));
  }

  double gamma() const noexcept { return gamma_; }
  double rho_bar() const noexcept { return rho_bar_; }
  double A() const noexcept { return A_; }

  double pressure(double rho) const { return A_ * std::pow(rho, gamma_); }

  /// theta = (A gamma rho^(gamma-1) - 1) / (gamma - 1) = (c^2 - 1)/(gamma - 1).
  double theta_of_rho(double rho) const {
    const double g1 = gamma_ - 1.0;
    return std::expm1(g1 * std::log(rho / rho_bar_)) / g1;
  }

  /// Inverse of theta_of_rho; requires 1 + (gamma-1) theta > 0.
  double rho_of_theta(double theta) const {
    const double g1 = gamma_ - 1.0;
    const double c2 = 1.0 + g1 * theta;
    if (!(c2 > 0.0)) throw DomainError("GasLaw: 1 + (gamma-1) theta must be positive");
    return rho_bar_ * std::exp(std::log1p(g1 * theta) / g1);
  }

 private:
  double gamma_;
  double rho_bar_;
  double A_;
};

}  // namespace dampeuler
