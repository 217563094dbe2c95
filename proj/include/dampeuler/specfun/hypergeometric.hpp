#pragma once

// The Gauss series Psi(a, b, c; z) for a + b = 1, evaluated on the left
// window (-1, 0]. a and b may be complex conjugates (ab > 1/4); the series
// only ever sees the real products (a+k)(b+k) = k^2 + k(a+b) + ab.

#include <cmath>
#include <cstddef>
#include <utility>

#include "dampeuler/core/damping.hpp"
#include "dampeuler/core/errors.hpp"

namespace dampeuler::specfun {

struct HyperParams {
  double sum_ab = 1.0;
  double prod_ab = 0.0;
  double c = 1.0;

  /// (a, b) generated by a damping law with lambda >= 1:
  ///   ab = mu lambda / 2           for lambda > 1,
  ///   ab = (mu/2)(1 - mu/2)        for lambda = 1.
  static HyperParams from_law(const DampingLaw& law, double c = 1.0) {
    if (law.lambda() < 1.0) {
      throw DomainError("HyperParams: the (a, b) map is defined only for lambda >= 1");
    }
    const double mu = law.mu();
    const double ab = law.lambda() == 1.0 ? 0.5 * mu * (1.0 - 0.5 * mu)
                                          : 0.5 * mu * law.lambda();
    return {1.0, ab, c};
  }

  /// Parameters of Psi(a+1, b+1, c+1; .): sum + 2, prod + sum + 1.
  HyperParams shifted() const { return {sum_ab + 2.0, prod_ab + sum_ab + 1.0, c + 1.0}; }
};

/// (a)_n (b)_n = prod_{k<n} (k^2 + k (a+b) + ab).
inline double pochhammer_product(const HyperParams& p, std::size_t n) {
  double acc = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = static_cast<double>(k);
    acc *= kk * kk + kk * p.sum_ab + p.prod_ab;
  }
  return acc;
}

struct SeriesOptions {
  double rel_stop = 1e-14;
  int consecutive = 3;
  std::size_t max_terms = 100000;
};

namespace detail {

inline double gauss_series(const HyperParams& p, double z, SeriesOptions opt) {
  if (!(z > -1.0 && z <= 0.0)) {
    throw DomainError("psi: z must lie in (-1, 0]");
  }
  if (!(p.c > 0.0)) throw DomainError("psi: c must be positive");
  if (z == 0.0) return 1.0;
  double term = 1.0;
  double sum = 1.0;
  int small_run = 0;
  for (std::size_t n = 0; n < opt.max_terms; ++n) {
    const double k = static_cast<double>(n);
    term *= (k * k + k * p.sum_ab + p.prod_ab) / ((k + 1.0) * (p.c + k)) * z;
    sum += term;
    if (std::abs(term) < opt.rel_stop * std::abs(sum)) {
      if (++small_run >= opt.consecutive) return sum;
    } else {
      small_run = 0;
    }
    if (term == 0.0) return sum;
  }
  throw ConvergenceError("psi: series did not converge", sum, std::abs(term));
}

}  // namespace detail

/// Psi(a, b, c; z) for z in (-1, 0].
inline double psi(const HyperParams& p, double z, SeriesOptions opt = {}) {
  return detail::gauss_series(p, z, opt);
}

/// Psi(a+1, b+1, c+1; z); with c = 1 this is Psi(a+1, b+1, 2; z).
inline double psi_shifted(const HyperParams& p, double z, SeriesOptions opt = {}) {
  return detail::gauss_series(p.shifted(), z, opt);
}

/// Window search: the largest delta0 = k 2^-12 < 1 for which
/// Psi(a,b,1;z) and Psi(a+1,b+1,2;z) stay in [1/2, 3/2] at `samples`
/// equispaced z in [-delta0/2, 0].
struct Delta0Options {
  int resolution_log2 = 12;
  int samples = 256;
};

inline bool psi_bound_holds(const HyperParams& p, double delta0, int samples) {
  auto inside = [](double v) { return v >= 0.5 && v <= 1.5; };
  // Sweep from the far end, where a violation is most likely.
  for (int i = samples - 1; i >= 0; --i) {
    const double z = -0.5 * delta0 * static_cast<double>(i) / (samples - 1);
    if (!inside(psi(p, z)) || !inside(psi_shifted(p, z))) return false;
  }
  return true;
}

inline double delta0_search(const DampingLaw& law, Delta0Options opt = {}) {
  const auto p = HyperParams::from_law(law, 1.0);
  const long cells = 1L << opt.resolution_log2;
  const double step = 1.0 / static_cast<double>(cells);
  for (long k = cells - 1; k >= 1; --k) {
    const double d = static_cast<double>(k) * step;
    if (psi_bound_holds(p, d, opt.samples)) return d;
  }
  throw ConvergenceError("delta0_search: no admissible window at minimum resolution", 0.0);
}

}  // namespace dampeuler::specfun
