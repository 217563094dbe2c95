#pragma once

// Second-order forward-mode jets in the space-time variables (t, x1, x2):
// value, gradient and Hessian propagated through arithmetic and elementary
// functions.

#include <array>
#include <cmath>

namespace dampeuler::diagnostics {

struct Jet2 {
  double v = 0.0;
  std::array<double, 3> g{};
  std::array<std::array<double, 3>, 3> H{};

  Jet2() = default;
  Jet2(double value) : v(value) {}  // NOLINT: constants promote implicitly

  static Jet2 variable(double value, int k) {
    Jet2 j(value);
    j.g[k] = 1.0;
    return j;
  }
};

/// f(a) given f, f', f'' at a.v.
inline Jet2 chain(const Jet2& a, double f, double df, double d2f) {
  Jet2 r(f);
  for (int p = 0; p < 3; ++p) {
    r.g[p] = df * a.g[p];
    for (int q = 0; q < 3; ++q) r.H[p][q] = df * a.H[p][q] + d2f * a.g[p] * a.g[q];
  }
  return r;
}

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
  Jet2 r(a.v + b.v);
  for (int p = 0; p < 3; ++p) {
    r.g[p] = a.g[p] + b.g[p];
    for (int q = 0; q < 3; ++q) r.H[p][q] = a.H[p][q] + b.H[p][q];
  }
  return r;
}

inline Jet2 operator-(const Jet2& a) { return chain(a, -a.v, -1.0, 0.0); }
inline Jet2 operator-(const Jet2& a, const Jet2& b) { return a + (-b); }

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  Jet2 r(a.v * b.v);
  for (int p = 0; p < 3; ++p) {
    r.g[p] = a.g[p] * b.v + a.v * b.g[p];
    for (int q = 0; q < 3; ++q) {
      r.H[p][q] = a.H[p][q] * b.v + a.v * b.H[p][q] + a.g[p] * b.g[q] + b.g[p] * a.g[q];
    }
  }
  return r;
}

inline Jet2 reciprocal(const Jet2& a) {
  const double iv = 1.0 / a.v;
  return chain(a, iv, -iv * iv, 2.0 * iv * iv * iv);
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }

inline Jet2 exp(const Jet2& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}

inline Jet2 sqrt(const Jet2& a) {
  const double r = std::sqrt(a.v);
  return chain(a, r, 0.5 / r, -0.25 / (r * a.v));
}

inline Jet2 sin(const Jet2& a) { return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet2 cos(const Jet2& a) { return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }

/// a^k for integer k >= 0.
inline Jet2 pow(const Jet2& a, int k) {
  if (k == 0) return Jet2(1.0);
  const double pk2 = k >= 2 ? std::pow(a.v, k - 2) : 0.0;
  const double pk1 = std::pow(a.v, k - 1);
  return chain(a, pk1 * a.v, k * pk1, k >= 2 ? k * (k - 1) * pk2 : 0.0);
}

/// max(a, 0)^k, which is C^(k-1) across a = 0.
inline Jet2 pos_pow(const Jet2& a, int k) { return a.v > 0.0 ? pow(a, k) : Jet2(0.0); }

/// exp(1 - 1/a) for a > 0, zero otherwise.
inline Jet2 smooth_cutoff(const Jet2& a) {
  if (!(a.v > 0.0)) return Jet2(0.0);
  return exp(Jet2(1.0) - reciprocal(a));
}

}  // namespace dampeuler::diagnostics
