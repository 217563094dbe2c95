#pragma once

// Uniform cell-centred grid on [-L, L]^2 and zero-padded scalar fields.
//
// Index (i, j) is the cell centred at (x1, x2) = (-L + (i+1/2) h, -L + (j+1/2) h);
// storage is row-major with j as the row. Each field carries kPad ghost cells
// per side that are always zero, so stencils need no bounds checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <thread>
#include <vector>

#include "dampeuler/core/errors.hpp"

namespace dampeuler::euler2d {

struct Grid2D {
  double L = 1.0;
  int n = 64;

  Grid2D() = default;
  Grid2D(double half_width, int cells) : L(half_width), n(cells) {
    if (!(half_width > 0.0)) throw DomainError("Grid2D: L must be positive");
    if (cells < 8) throw DomainError("Grid2D: need at least 8 cells per axis");
  }

  double h() const { return 2.0 * L / n; }
  double coord(int i) const { return -L + (i + 0.5) * h(); }
  std::size_t cells() const { return static_cast<std::size_t>(n) * n; }
  bool operator==(const Grid2D&) const = default;
};

class Field {
 public:
  static constexpr int kPad = 3;

  Field() = default;
  explicit Field(int n)
      : n_(n), stride_(n + 2 * kPad), data_(static_cast<std::size_t>(stride_) * stride_, 0.0) {}

  int n() const noexcept { return n_; }
  int stride() const noexcept { return stride_; }

  double& operator()(int i, int j) { return data_[offset(i, j)]; }
  double operator()(int i, int j) const { return data_[offset(i, j)]; }

  /// Pointer to cell (0, j); valid for offsets -kPad .. n-1+kPad along the row
  /// and +-kPad rows.
  double* row(int j) { return data_.data() + offset(0, j); }
  const double* row(int j) const { return data_.data() + offset(0, j); }

  void fill_interior(double v) {
    for (int j = 0; j < n_; ++j) std::fill(row(j), row(j) + n_, v);
  }

  double max_abs() const {
    double m = 0.0;
    for (int j = 0; j < n_; ++j) {
      const double* r = row(j);
      for (int i = 0; i < n_; ++i) m = std::max(m, std::abs(r[i]));
    }
    return m;
  }

  /// Discrete L2 norm with cell area h^2. Row sums are accumulated in row
  /// order, so the value does not depend on how work was partitioned.
  double l2(double h) const {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) {
      const double* r = row(j);
      double rs = 0.0;
      for (int i = 0; i < n_; ++i) rs += r[i] * r[i];
      s += rs;
    }
    return std::sqrt(s) * h;
  }

  double sum(double h) const {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) {
      const double* r = row(j);
      double rs = 0.0;
      for (int i = 0; i < n_; ++i) rs += r[i];
      s += rs;
    }
    return s * h * h;
  }

  bool all_finite() const {
    for (int j = 0; j < n_; ++j) {
      const double* r = row(j);
      for (int i = 0; i < n_; ++i) {
        if (!std::isfinite(r[i])) return false;
      }
    }
    return true;
  }

  bool operator==(const Field&) const = default;

 private:
  std::size_t offset(int i, int j) const {
    return static_cast<std::size_t>(j + kPad) * stride_ + (i + kPad);
  }

  int n_ = 0;
  int stride_ = 0;
  std::vector<double> data_;
};

/// Sample f(x1, x2) at cell centres.
template <class F>
Field sample_field(const Grid2D& g, F&& f) {
  Field out(g.n);
  for (int j = 0; j < g.n; ++j) {
    const double x2 = g.coord(j);
    for (int i = 0; i < g.n; ++i) out(i, j) = f(g.coord(i), x2);
  }
  return out;
}

namespace stencil {

// Fourth-order central first derivative along stride s.
inline double d1(const double* p, std::ptrdiff_t s, double inv12h) {
  return (p[-2 * s] - 8.0 * p[-s] + 8.0 * p[s] - p[2 * s]) * inv12h;
}

// Fourth-order central second derivative along stride s.
inline double d2(const double* p, std::ptrdiff_t s, double inv12h2) {
  return (-p[-2 * s] + 16.0 * p[-s] - 30.0 * p[0] + 16.0 * p[s] - p[2 * s]) * inv12h2;
}

// Mixed derivative as the tensor product of two first-derivative stencils.
inline double d12(const double* p, std::ptrdiff_t sx, std::ptrdiff_t sy, double inv144h2) {
  static constexpr int off[4] = {-2, -1, 1, 2};
  static constexpr double w[4] = {1.0, -8.0, 8.0, -1.0};
  double acc = 0.0;
  for (int b = 0; b < 4; ++b) {
    double inner = 0.0;
    for (int a = 0; a < 4; ++a) inner += w[a] * p[off[a] * sx + off[b] * sy];
    acc += w[b] * inner;
  }
  return acc * inv144h2;
}

// Undivided sixth difference; its Fourier symbol is -(2 sin(k h/2))^6.
inline double delta6(const double* p, std::ptrdiff_t s) {
  return p[-3 * s] - 6.0 * p[-2 * s] + 15.0 * p[-s] - 20.0 * p[0] + 15.0 * p[s] -
         6.0 * p[2 * s] + p[3 * s];
}

}  // namespace stencil

/// Runs body(j_begin, j_end) over row blocks. The partition only affects
/// scheduling: every row is computed by the same code path.
template <class Body>
void for_rows(int n, int threads, Body&& body) {
  threads = std::clamp(threads, 1, std::max(1, n));
  if (threads == 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int k = 0; k < threads; ++k) {
    const int j0 = n * k / threads;
    const int j1 = n * (k + 1) / threads;
    pool.emplace_back([&, j0, j1] { body(j0, j1); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace dampeuler::euler2d
