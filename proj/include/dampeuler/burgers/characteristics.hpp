#pragma once

// Exact solution of v_t + v v_x = -alpha(t) v by characteristics.
//
// Along dx/dt = v the equation reads d(Xi v)/dt = 0, so v = eps v0(x0) / Xi(t)
// and x = x0 + eps v0(x0) I(t) with I(t) = int_0^t ds / Xi. The map
// x0 -> x has Jacobian 1 + eps v0'(x0) I(t), which first vanishes where
// eps |m| I(T) = 1, m = min v0'.

#include <cmath>
#include <vector>

#include "dampeuler/burgers/profile.hpp"
#include "dampeuler/core/damping.hpp"
#include "dampeuler/core/errors.hpp"
#include "dampeuler/core/numerics.hpp"

namespace dampeuler::burgers {

struct Lifespan {
  bool finite = false;
  /// ln(1 + T); +inf when the solution is global.
  double log1p_time = kInfinity;

  /// T itself; overflows to +inf for astronomically late folds even when
  /// `finite` is true.
  double time() const { return finite ? std::expm1(log1p_time) : kInfinity; }
};

/// First fold time of the characteristic map.
inline Lifespan lifespan(const InitialProfile& profile, double eps, const DampingLaw& law) {
  if (!(eps > 0.0)) throw DomainError("lifespan: eps must be positive");
  const double m = profile.min_slope();
  const double target = 1.0 / (eps * std::abs(m));
  const double total = xi_inverse_integral(law, kInfinity);
  if (total <= target) return {};
  // I is increasing in u = ln(1+t); bracket by doubling.
  auto g = [&](double u) { return xi_inverse_integral_log(law, u) - target; };
  double hi = 1.0;
  while (g(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e6) throw ConvergenceError("lifespan: failed to bracket fold time", hi);
  }
  const double lo = hi > 1.0 ? 0.5 * hi : 0.0;
  const double u = numerics::find_root(g, lo, hi, 1e-12);
  return {true, u};
}

struct Characteristic {
  double x0;
  double position;
  double value;
};

struct CharacteristicFan {
  double t = 0.0;
  std::vector<Characteristic> rays;
};

inline CharacteristicFan evolve_fan(const InitialProfile& profile, double eps,
                                    const DampingLaw& law, double t) {
  const auto life = lifespan(profile, eps, law);
  if (life.finite && std::log1p(t) >= life.log1p_time) {
    throw FoldError("evolve_fan: characteristics have crossed", life.time());
  }
  const double I = xi_inverse_integral(law, t);
  const double damp = 1.0 / xi(law, t);
  CharacteristicFan fan{t, {}};
  fan.rays.reserve(profile.samples.size());
  for (const auto& s : profile.samples) {
    const double w = eps * s.v0;
    fan.rays.push_back({s.x, s.x + w * I, w * damp});
  }
  return fan;
}

/// Exact v(t, x) before the fold: solves x0 + eps v0(x0) I(t) = x for x0.
class ExactSolution {
 public:
  ExactSolution(const ProfileFamily& family, double eps, const DampingLaw& law, double t)
      : family_(family), eps_(eps), I_(xi_inverse_integral(law, t)), xi_(xi(law, t)) {
    reach_ = eps_ * family_.max_abs_value() * I_ * 1.01 + 1e-12;
  }

  double operator()(double x) const {
    const double M = family_.support();
    if (x <= -M - reach_ || x >= M + reach_) return 0.0;
    auto g = [&](double x0) { return x0 + eps_ * family_.value(x0) * I_ - x; };
    double lo = x - reach_, hi = x + reach_;
    const double x0 = numerics::find_root(g, lo, hi, 1e-14, 1e-15 * M);
    return eps_ * family_.value(x0) / xi_;
  }

 private:
  ProfileFamily family_;
  double eps_;
  double I_;
  double xi_;
  double reach_;
};

}  // namespace dampeuler::burgers
