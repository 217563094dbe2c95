#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "dampeuler/core/errors.hpp"

namespace dampeuler::burgers {

/// Analytic, compactly supported initial profiles with closed-form slope.
enum class ProfileKind {
  Bump,      ///< exp(-1/(1-y^2)), y = x/M: C-infinity
  Poly4,     ///< (1-y^2)^4: C^3
  SkewBump,  ///< y exp(-1/(1-y^2)): odd, one compression and one rarefaction
};

inline ProfileKind profile_kind_from_string(const std::string& s) {
  if (s == "bump") return ProfileKind::Bump;
  if (s == "poly4") return ProfileKind::Poly4;
  if (s == "skew-bump") return ProfileKind::SkewBump;
  throw UsageError("profile", "unknown profile id '" + s + "'");
}

inline std::string to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::Bump: return "bump";
    case ProfileKind::Poly4: return "poly4";
    case ProfileKind::SkewBump: return "skew-bump";
  }
  return "?";
}

/// v0(x) = scale * shape(x / support), zero for |x| >= support.
class ProfileFamily {
 public:
  ProfileFamily(ProfileKind kind, double support, double scale)
      : kind_(kind), support_(support), scale_(scale) {
    if (!(support > 0.0)) throw DomainError("ProfileFamily: support must be positive");
    if (scale == 0.0) throw DomainError("ProfileFamily: v0 must not vanish identically");
  }

  /// Scale chosen so that min v0' = -1 exactly (up to the minimizer's 1e-15
  /// relative accuracy).
  static ProfileFamily unit_slope(ProfileKind kind, double support) {
    ProfileFamily shape(kind, support, 1.0);
    return ProfileFamily(kind, support, -1.0 / shape.exact_min_slope());
  }

  ProfileKind kind() const noexcept { return kind_; }
  double support() const noexcept { return support_; }
  double scale() const noexcept { return scale_; }

  double value(double x) const {
    const double y = x / support_;
    if (std::abs(y) >= 1.0) return 0.0;
    const double q = 1.0 - y * y;
    switch (kind_) {
      case ProfileKind::Bump: return scale_ * std::exp(-1.0 / q);
      case ProfileKind::Poly4: return scale_ * q * q * q * q;
      case ProfileKind::SkewBump: return scale_ * y * std::exp(-1.0 / q);
    }
    return 0.0;
  }

  double slope(double x) const {
    const double y = x / support_;
    if (std::abs(y) >= 1.0) return 0.0;
    const double q = 1.0 - y * y;
    double dy = 0.0;
    switch (kind_) {
      case ProfileKind::Bump: dy = std::exp(-1.0 / q) * (-2.0 * y / (q * q)); break;
      case ProfileKind::Poly4: dy = 4.0 * q * q * q * (-2.0 * y); break;
      case ProfileKind::SkewBump:
        dy = std::exp(-1.0 / q) * (1.0 - 2.0 * y * y / (q * q));
        break;
    }
    return scale_ * dy / support_;
  }

  /// min over x of v0'(x), located by a dense scan refined with Brent.
  double exact_min_slope() const {
    const int n = 4001;
    double best_x = 0.0, best = slope(0.0);
    for (int i = 0; i < n; ++i) {
      const double x = support_ * (-1.0 + 2.0 * i / (n - 1));
      const double s = slope(x);
      if (s < best) best = s, best_x = x;
    }
    const double dx = 2.0 * support_ / (n - 1);
    auto r = boost::math::tools::brent_find_minima([this](double x) { return slope(x); },
                                                   best_x - dx, best_x + dx, 52);
    return std::min(best, r.second);
  }

  double max_abs_value() const {
    const int n = 4001;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      best = std::max(best, std::abs(value(support_ * (-1.0 + 2.0 * i / (n - 1)))));
    }
    return best;
  }

 private:
  ProfileKind kind_;
  double support_;
  double scale_;
};

struct ProfileSample {
  double x;
  double v0;
  double v0_prime;
};

/// Sampled initial profile; `family` keeps the analytic form for solvers
/// that need values between samples.
struct InitialProfile {
  ProfileFamily family;
  std::vector<ProfileSample> samples;

  double support() const { return family.support(); }

  /// m = min over samples of v0'. Negative for any nonzero compact profile.
  double min_slope() const {
    double m = 0.0;
    for (const auto& s : samples) m = std::min(m, s.v0_prime);
    return m;
  }

  double max_abs_slope() const {
    double m = 0.0;
    for (const auto& s : samples) m = std::max(m, std::abs(s.v0_prime));
    return m;
  }
};

inline InitialProfile sample_profile(const ProfileFamily& family, int n = 20001) {
  if (n < 3) throw DomainError("sample_profile: need at least 3 samples");
  InitialProfile p{family, {}};
  p.samples.reserve(n);
  const double M = family.support();
  for (int i = 0; i < n; ++i) {
    const double x = M * (-1.0 + 2.0 * i / (n - 1));
    p.samples.push_back({x, family.value(x), family.slope(x)});
  }
  if (!(p.min_slope() < 0.0)) {
    throw DomainError("InitialProfile: v0' must attain a negative minimum");
  }
  return p;
}

}  // namespace dampeuler::burgers
