#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

#include "dampeuler/core/damping.hpp"
#include "dampeuler/core/numerics.hpp"

using namespace dampeuler;

TEST(Alpha, DirectFormula) {
  EXPECT_DOUBLE_EQ(alpha(DampingLaw(2.0, 1.0), 1.0), 1.0);
  EXPECT_DOUBLE_EQ(alpha(DampingLaw(3.0, 0.0), 7.0), 3.0);
  EXPECT_DOUBLE_EQ(alpha(DampingLaw(1.0, 2.0), 3.0), 0.0625);
}

TEST(DampingLaw, RejectsInvalidParameters) {
  EXPECT_THROW(DampingLaw(0.0, 1.0), DomainError);
  EXPECT_THROW(DampingLaw(-1.0, 1.0), DomainError);
  EXPECT_THROW(DampingLaw(1.0, -0.1), DomainError);
}

TEST(Xi, Branches) {
  EXPECT_NEAR(xi(DampingLaw(2.0, 1.0), 3.0), 16.0, 1e-12);
  EXPECT_NEAR(xi(DampingLaw(2.0, 0.0), 1.0), std::exp(2.0), 1e-12);
  EXPECT_NEAR(xi(DampingLaw(1.0, 2.0), 1.0), std::exp(0.5), 1e-12);
}

TEST(Xi, ExactlyOneAtZero) {
  for (double lam : {0.0, 0.3, 1.0, 1.7, 4.0}) {
    for (double mu : {0.1, 1.0, 9.0}) EXPECT_EQ(xi(DampingLaw(mu, lam), 0.0), 1.0);
  }
}

TEST(Xi, SatisfiesItsOde) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> mu_d(0.1, 3.0), lam_d(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    DampingLaw law(mu_d(rng), lam_d(rng));
    for (double t : {0.5, 1.0, 5.0, 50.0}) {
      const double h = 1e-5 * (1.0 + t);
      const double deriv = (xi(law, t + h) - xi(law, t - h)) / (2 * h);
      const double expected = alpha(law, t) * xi(law, t);
      EXPECT_NEAR(deriv / expected, 1.0, 1e-6) << law.mu() << " " << law.lambda() << " " << t;
    }
  }
}

TEST(XiInverseIntegral, ClosedForms) {
  EXPECT_NEAR(xi_inverse_integral(DampingLaw(2.0, 1.0), kInfinity), 1.0, 1e-15);
  EXPECT_NEAR(xi_inverse_integral(DampingLaw(1.0, 1.0), std::exp(1.0) - 1.0), 1.0, 1e-15);
  EXPECT_TRUE(std::isinf(xi_inverse_integral(DampingLaw(1.0, 2.0), kInfinity)));
  EXPECT_TRUE(std::isinf(xi_inverse_integral(DampingLaw(0.7, 1.0), kInfinity)));
  EXPECT_TRUE(std::isinf(xi_inverse_integral(DampingLaw(1.0, 1.0), kInfinity)));
  EXPECT_NEAR(xi_inverse_integral(DampingLaw(4.0, 0.0), kInfinity), 0.25, 1e-15);
}

TEST(XiInverseIntegral, CriticalPowerLimit) {
  for (double mu : {1.01, 1.5, 2.0, 3.7, 10.0}) {
    EXPECT_NEAR(xi_inverse_integral(DampingLaw(mu, 1.0), kInfinity) * (mu - 1.0), 1.0, 1e-10);
  }
}

// Independent route for 0 < lambda < 1: the substitution v = (1+s)^(1-lambda)
// turns I(t) into a difference of upper incomplete gamma functions.
static double incomplete_gamma_oracle(const DampingLaw& law, double t) {
  const double lam = law.lambda();
  const double k = law.mu() / (1 - lam);
  const double p = lam / (1 - lam);
  const double vt = std::isinf(t) ? kInfinity : std::pow(1 + t, 1 - lam);
  const double upper_t = std::isinf(vt) ? 0.0 : boost::math::tgamma(p + 1, k * vt);
  return std::exp(k) / (1 - lam) * std::pow(k, -(p + 1)) *
         (boost::math::tgamma(p + 1, k) - upper_t);
}

TEST(XiInverseIntegral, SublinearPowerMatchesIncompleteGamma) {
  for (double lam : {0.2, 0.5, 0.9}) {
    for (double mu : {0.5, 1.0, 3.0}) {
      DampingLaw law(mu, lam);
      for (double t : {0.5, 3.0, 40.0, kInfinity}) {
        const double expect = incomplete_gamma_oracle(law, t);
        EXPECT_NEAR(xi_inverse_integral(law, t) / expect, 1.0, 1e-9)
            << "lam=" << lam << " mu=" << mu << " t=" << t;
      }
    }
  }
  EXPECT_NEAR(xi_inverse_integral(DampingLaw(1.0, 0.5), kInfinity), 1.5, 1e-10);
}

TEST(XiInverseIntegral, SuperlinearPowerMatchesDirectQuadrature) {
  DampingLaw law(1.0, 2.0);
  // I(t) = int_0^t exp(-(1 - 1/(1+s))) ds, evaluated on a fine trapezoid grid.
  const double t = 3.0;
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = t * i / n;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    sum += w * std::exp(-(1.0 - 1.0 / (1.0 + s)));
  }
  sum *= t / n;
  EXPECT_NEAR(xi_inverse_integral(law, t), sum, 1e-9);
}

TEST(XiInverseIntegral, MonotoneAndConcave) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mu_d(0.2, 3.0), lam_d(0.0, 2.5);
  for (int trial = 0; trial < 10; ++trial) {
    DampingLaw law(mu_d(rng), lam_d(rng));
    double prev = 0.0, prev_inc = kInfinity;
    for (int i = 1; i <= 40; ++i) {
      const double v = xi_inverse_integral(law, 0.5 * i);
      const double inc = v - prev;
      EXPECT_GE(inc, 0.0);
      EXPECT_LE(inc, prev_inc * (1 + 1e-9) + 1e-14);
      EXPECT_GE(xi(law, 0.5 * i), xi(law, 0.5 * (i - 1)));
      prev = v;
      prev_inc = inc;
    }
  }
}

TEST(XiInverseIntegral, RejectsNegativeTime) {
  EXPECT_THROW(xi_inverse_integral(DampingLaw(1, 1), -1.0), DomainError);
}

TEST(ClassifyCase, ReferenceCells) {
  EXPECT_EQ(classify_case(DampingLaw(0.8, 1.0), 2).kind, Case::Three);
  EXPECT_EQ(classify_case(DampingLaw(5.0, 0.5), 3).kind, Case::One);
  EXPECT_EQ(classify_case(DampingLaw(1.0, 1.0), 3).kind, Case::Two);
  EXPECT_EQ(classify_case(DampingLaw(1.0, 1.0), 2).kind, Case::Three);
  EXPECT_EQ(classify_case(DampingLaw(1.0 + 1e-15, 1.0), 2).kind, Case::Two);
  EXPECT_EQ(classify_case(DampingLaw(0.1, 1.0 + 1e-12), 2).kind, Case::Four);
  EXPECT_EQ(classify_case(DampingLaw(0.1, 1.0 - 1e-12), 2).kind, Case::One);
  EXPECT_THROW(classify_case(DampingLaw(1, 1), 4), DomainError);
}

TEST(ClassifyCase, IsAPartition) {
  for (int d : {2, 3}) {
    for (double lam : {0.0, 0.5, 0.999, 1.0, 1.001, 3.0}) {
      for (double mu : {0.01, 0.5, 1.0, 1.5, 3.0}) {
        const auto label = classify_case(DampingLaw(mu, lam), d);
        int hits = 0;
        hits += lam < 1.0;
        hits += lam == 1.0 && mu > 3.0 - d;
        hits += lam == 1.0 && mu <= 3.0 - d && d == 2;
        hits += lam > 1.0;
        EXPECT_EQ(hits, 1);
        if (d == 3) {
          EXPECT_NE(label.kind, Case::Three);
        }
      }
    }
  }
}

TEST(GasLaw, NormalizesSoundSpeedAndInvertsTheta) {
  for (double gamma : {1.4, 2.0, 3.0}) {
    GasLaw gas(gamma, 1.7);
    EXPECT_NEAR(gas.A() * gamma * std::pow(1.7, gamma - 1), 1.0, 1e-14);
    for (double rho : {0.5, 1.7, 3.0}) {
      const double th = gas.theta_of_rho(rho);
      EXPECT_NEAR(gas.rho_of_theta(th), rho, 1e-12 * rho);
      EXPECT_NEAR(gas.theta_of_rho(gas.rho_of_theta(th)), th, 1e-12);
    }
  }
  GasLaw g2(2.0, 1.0);
  EXPECT_THROW(g2.rho_of_theta(-1.5), DomainError);
}

TEST(Numerics, QuadratureAndRoot) {
  auto r = numerics::integrate([](double x) { return std::exp(-x) * std::sin(3 * x); }, 0, 20);
  const double exact = (3.0 - std::exp(-20.0) * (std::sin(60.0) + 3 * std::cos(60.0))) / 10.0;
  EXPECT_NEAR(r.value, exact, 1e-12);
  EXPECT_NEAR(numerics::find_root([](double x) { return x * x - 2; }, 0, 2), std::sqrt(2.0), 1e-10);
  EXPECT_THROW(numerics::find_root([](double x) { return x * x + 1; }, 0, 2), DomainError);
  try {
    numerics::integrate([](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3)); }, 0, 1,
                        {1e-15, 0.0}, 50);
    FAIL() << "expected a convergence failure";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.partial_estimate(), 0.0);
  }
}
