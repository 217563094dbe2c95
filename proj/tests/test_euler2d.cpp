#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "dampeuler/diagnostics/data_families.hpp"
#include "dampeuler/euler2d/grid.hpp"
#include "dampeuler/euler2d/residuals.hpp"
#include "dampeuler/euler2d/snapshot.hpp"
#include "dampeuler/euler2d/solver.hpp"
#include "dampeuler/euler2d/state.hpp"

using namespace dampeuler;
using namespace dampeuler::euler2d;

namespace {

const DampingLaw kCase1(1.0, 0.5);
const GasLaw kGas2(2.0, 1.0);

template <class T, class U1, class U2>
FlowState2D make_state(const Grid2D& g, double t, T theta, U1 u1, U2 u2) {
  FlowState2D s(g, t);
  s.theta = sample_field(g, theta);
  s.u1 = sample_field(g, u1);
  s.u2 = sample_field(g, u2);
  return s;
}

FlowState2D rotational_state(const Grid2D& g, double eps, double M) {
  const diagnostics::FamilyParams fp{diagnostics::DataFamily::Rotational, M, 1.0, 1.0, 0.0};
  const auto d = diagnostics::make_initial_data(fp, kGas2, g);
  return init_state(kGas2, eps, d.rho0, d.u10, d.u20, g);
}

}  // namespace

// ------------------------------------------------------------------ grid

TEST(Grid2D, SpacingAndCellCentres) {
  const Grid2D g(2.0, 16);
  EXPECT_DOUBLE_EQ(g.h(), 0.25);
  EXPECT_DOUBLE_EQ(g.coord(0), -1.875);
  EXPECT_DOUBLE_EQ(g.coord(15), 1.875);
  EXPECT_DOUBLE_EQ(g.coord(7) + g.coord(8), 0.0);
}

TEST(Grid2D, RejectsDegenerateGrids) {
  EXPECT_THROW(Grid2D(0.0, 16), DomainError);
  EXPECT_THROW(Grid2D(1.0, 4), DomainError);
}

TEST(Stencil, ExactOnLowDegreePolynomials) {
  const Grid2D g(2.0, 32);
  const Field f = sample_field(g, [](double x, double y) {
    return x * x * x * x - 2.0 * x * x * y + y * y * y + 0.5 * x * y * y;
  });
  const double h = g.h();
  const std::ptrdiff_t sy = f.stride();
  for (int j = 3; j < 29; ++j) {
    for (int i = 3; i < 29; ++i) {
      const double x = g.coord(i), y = g.coord(j);
      const double* p = f.row(j) + i;
      EXPECT_NEAR(stencil::d1(p, 1, 1.0 / (12 * h)), 4 * x * x * x - 4 * x * y + 0.5 * y * y, 1e-11);
      EXPECT_NEAR(stencil::d1(p, sy, 1.0 / (12 * h)), -2 * x * x + 3 * y * y + x * y, 1e-11);
      EXPECT_NEAR(stencil::d2(p, 1, 1.0 / (12 * h * h)), 12 * x * x - 4 * y, 1e-10);
      EXPECT_NEAR(stencil::d2(p, sy, 1.0 / (12 * h * h)), 6 * y + x, 1e-10);
      EXPECT_NEAR(stencil::d12(p, 1, sy, 1.0 / (144 * h * h)), -4 * x + y, 1e-10);
      EXPECT_NEAR(stencil::delta6(p, 1), 0.0, 1e-10);
    }
  }
}

// ----------------------------------------------------------------- state

TEST(InitState, ZeroDataGivesZeroState) {
  const Grid2D g(2.0, 16);
  const Field z(16);
  const auto s = init_state(kGas2, 0.1, z, z, z, g);
  EXPECT_EQ(s.theta.max_abs(), 0.0);
  EXPECT_EQ(s.u1.max_abs(), 0.0);
  EXPECT_EQ(s.u2.max_abs(), 0.0);
  EXPECT_EQ(s.t, 0.0);
}

TEST(InitState, GammaTwoIsLinearInDensity) {
  const Grid2D g(2.0, 16);
  const GasLaw gas(2.0, 1.5);
  const Field rho0 = sample_field(g, [](double x, double y) { return std::exp(-x * x - y * y); });
  const Field u = sample_field(g, [](double x, double) { return x; });
  const auto s = init_state(gas, 0.2, rho0, u, u, g);
  for (int j = 0; j < 16; ++j) {
    for (int i = 0; i < 16; ++i) {
      EXPECT_NEAR(s.theta(i, j), 0.2 * rho0(i, j) / 1.5, 1e-15);
      EXPECT_DOUBLE_EQ(s.u1(i, j), 0.2 * u(i, j));
    }
  }
}

TEST(InitState, LeadingOrderDeviationIsQuadraticInEps) {
  const Grid2D g(2.0, 16);
  const GasLaw gas(1.4, 1.0);
  const Field rho0 = sample_field(g, [](double x, double y) { return std::exp(-x * x - y * y); });
  const Field z(16);
  std::vector<double> dev;
  for (double eps : {1e-1, 5e-2, 2.5e-2, 1.25e-2}) {
    const auto s = init_state(gas, eps, rho0, z, z, g);
    double m = 0.0;
    for (int j = 0; j < 16; ++j) {
      for (int i = 0; i < 16; ++i) m = std::max(m, std::abs(s.theta(i, j) - eps * rho0(i, j)));
    }
    dev.push_back(m);
  }
  for (std::size_t k = 1; k < dev.size(); ++k) {
    EXPECT_NEAR(std::log2(dev[k - 1] / dev[k]), 2.0, 0.05);
  }
}

TEST(InitState, RejectsNonpositiveDensity) {
  const Grid2D g(2.0, 16);
  Field rho0(16);
  rho0(3, 3) = -20.0;
  EXPECT_THROW(init_state(kGas2, 0.1, rho0, Field(16), Field(16), g), DomainError);
}

TEST(InitState, DensityInversionRoundTrips) {
  const GasLaw gas(1.4, 1.3);
  for (double th : {-0.5, -0.1, 0.0, 0.3, 2.0}) {
    EXPECT_NEAR(gas.theta_of_rho(gas.rho_of_theta(th)), th, 1e-12);
  }
}

// ------------------------------------------------------------------- rhs

TEST(Rhs, ZeroStateHasZeroTendency) {
  const Grid2D g(3.0, 32);
  const SolverParams p{kCase1, kGas2};
  const auto k = rhs(FlowState2D(g, 0.0), p);
  EXPECT_EQ(k.theta.max_abs() + k.u1.max_abs() + k.u2.max_abs(), 0.0);
}

TEST(Rhs, PlateauInteriorIsStationary) {
  const Grid2D g(3.0, 48);
  const SolverParams p{kCase1, kGas2};
  FlowState2D s(g, 0.0);
  s.theta.fill_interior(0.4);
  const auto k = rhs(s, p);
  for (int j = 6; j < 42; ++j) {
    for (int i = 6; i < 42; ++i) {
      EXPECT_NEAR(k.theta(i, j), 0.0, 1e-14);
      EXPECT_NEAR(k.u1(i, j), 0.0, 1e-14);
      EXPECT_NEAR(k.u2(i, j), 0.0, 1e-14);
    }
  }
}

TEST(Rhs, MatchesSymbolicEvaluationOnPolynomialState) {
  const Grid2D g(2.0, 32);
  const GasLaw gas(1.4, 1.0);
  const SolverParams p{kCase1, gas};
  const double t = 0.7;
  auto th = [](double x, double y) { return 0.1 + 0.05 * x * x - 0.02 * x * y + 0.01 * y * y * y; };
  auto v1 = [](double x, double y) { return 0.1 * y - 0.03 * x * x; };
  auto v2 = [](double x, double y) { return -0.1 * x + 0.02 * x * y * y; };
  const auto s = make_state(g, t, th, v1, v2);
  const auto k = rhs(s, p);
  const double a = alpha(kCase1, t), g1 = 0.4;
  for (int j = 3; j < 29; ++j) {
    for (int i = 3; i < 29; ++i) {
      const double x = g.coord(i), y = g.coord(j);
      const double thx = 0.1 * x - 0.02 * y, thy = -0.02 * x + 0.03 * y * y;
      const double ax = -0.06 * x, ay = 0.1, bx = -0.1 + 0.02 * y * y, by = 0.04 * x * y;
      const double w1 = v1(x, y), w2 = v2(x, y);
      EXPECT_NEAR(k.theta(i, j), -(w1 * thx + w2 * thy + (1 + g1 * th(x, y)) * (ax + by)), 1e-12);
      EXPECT_NEAR(k.u1(i, j), -(a * w1 + w1 * ax + w2 * ay + thx), 1e-12);
      EXPECT_NEAR(k.u2(i, j), -(a * w2 + w1 * bx + w2 * by + thy), 1e-12);
    }
  }
}

TEST(Rhs, ManufacturedSmoothStateConvergesAtFourthOrder) {
  const GasLaw gas(1.4, 1.0);
  auto th = [](double x, double y) { return 0.2 * std::exp(-x * x - y * y); };
  auto v1 = [](double x, double y) { return 0.3 * y * std::exp(-x * x - y * y); };
  auto v2 = [](double x, double y) {
    return -0.2 * x * std::exp(-(x - 0.3) * (x - 0.3) - y * y);
  };
  auto error = [&](int n) {
    const Grid2D g(6.0, n);
    const SolverParams p{kCase1, gas};
    const double t = 1.5, a = alpha(kCase1, t), g1 = 0.4;
    const auto k = rhs(make_state(g, t, th, v1, v2), p);
    double m = 0.0;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const double x = g.coord(i), y = g.coord(j);
        const double e = std::exp(-x * x - y * y);
        const double f = std::exp(-(x - 0.3) * (x - 0.3) - y * y);
        const double thx = -2 * x * th(x, y), thy = -2 * y * th(x, y);
        const double ax = -2 * x * 0.3 * y * e, ay = 0.3 * e * (1 - 2 * y * y);
        const double bx = -0.2 * f * (1 - 2 * x * (x - 0.3)), by = 0.2 * x * 2 * y * f;
        const double w1 = v1(x, y), w2 = v2(x, y);
        const double d0 = -(w1 * thx + w2 * thy + (1 + g1 * th(x, y)) * (ax + by));
        const double d1 = -(a * w1 + w1 * ax + w2 * ay + thx);
        const double d2 = -(a * w2 + w1 * bx + w2 * by + thy);
        m = std::max({m, std::abs(k.theta(i, j) - d0), std::abs(k.u1(i, j) - d1),
                      std::abs(k.u2(i, j) - d2)});
      }
    }
    return m;
  };
  const double e1 = error(48), e2 = error(96), e3 = error(192);
  EXPECT_GT(std::log2(e1 / e2), 3.6);
  EXPECT_GT(std::log2(e2 / e3), 3.6);
}

// ------------------------------------------------------------------ step

TEST(Step, ZeroStateStaysZero) {
  const Grid2D g(3.0, 32);
  const SolverParams p{kCase1, kGas2};
  FlowState2D s(g, 0.0);
  for (int k = 0; k < 5; ++k) s = step(s, p, stable_dt(s, p));
  EXPECT_EQ(s.theta.max_abs() + s.u1.max_abs() + s.u2.max_abs(), 0.0);
  EXPECT_NEAR(s.t, 5 * 0.4 * g.h(), 1e-14);
}

TEST(Step, RejectsCflViolationAndBadDt) {
  const Grid2D g(3.0, 32);
  const SolverParams p{kCase1, kGas2};
  const FlowState2D s(g, 0.0);
  EXPECT_THROW(step(s, p, 1.01 * stable_dt(s, p)), DomainError);
  EXPECT_THROW(step(s, p, 0.0), DomainError);
  EXPECT_NO_THROW(step(s, p, stable_dt(s, p)));
}

TEST(Step, WaveSpeedIncludesSoundSpeed) {
  const Grid2D g(2.0, 16);
  FlowState2D s(g, 0.0);
  s.theta(4, 4) = 3.0;   // c^2 = 4
  s.u1(4, 4) = 0.6, s.u2(4, 4) = 0.8;
  EXPECT_DOUBLE_EQ(max_wave_speed(s, kGas2), 3.0);
}

TEST(Step, SelfConvergesOnSmoothRun) {
  // Richardson triple 128 -> 256 -> 512 on a short Case-1 run; differences
  // are compared on the coarse grid by 2x2 / 4x4 block averages.
  auto solve = [](int n) {
    const Grid2D g(5.0, n);
    SolverParams p{kCase1, kGas2};
    p.support_radius = 2.0;
    RunOptions o;
    o.t_end = 0.5;
    o.fixed_dt = 0.25 * 10.0 / 128 * 128.0 / n;
    return run(rotational_state(g, 0.1, 2.0), p, o).final_state;
  };
  const auto a = solve(128), b = solve(256), c = solve(512);
  auto coarsen = [](const Field& f, int factor) {
    const int n = f.n() / factor;
    Field out(n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int q = 0; q < factor; ++q) {
          for (int r = 0; r < factor; ++r) s += f(factor * i + r, factor * j + q);
        }
        out(i, j) = s / (factor * factor);
      }
    }
    return out;
  };
  auto diff = [](const Field& x, const Field& y) {
    double m = 0.0;
    for (int j = 0; j < x.n(); ++j) {
      for (int i = 0; i < x.n(); ++i) m = std::max(m, std::abs(x(i, j) - y(i, j)));
    }
    return m;
  };
  // Block averages of cell-centred samples differ from the coarse samples by
  // O(h^2), so the observed order is capped near 2.
  const double d1 = diff(coarsen(b.theta, 2), a.theta);
  const double d2 = diff(coarsen(c.theta, 4), coarsen(b.theta, 2));
  EXPECT_GT(std::log2(d1 / d2), 1.8);
}

TEST(Run, ThreadCountDoesNotChangeResults) {
  const Grid2D g(5.0, 64);
  SolverParams p{kCase1, kGas2};
  p.support_radius = 2.0;
  RunOptions o;
  o.t_end = 0.5;
  const auto s0 = rotational_state(g, 0.1, 2.0);
  const auto a = run(s0, p, o).final_state;
  p.threads = 3;
  const auto b = run(s0, p, o).final_state;
  EXPECT_TRUE(a == b);
}

TEST(Run, LandsExactlyOnEndTime) {
  const Grid2D g(3.0, 32);
  SolverParams p{kCase1, kGas2};
  RunOptions o;
  o.t_end = 0.37;
  int calls = 0;
  const auto r = run(FlowState2D(g, 0.0), p, o, [&](const StateHistory&) { ++calls; });
  EXPECT_EQ(r.final_state.t, 0.37);
  EXPECT_EQ(calls, r.steps + 1);
  EXPECT_FALSE(r.blowup.has_value());
  EXPECT_THROW(run(FlowState2D(g, 1.0), p, o), DomainError);
}

TEST(History, KeepsThreeMostRecentLevels) {
  const Grid2D g(2.0, 8);
  StateHistory h;
  for (int k = 0; k < 5; ++k) h.push(FlowState2D(g, k));
  ASSERT_EQ(h.size(), 3u);
  EXPECT_EQ(h[0].t, 2.0);
  EXPECT_EQ(h.latest().t, 4.0);
}

// ------------------------------------------------------------- vorticity

TEST(Vorticity, GradientFieldIsCurlFreeToFourthOrder) {
  auto err = [](int n) {
    const Grid2D g(5.0, n);
    auto phi_x = [](double x, double y) { return (1 - 2 * x * (1 + x)) * std::exp(-x * x - y * y); };
    auto phi_y = [](double x, double y) { return -2 * y * (1 + x) * std::exp(-x * x - y * y); };
    return vorticity(make_state(g, 0.0, [](double, double) { return 0.0; }, phi_x, phi_y)).max_abs();
  };
  const double e1 = err(48), e2 = err(96);
  EXPECT_LT(e2, 1e-3);
  EXPECT_GT(std::log2(e1 / e2), 3.6);
}

TEST(Vorticity, RotatingBumpMatchesSymbolicCurl) {
  auto err = [](int n) {
    const Grid2D g(5.0, n);
    auto b = [](double x, double y) { return std::exp(-x * x - y * y); };
    const auto w = vorticity(make_state(
        g, 0.0, [](double, double) { return 0.0; },
        [&](double x, double y) { return -y * b(x, y); },
        [&](double x, double y) { return x * b(x, y); }));
    double m = 0.0;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const double x = g.coord(i), y = g.coord(j), r2 = x * x + y * y;
        m = std::max(m, std::abs(w(i, j) - (2.0 - 2.0 * r2) * b(x, y)));
      }
    }
    return m;
  };
  EXPECT_GT(std::log2(err(48) / err(96)), 3.6);
}

TEST(Vorticity, RigidRotationHasVorticityTwo) {
  const Grid2D g(2.0, 32);
  const auto s = make_state(
      g, 0.0, [](double, double) { return 0.0; }, [](double, double y) { return -y; },
      [](double x, double) { return x; });
  const auto w = vorticity(s);
  for (int j = 3; j < 29; ++j) {
    for (int i = 3; i < 29; ++i) EXPECT_NEAR(w(i, j), 2.0, 1e-12);
  }
}

// -------------------------------------------------------------- residuals

TEST(Residuals, NeedThreeLevels) {
  const Grid2D g(2.0, 16);
  StateHistory h;
  h.push(FlowState2D(g, 0.0));
  h.push(FlowState2D(g, 0.1));
  EXPECT_THROW(vorticity_residual(h, kCase1), DomainError);
  EXPECT_THROW(wave_residual(h, kCase1, kGas2), DomainError);
}

TEST(Residuals, ZeroFlowHasZeroResidual) {
  const Grid2D g(2.0, 16);
  StateHistory h;
  for (double t : {0.0, 0.1, 0.25}) h.push(FlowState2D(g, t));
  EXPECT_EQ(vorticity_residual(h, kCase1).max_abs(), 0.0);
  for (std::uint32_t mask : {0u, 1u, 0xffu}) {
    EXPECT_EQ(wave_residual(h, kCase1, kGas2, mask).max_abs(), 0.0);
  }
}

TEST(Residuals, TimeStencilIsExactOnQuadraticsWithUnequalSteps) {
  const Grid2D g(2.0, 8);
  StateHistory h;
  auto q = [](double t) { return 1.0 + 2.0 * t - 3.0 * t * t; };
  for (double t : {0.3, 0.45, 0.8}) {
    FlowState2D s(g, t);
    s.theta.fill_interior(q(t));
    h.push(s);
  }
  const auto ts = TimeStencil::from_history(h);
  auto th = [](const FlowState2D& x) -> const Field& { return x.theta; };
  EXPECT_NEAR(ts.apply(h, ts.first, th)(2, 2), 2.0 - 6.0 * 0.45, 1e-12);
  EXPECT_NEAR(ts.apply(h, ts.second, th)(2, 2), -6.0, 1e-10);
}

TEST(Residuals, TermNamesAreDistinct) {
  std::set<std::string> names;
  for (int k = 0; k < kQTermCount; ++k) names.insert(to_string(static_cast<QTerm>(k)));
  EXPECT_EQ(names.size(), static_cast<std::size_t>(kQTermCount));
}

// -------------------------------------------------------- blowup detector

TEST(DetectBlowup, ZeroStateNeverReports) {
  const Grid2D g(2.0, 16);
  EXPECT_FALSE(detect_blowup(FlowState2D(g, 0.0), kGas2, 0.0, 1e3).has_value());
  EXPECT_FALSE(detect_blowup(FlowState2D(g, 0.0), kGas2, 1.0, 1e3).has_value());
}

TEST(DetectBlowup, ReportsNonFiniteAndPositivityLoss) {
  const Grid2D g(2.0, 16);
  FlowState2D s(g, 1.5);
  s.u2(5, 6) = std::nan("");
  auto r = detect_blowup(s, kGas2, 1.0, 1e3);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->reason, BlowupReason::NonFinite);
  EXPECT_EQ(r->t, 1.5);
  EXPECT_DOUBLE_EQ(r->x1, g.coord(5));
  EXPECT_DOUBLE_EQ(r->x2, g.coord(6));

  FlowState2D q(g, 0.0);
  q.theta(2, 3) = -1.0;  // 1 + (gamma-1) theta = 0
  r = detect_blowup(q, kGas2, 1.0, 1e3);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->reason, BlowupReason::Positivity);
}

TEST(DetectBlowup, GradientThresholdRelativeToInitial) {
  const Grid2D g(4.0, 64);
  auto s = make_state(
      g, 0.0, [](double x, double y) { return 0.01 * std::exp(-x * x - y * y); },
      [](double, double) { return 0.0; }, [](double, double) { return 0.0; });
  const double g0 = max_gradient(s).value;
  EXPECT_FALSE(detect_blowup(s, kGas2, g0, 1.0));
  FlowState2D steep = s;
  for (int j = 0; j < 64; ++j) {
    for (int i = 0; i < 64; ++i) steep.theta(i, j) *= 150.0;
  }
  auto r = detect_blowup(steep, kGas2, g0, 100.0);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->reason, BlowupReason::Gradient);
  EXPECT_NEAR(r->ratio, 150.0, 1e-9);
  EXPECT_FALSE(detect_blowup(steep, kGas2, g0, 1e3));
}

// --------------------------------------------------------------- snapshot

TEST(Snapshot, RoundTripsBitExactly) {
  const Grid2D g(3.5, 16);
  auto s = make_state(
      g, 2.25, [](double x, double y) { return std::sin(x) * y; },
      [](double x, double) { return -x / 3.0; }, [](double, double y) { return 1e-300 * y; });
  std::stringstream buf;
  write_snapshot(buf, s);
  EXPECT_EQ(buf.str().size(), 4u + 4u + 16u + 3u * 16u * 16u * 8u);
  const auto back = read_snapshot(buf);
  EXPECT_TRUE(back == s);
}

TEST(Snapshot, HeaderLayoutIsLittleEndian) {
  const Grid2D g(1.0, 260);
  std::stringstream buf;
  write_snapshot(buf, FlowState2D(g, 0.5));
  const std::string b = buf.str();
  EXPECT_EQ(b.substr(0, 4), "DEL1");
  EXPECT_EQ(static_cast<unsigned char>(b[4]), 4u);  // 260 = 0x0104
  EXPECT_EQ(static_cast<unsigned char>(b[5]), 1u);
  EXPECT_EQ(static_cast<unsigned char>(b[6]), 0u);
  // 1.0 = 0x3FF0000000000000
  EXPECT_EQ(static_cast<unsigned char>(b[8 + 7]), 0x3fu);
  EXPECT_EQ(static_cast<unsigned char>(b[8 + 6]), 0xf0u);
  EXPECT_EQ(static_cast<unsigned char>(b[8]), 0u);
}

TEST(Snapshot, RejectsBadMagicAndTruncation) {
  std::stringstream bad("DEL2xxxxxxxxxxxxxxxxxxxxxxxx");
  EXPECT_THROW(read_snapshot(bad), SnapshotError);
  std::stringstream buf;
  write_snapshot(buf, FlowState2D(Grid2D(1.0, 8), 0.0));
  std::string s = buf.str();
  s.resize(s.size() - 3);
  std::stringstream cut(s);
  EXPECT_THROW(read_snapshot(cut), SnapshotError);
  EXPECT_THROW(read_snapshot_file("/nonexistent/dir/x.del"), SnapshotError);
}

// ------------------------------------------------------------- invariants

TEST(Invariants, MassIsConservedToDiscretizationOrder) {
  auto drift = [](int n) {
    const Grid2D g(8.0, n);
    SolverParams p{kCase1, kGas2};
    p.support_radius = 3.0;
    RunOptions o;
    o.t_end = 2.0;
    const auto s0 = rotational_state(g, 0.05, 3.0);
    const double m0 = excess_mass(s0, kGas2);
    double worst = 0.0;
    run(s0, p, o, [&](const StateHistory& h) {
      worst = std::max(worst, std::abs(excess_mass(h.latest(), kGas2) - m0) / std::abs(m0));
    });
    return worst / o.t_end;
  };
  const double d1 = drift(64), d2 = drift(128);
  EXPECT_LT(d2, 1e-3);
  EXPECT_GT(std::log2(d1 / d2), 1.8);
}

namespace {

/// max over a run of (max field magnitude beyond t + M + 2h) / (max inside).
double support_leak(diagnostics::DataFamily family, int n) {
  const double M = 3.0;
  const Grid2D g(8.0, n);
  const diagnostics::FamilyParams fp{family, M, 1.0, 1.0, 0.0};
  const auto d = diagnostics::make_initial_data(fp, kGas2, g);
  SolverParams p{kCase1, kGas2};
  p.support_radius = M;
  RunOptions o;
  o.t_end = 3.0;
  double worst = 0.0;
  run(init_state(kGas2, 0.05, d.rho0, d.u10, d.u20, g), p, o, [&](const StateHistory& h) {
    const auto& s = h.latest();
    const double r = s.t + M + 2.0 * g.h();
    double out = 0.0, in = 0.0;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const double m = std::max({std::abs(s.theta(i, j)), std::abs(s.u1(i, j)), std::abs(s.u2(i, j))});
        double& slot = std::hypot(g.coord(i), g.coord(j)) > r ? out : in;
        slot = std::max(slot, m);
      }
    }
    worst = std::max(worst, out / in);
  });
  return worst;
}

}  // namespace

// Fields beyond t + M + 2h must stay below 1e-8 of the interior maximum.
// The fourth-order central scheme lets grid-scale content run ahead of the
// physical front, so this fails at affordable resolution; the next test
// checks that the leak vanishes under refinement.
TEST(Invariants, SupportContainment) {
  for (auto f : {diagnostics::DataFamily::Rotational, diagnostics::DataFamily::Irrotational}) {
    EXPECT_LT(support_leak(f, 256), 1e-8) << diagnostics::to_string(f);
  }
}

TEST(Invariants, SupportLeakVanishesUnderRefinement) {
  for (auto f : {diagnostics::DataFamily::Rotational, diagnostics::DataFamily::Irrotational}) {
    const double a = support_leak(f, 128), b = support_leak(f, 256);
    EXPECT_GT(std::log2(a / b), 1.5) << diagnostics::to_string(f);
    EXPECT_LT(b, 1e-3) << diagnostics::to_string(f);
  }
}

TEST(Invariants, GuardZeroesBeyondFourCells) {
  const Grid2D g(4.0, 64);
  SolverParams p{kCase1, kGas2};
  p.support_radius = 1.0;
  FlowState2D s(g, 0.5);
  s.theta.fill_interior(1.0);
  apply_support_guard(s, p);
  for (int j = 0; j < 64; ++j) {
    for (int i = 0; i < 64; ++i) {
      const bool inside = std::hypot(g.coord(i), g.coord(j)) <= 1.5 + 4 * g.h();
      EXPECT_EQ(s.theta(i, j), inside ? 1.0 : 0.0);
    }
  }
}

TEST(Invariants, IrrotationalDataStaysNearCurlFloor) {
  const Grid2D g(10.0, 128);
  const diagnostics::FamilyParams fp{diagnostics::DataFamily::Irrotational, 4.0, 1.0, 1.0, 0.0};
  const auto d = diagnostics::make_initial_data(fp, kGas2, g);
  const DampingLaw law(2.0, 1.0);
  SolverParams p{law, kGas2};
  p.support_radius = 4.0;
  RunOptions o;
  o.t_end = 5.0;
  const auto s0 = init_state(kGas2, 0.05, d.rho0, d.u10, d.u20, g);
  const double floor0 = vorticity(s0).l2(g.h());
  ASSERT_GT(floor0, 0.0);
  double worst = 0.0;
  run(s0, p, o, [&](const StateHistory& h) {
    worst = std::max(worst, vorticity(h.latest()).l2(g.h()));
  });
  EXPECT_LE(worst, 10.0 * floor0);
}
