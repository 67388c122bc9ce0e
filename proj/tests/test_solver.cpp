#include <algorithm>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "eulerdamp/initial_data.hpp"
#include "eulerdamp/solver.hpp"

using namespace eulerdamp;

namespace {

GridField background(double x_min, double x_max, std::size_t n) { return GridField(UniformGrid{x_min, x_max, n}); }

GridField bump_field(double eps, const char* rho_profile, const char* u_profile, double half_width, std::size_t n) {
  InitialDataSpec s;
  s.epsilon = eps;
  s.rho_profile = Profile::parse(rho_profile);
  s.u_profile = Profile::parse(u_profile);
  return sample_initial(s, UniformGrid::symmetric(half_width, n));
}

}  // namespace

TEST(ComputeDt, BackgroundState) {
  const GridField f = background(0.0, 1.0, 100);
  EXPECT_NEAR(compute_dt(f, 0.4, {2.0}), 0.004, 1e-17);
}

TEST(ComputeDt, FastestCellSetsStep) {
  GridField f = background(0.0, 1.0, 100);
  f.momentum[37] = 0.5;
  EXPECT_NEAR(compute_dt(f, 0.4, {2.0}), 0.004 / 1.5, 1e-17);
}

TEST(ComputeDt, HalvingDxHalvesDt) {
  const GridField a = bump_field(0.2, "bump", "bump", 2.0, 200);
  const GridField b = bump_field(0.2, "bump", "bump", 1.0, 200);
  EXPECT_NEAR(compute_dt(b, 0.4, {2.0}) / compute_dt(a, 0.4, {2.0}), 0.5, 0.02);
  GridField c = a;
  c.grid.x_max = c.grid.x_min + 0.5 * c.grid.length();
  EXPECT_DOUBLE_EQ(compute_dt(c, 0.4, {2.0}), 0.5 * compute_dt(a, 0.4, {2.0}));
}

TEST(ComputeDt, VacuumThrows) {
  GridField f = background(0.0, 1.0, 10);
  f.rho[3] = 0.0;
  EXPECT_THROW(compute_dt(f, 0.4, {2.0}), DomainError);
}

TEST(HyperbolicStep, ConstantStateIsPreserved) {
  GridField f = background(-1.0, 1.0, 64);
  std::fill(f.rho.begin(), f.rho.end(), 1.3);
  std::fill(f.momentum.begin(), f.momentum.end(), 0.4);
  SolverConfig cfg;
  const auto out = hyperbolic_step(f, 0.4 * compute_dt(f, 1.0, {2.0}), cfg, {2.0});
  ASSERT_EQ(out.flag, StepFlag::ok);
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_EQ(out.field.rho[i], 1.3);
    EXPECT_EQ(out.field.momentum[i], 0.4);
  }
}

TEST(HyperbolicStep, MassIsConserved) {
  GridField f = bump_field(0.3, "bump", "bump", 3.0, 600);
  const double m0 = f.total_mass();
  SolverConfig cfg;
  const GasParams gas{2.0};
  for (int k = 0; k < 50; ++k) {
    const auto out = hyperbolic_step(f, compute_dt(f, cfg.cfl, gas), cfg, gas);
    ASSERT_EQ(out.flag, StepFlag::ok);
    f = out.field;
  }
  EXPECT_LE(std::abs(f.total_mass() - m0) / m0, 1e-13);
}

TEST(HyperbolicStep, AcousticPulseMovesAtUnitSpeed) {
  // right-moving simple wave of the linearised system: u = v
  const GasParams gas{2.0};
  InitialDataSpec s;
  s.epsilon = 1e-4;
  s.R = 0.5;
  s.R0 = 0.25;
  GridField f = sample_initial(s, UniformGrid::symmetric(3.0, 1200));
  for (std::size_t i = 0; i < f.size(); ++i) f.momentum[i] = f.rho[i] * primitive_to_soundvars({f.rho[i], 0.0}, gas).v;
  SolverConfig cfg;
  cfg.snapshot_dt = 0.0;
  const auto res = advance(f, cfg, {}, gas, 1.0);
  ASSERT_EQ(res.status, AdvanceStatus::completed);
  const auto it = std::max_element(res.field.rho.begin(), res.field.rho.end());
  const double x_peak = res.field.x(static_cast<std::size_t>(it - res.field.rho.begin()));
  EXPECT_NEAR(x_peak, 1.0, 2.0 * f.dx());
}

TEST(Damping, NoDampingLeavesFieldUnchanged) {
  const GridField f = bump_field(0.3, "bump", "bump", 2.0, 100);
  const GridField g = damping_step(f, 0.3, 0.7, {0.0, 1.0});
  EXPECT_EQ(g.momentum, f.momentum);
  EXPECT_EQ(g.rho, f.rho);
}

TEST(Damping, ClosedFormScaling) {
  GridField f = bump_field(0.3, "bump", "bump", 2.0, 100);
  f.momentum[10] = -0.2;
  const GridField g = damping_step(f, 0.0, 1.0, {2.0, 1.0});
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_DOUBLE_EQ(g.momentum[i], 0.25 * f.momentum[i]);
    EXPECT_FALSE(g.momentum[i] * f.momentum[i] < 0.0);
  }
  EXPECT_EQ(g.rho, f.rho);
}

TEST(Advance, ZeroAmplitudeStaysBackground) {
  const GridField f = bump_field(0.0, "bump", "bump", 2.0, 200);
  SolverConfig cfg;
  const auto res = advance(f, cfg, {2.0, 1.0}, {2.0}, 3.0);
  ASSERT_EQ(res.status, AdvanceStatus::completed);
  for (std::size_t i = 0; i < res.field.size(); ++i) {
    EXPECT_EQ(res.field.rho[i], 1.0);
    EXPECT_EQ(res.field.momentum[i], 0.0);
  }
}

TEST(Advance, UndampedVelocityBumpBlowsUp) {
  const GridField f = bump_field(0.5, "zero", "bump", 4.0, 2048);
  SolverConfig cfg;
  const auto res = advance(f, cfg, {0.0, 1.0}, {2.0}, 20.0);
  EXPECT_EQ(res.status, AdvanceStatus::blowup);
  EXPECT_LT(res.field.t, 20.0);
  EXPECT_GT(res.field.t, 0.0);
}

TEST(Advance, SplitIntervalMatchesDirect) {
  const GridField f = bump_field(0.2, "bump", "bump", 3.0, 300);
  SolverConfig cfg;
  cfg.snapshot_dt = 1.0;
  const DampingProfile d{1.5, 1.0};
  const auto direct = advance(f, cfg, d, {2.0}, 2.0);
  const auto first = advance(f, cfg, d, {2.0}, 1.0);
  const auto second = advance(first.field, cfg, d, {2.0}, 2.0);
  EXPECT_EQ(direct.field.rho, second.field.rho);
  EXPECT_EQ(direct.field.momentum, second.field.momentum);
}

TEST(Advance, LandsOnSnapshotTimes) {
  const GridField f = bump_field(0.1, "bump", "zero", 3.0, 300);
  SolverConfig cfg;
  cfg.snapshot_dt = 0.25;
  std::vector<double> times;
  const auto res = advance(f, cfg, {1.0, 1.0}, {2.0}, 1.0, [&](const GridField& g) { times.push_back(g.t); });
  ASSERT_EQ(res.status, AdvanceStatus::completed);
  EXPECT_EQ(times, (std::vector<double>{0.25, 0.5, 0.75, 1.0}));
  EXPECT_EQ(res.field.t, 1.0);
}

TEST(Advance, MomentumFollowsIntegratingFactor) {
  GridField f = bump_field(0.05, "bump", "bump", 6.0, 1200);
  const double m0 = f.total_momentum();
  SolverConfig cfg;
  const DampingProfile d{2.0, 1.0};
  const auto res = advance(f, cfg, d, {2.0}, 3.0);
  ASSERT_EQ(res.status, AdvanceStatus::completed);
  EXPECT_NEAR(res.field.total_momentum() / m0, damping_decay_factor(0.0, 3.0, d), 1e-10);
}

TEST(Advance, VacuumIsReported) {
  GridField f = background(-1.0, 1.0, 200);
  f.rho[100] = 0.5 * kRhoMin;
  SolverConfig cfg;
  const auto res = advance(f, cfg, {}, {2.0}, 1.0);
  EXPECT_EQ(res.status, AdvanceStatus::vacuum);
  EXPECT_NE(res.message.find("vacuum"), std::string::npos);
}

TEST(Advance, NonFiniteIsReported) {
  GridField f = background(-1.0, 1.0, 200);
  f.momentum[50] = std::numeric_limits<double>::quiet_NaN();
  SolverConfig cfg;
  EXPECT_EQ(advance(f, cfg, {}, {2.0}, 1.0).status, AdvanceStatus::nonfinite);
}

TEST(Regrid, DoublingConservesExcessMassAndMomentum) {
  const GridField f = bump_field(0.3, "bump", "bump", 2.0, 400);
  const GridField g = f.doubled();
  EXPECT_EQ(g.size(), f.size());
  EXPECT_DOUBLE_EQ(g.grid.length(), 2.0 * f.grid.length());
  auto excess = [](const GridField& h) {
    double s = 0.0;
    for (double r : h.rho) s += r - 1.0;
    return s * h.dx();
  };
  EXPECT_NEAR(excess(g), excess(f), 1e-15);
  EXPECT_NEAR(g.total_momentum(), f.total_momentum(), 1e-15);
}

TEST(Regrid, AdvanceDoublesWhenWavesApproachBoundary) {
  const GridField f = bump_field(0.05, "bump", "zero", 2.0, 512);
  SolverConfig cfg;
  cfg.regrid = true;
  const auto res = advance(f, cfg, {3.0, 1.0}, {2.0}, 6.0);
  ASSERT_EQ(res.status, AdvanceStatus::completed);
  EXPECT_GE(res.regrids, 2);
  EXPECT_GT(res.field.grid.x_max, 7.0);
}

TEST(GradientMonitor, LinearVelocity) {
  GridField f = background(0.0, 1.0, 100);
  for (std::size_t i = 0; i < f.size(); ++i) f.momentum[i] = 0.3 * f.x(i);
  const auto g = measure_gradients(f);
  EXPECT_NEAR(g.max_dxu, 0.3, 1e-12);
  EXPECT_EQ(g.max_dxrho, 0.0);
  EXPECT_NEAR(g.steepness(), 0.3 / f.velocity(99), 1e-12);
}

TEST(SolverConfig, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  c.limiter = "superbee";
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.cfl = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
}
