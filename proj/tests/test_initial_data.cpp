#include <cmath>

#include <gtest/gtest.h>

#include "eulerdamp/initial_data.hpp"

using namespace eulerdamp;

namespace {

InitialDataSpec parabola_spec() {
  InitialDataSpec s;
  s.epsilon = 1.0;
  s.R = 1.0;
  s.R0 = 0.0;  // the moment oracles use R0 = 0, outside the validated range
  s.rho_profile = Profile::parse("parabola");
  s.u_profile = Profile::parse("parabola");
  return s;
}

// independent composite trapezoid with many nodes
template <class F>
double fine_trapezoid(F f, double a, double b, int n = 400000) {
  const double h = (b - a) / n;
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) s += f(a + i * h);
  return s * h;
}

}  // namespace

TEST(Profile, ParseAndName) {
  for (const char* n : {"zero", "bump", "poly2", "parabola", "-bump", "shifted_bump(0.25)", "-shifted_bump(-0.5)"})
    EXPECT_EQ(Profile::parse(n).name(), n);
  EXPECT_THROW(Profile::parse("gauss"), ConfigError);
  EXPECT_THROW(Profile::parse("shifted_bump(x)"), ConfigError);
}

TEST(Profile, BumpPeakAndSupport) {
  const Profile b = Profile::parse("bump");
  EXPECT_NEAR(b(0.0, 1.0), std::exp(-1.0), 1e-16);
  EXPECT_EQ(b(1.0, 1.0), 0.0);
  EXPECT_EQ(b(-1.5, 1.0), 0.0);
  EXPECT_EQ(Profile::parse("-bump")(0.0, 2.0), -std::exp(-1.0));
}

TEST(Profile, ShiftedBumpStaysInsideSupport) {
  const Profile p = Profile::parse("shifted_bump(0.5)");
  EXPECT_NEAR(p(0.5, 1.0), std::exp(-1.0), 1e-16);
  EXPECT_EQ(p(0.0, 1.0), 0.0);
  EXPECT_EQ(p(1.0, 1.0), 0.0);
  EXPECT_GT(p(0.9, 1.0), 0.0);
  EXPECT_THROW(p.validate(0.5), ConfigError);
}

TEST(InitialDataSpec, Validation) {
  InitialDataSpec s;
  EXPECT_NO_THROW(s.validate());
  s.R0 = 1.0;
  EXPECT_THROW(s.validate(), ConfigError);
  s.R0 = 0.5;
  s.epsilon = -0.1;
  EXPECT_THROW(s.validate(), ConfigError);
  s.epsilon = 1.0;
  s.rho_profile = Profile::parse("-poly2");
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(SampleInitial, ZeroAmplitudeIsBackground) {
  InitialDataSpec s;
  s.epsilon = 0.0;
  s.u_profile = Profile::parse("bump");
  const GridField f = sample_initial(s, UniformGrid::symmetric(3.0, 301));
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_EQ(f.rho[i], 1.0);
    EXPECT_EQ(f.momentum[i], 0.0);
  }
}

TEST(SampleInitial, BumpPeakAtOrigin) {
  InitialDataSpec s;
  s.epsilon = 0.1;
  const GridField f = sample_initial(s, UniformGrid::symmetric(2.0, 401));  // odd: a cell centre at 0
  double mx = 0.0;
  for (double r : f.rho) mx = std::max(mx, r);
  EXPECT_NEAR(mx, 1.0 + 0.1 * std::exp(-1.0), 1e-15);
  EXPECT_EQ(f.rho[200], mx);
}

TEST(SampleInitial, CompactSupportIsExact) {
  InitialDataSpec s;
  s.epsilon = 0.3;
  s.u_profile = Profile::parse("poly2");
  const GridField f = sample_initial(s, UniformGrid::symmetric(4.0, 800));
  for (std::size_t i = 0; i < f.size(); ++i)
    if (std::abs(f.x(i)) > s.R) {
      EXPECT_EQ(f.rho[i], 1.0);
      EXPECT_EQ(f.momentum[i], 0.0);
    }
}

TEST(SampleInitial, GridMustCoverSupport) {
  InitialDataSpec s;
  EXPECT_THROW(sample_initial(s, UniformGrid::symmetric(0.5, 100)), ConfigError);
}

TEST(Moments, Q0ParabolaAtOrigin) { EXPECT_NEAR(q0(0.0, parabola_spec()), 2.0 / 15.0, 1e-10); }

TEST(Moments, Q1ParabolaAtOrigin) { EXPECT_NEAR(q1(0.0, parabola_spec()), 1.0 / 3.0, 1e-10); }

TEST(Moments, B0ParabolaIsOneOverSeventyTwo) { EXPECT_NEAR(b0(parabola_spec()), 1.0 / 72.0, 1e-10); }

TEST(Moments, VanishBeyondSupport) {
  const auto s = parabola_spec();
  EXPECT_EQ(q0(1.0, s), 0.0);
  EXPECT_EQ(q0(3.0, s), 0.0);
  EXPECT_EQ(q1(1.2, s), 0.0);
}

TEST(Moments, ZeroVelocityGivesZeroQ1) {
  InitialDataSpec s;
  EXPECT_EQ(q1(0.6, s), 0.0);
}

TEST(Moments, Q0BumpMatchesFineTrapezoid) {
  InitialDataSpec s;
  const double oracle = fine_trapezoid([](double x) { return (x - 0.5) * (x - 0.5) * Profile::bump(x); }, 0.5, 1.0);
  const double v = q0(0.5, s);
  EXPECT_GT(v, 0.0);
  EXPECT_NEAR(v, oracle, 1e-8);
}

TEST(Moments, B0ZeroProfileAndDoubling) {
  InitialDataSpec s;
  s.rho_profile = Profile::parse("zero");
  EXPECT_EQ(b0(s), 0.0);
  InitialDataSpec a;
  const double base = b0(a);
  EXPECT_GT(base, 0.0);
  const double doubled = 0.5 * adaptive_simpson([&](double r) {
    return adaptive_simpson([&](double x) { return (x - r) * (x - r) * 2.0 * a.rho0(x); }, r, a.R, 1e-12);
  }, a.R0, a.R, 1e-10);
  EXPECT_NEAR(doubled, 2.0 * base, 1e-9);
}

TEST(Hypothesis, PositiveBumpHolds) {
  InitialDataSpec s;
  for (double R0 : {0.1, 0.5, 0.9}) {
    s.R0 = R0;
    EXPECT_TRUE(check_hypothesis(s).holds);
  }
}

TEST(Hypothesis, NegativeBumpFails) {
  InitialDataSpec s;
  s.rho_profile = Profile::parse("-bump");
  const auto v = check_hypothesis(s);
  EXPECT_FALSE(v.holds);
  ASSERT_TRUE(v.failing_r.has_value());
  EXPECT_GT(*v.failing_r, s.R0);
  EXPECT_LT(*v.failing_r, s.R);
}

TEST(Hypothesis, BumpVelocityHolds) {
  InitialDataSpec s;
  s.u_profile = Profile::parse("bump");
  EXPECT_TRUE(check_hypothesis(s).holds);
}

TEST(Hypothesis, NegativeVelocityFailsOnQ1) {
  InitialDataSpec s;
  s.u_profile = Profile::parse("-bump");
  const auto v = check_hypothesis(s);
  EXPECT_FALSE(v.holds);
  EXPECT_NE(v.reason.find("q1"), std::string::npos);
}

TEST(Hypothesis, ProfileVanishingOnWindowFails) {
  InitialDataSpec s;
  s.R0 = 0.5;
  s.rho_profile = Profile::parse("shifted_bump(-0.5)");  // supported in (-1, 0)
  EXPECT_FALSE(check_hypothesis(s).holds);
}
