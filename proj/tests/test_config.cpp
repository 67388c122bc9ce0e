#include <gtest/gtest.h>

#include "eulerdamp/config.hpp"

using namespace eulerdamp;

TEST(RunConfig, SerializeParseRoundTrip) {
  RunConfig c;
  c.damping.mu = 2.5;
  c.initial.epsilon = 0.1;
  c.initial.u_profile = Profile::parse("shifted_bump(0.25)");
  c.convergence_resolutions = {256, 512, 1024};
  c.solver.regrid = true;
  const std::string text = c.serialize();
  const RunConfig back = RunConfig::parse(text);
  EXPECT_EQ(back.serialize(), text);
  EXPECT_EQ(back.hash(), c.hash());
  EXPECT_EQ(back.initial.epsilon, 0.1);
}

TEST(RunConfig, HashSeparatesConfigs) {
  RunConfig a, b;
  b.damping.mu = 1e-12;
  EXPECT_NE(a.hash(), b.hash());
  EXPECT_EQ(a.hash().size(), 16u);
}

TEST(RunConfig, ShortestRoundTripNumbers) {
  EXPECT_EQ(cfgio::format_double(0.1), "0.1");
  EXPECT_EQ(cfgio::format_double(2.0), "2");
  EXPECT_EQ(cfgio::format_double(1e-4), "1e-04");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(cfgio::parse_double("k", cfgio::format_double(x)), x);
}

TEST(RunConfig, CommentsAndWhitespace) {
  const RunConfig c = RunConfig::parse("# header\n\n  damping.mu =  4   # strong\ninitial.epsilon=0.001\n");
  EXPECT_EQ(c.damping.mu, 4.0);
  EXPECT_EQ(c.initial.epsilon, 0.001);
}

TEST(RunConfig, MalformedInputs) {
  EXPECT_THROW(RunConfig::parse("damping.mu 2\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse("damping.nu = 2\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse("damping.mu = 2\ndamping.mu = 3\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse("damping.mu = two\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse("damping.mu = 2x\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse("gas.gamma = 0.9\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse("solver.regrid = maybe\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse("solver.regrid = true\nsolver.n_cells = 1002\n"), ConfigError);
  EXPECT_THROW(RunConfig::parse("initial.rho_profile = gauss\n"), ConfigError);
  EXPECT_THROW(RunConfig::load("/nonexistent/run.cfg"), ConfigError);
}

TEST(RunConfig, AutoDomainHalfWidth) {
  RunConfig c;
  c.solver.t_end = 50.0;
  EXPECT_DOUBLE_EQ(c.domain_half_width(), 1.0 + 1.5 * 50.0 * 1.5);
  c.half_width = 60.0;
  EXPECT_EQ(c.domain_half_width(), 60.0);
}

TEST(SweepSpec, CrossProductOrderAndSize) {
  std::istringstream in("damping.mu = 1\nsweep.mu = 0, 2\nsweep.epsilon = 0.1,0.2,0.3\nsweep.two_resolution = false\n");
  const SweepSpec s = SweepSpec::from_pairs(cfgio::parse_pairs(in));
  EXPECT_EQ(s.size(), 6u);
  const auto pts = s.points();
  ASSERT_EQ(pts.size(), 6u);
  EXPECT_EQ(pts[0].damping.mu, 0.0);
  EXPECT_EQ(pts[0].initial.epsilon, 0.1);
  EXPECT_EQ(pts[2].initial.epsilon, 0.3);
  EXPECT_EQ(pts[3].damping.mu, 2.0);
  EXPECT_FALSE(s.two_resolution);
}

TEST(SweepSpec, EmptyAxesGiveBaseConfig) {
  std::istringstream in("damping.mu = 3\n");
  const SweepSpec s = SweepSpec::from_pairs(cfgio::parse_pairs(in));
  ASSERT_EQ(s.points().size(), 1u);
  EXPECT_EQ(s.points()[0].hash(), s.base.hash());
}

TEST(SweepSpec, BadKeysAndPoints) {
  std::istringstream a("sweep.rho = 1\n");
  EXPECT_THROW(SweepSpec::from_pairs(cfgio::parse_pairs(a)), ConfigError);
  std::istringstream b("sweep.gamma = 2, 1\n");
  EXPECT_THROW(SweepSpec::from_pairs(cfgio::parse_pairs(b)), ConfigError);
}

TEST(SweepSpec, HashCoversAxes) {
  std::istringstream a("sweep.mu = 0,1\n"), b("sweep.mu = 0,2\n");
  EXPECT_NE(SweepSpec::from_pairs(cfgio::parse_pairs(a)).hash(), SweepSpec::from_pairs(cfgio::parse_pairs(b)).hash());
}
