#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ssg/config.hpp"

using namespace ssg;

TEST(Config, ParsesKeyValueWithComments) {
  const ConfigMap m = parse_config_text("# run\nresolution = 32x32x17  # grid\n\n t_end=0.5\nt_end=0.25\n");
  EXPECT_EQ(m.at("resolution"), "32x32x17");
  EXPECT_EQ(m.at("t_end"), "0.25");
  EXPECT_THROW(parse_config_text("novalue\n"), ConfigError);
  EXPECT_THROW(parse_config_text("=3\n"), ConfigError);
}

TEST(Config, AppliesAndValidates) {
  const SolverConfig c = apply_config(parse_config_text(
      "resolution=32x48x9\ndt_policy=fixed\ndt=0.02\npicard=3\nalpha=0.3\ncheck_bounds=no\n"));
  EXPECT_EQ(c.n1, 32);
  EXPECT_EQ(c.n2, 48);
  EXPECT_EQ(c.n3, 9);
  EXPECT_EQ(c.dt_policy, DtPolicy::Fixed);
  EXPECT_EQ(c.dt, 0.02);
  EXPECT_EQ(c.picard_iters_per_step, 3);
  EXPECT_FALSE(c.check_bounds);
  EXPECT_NO_THROW(c.validate());
  EXPECT_THROW(apply_config({{"bogus", "1"}}), ConfigError);
  EXPECT_THROW(apply_config({{"dt", "fast"}}), ConfigError);
  EXPECT_THROW(apply_config({{"resolution", "32x32"}}), ConfigError);
  EXPECT_THROW(apply_config({{"picard", "0"}}).validate(), ConfigError);
  EXPECT_THROW(apply_config({{"dt", "-1"}}).validate(), ConfigError);
  EXPECT_THROW(apply_config({{"alpha", "1"}}).validate(), ConfigError);
  EXPECT_THROW(apply_config({{"beta", "0"}}).validate(), ConfigError);
  EXPECT_THROW(apply_config({{"resolution", "32x32x16"}}).validate(), ConfigError);
}

TEST(Config, TextRoundTrip) {
  SolverConfig c;
  c.dt = 0.1 / 3;
  c.theta0 = Theta0Spec::parse("random:17,3,0.01");
  c.norm_seed = 99;
  const SolverConfig back = apply_config(parse_config_text(c.to_text()));
  EXPECT_EQ(back.to_text(), c.to_text());
  EXPECT_EQ(back.dt, c.dt);
}

TEST(Theta0, Specs) {
  const Theta0Spec m = Theta0Spec::parse("mode:1,-2,0.5");
  EXPECT_EQ(m.kind, Theta0Spec::Kind::Mode);
  EXPECT_EQ(m.k2, -2);
  const Theta0Spec r = Theta0Spec::parse("random:7,3,0.01");
  EXPECT_EQ(r.seed, 7u);
  EXPECT_EQ(r.band, 3);
  EXPECT_EQ(Theta0Spec::parse("file:/tmp/a.ssgf").path, "/tmp/a.ssgf");
  EXPECT_THROW(Theta0Spec::parse("mode:0,0,1"), ConfigError);
  EXPECT_NO_THROW(Theta0Spec::parse("mode:0,0,0"));
  EXPECT_THROW(Theta0Spec::parse("mode:1,2"), ConfigError);
  EXPECT_THROW(Theta0Spec::parse("wave:1,2,3"), ConfigError);
  EXPECT_THROW(Theta0Spec::parse("random:1,0,1"), ConfigError);
  EXPECT_THROW(Theta0Spec::parse("noprefix"), ConfigError);
}

TEST(Theta0, SeedOverrideNeedsRandomDatum) {
  const SolverConfig c = apply_config({{"theta0", "random:1,2,0.01"}, {"seed", "5"}});
  EXPECT_EQ(c.theta0.seed, 5u);
  EXPECT_THROW(apply_config({{"theta0", "mode:1,0,1"}, {"seed", "5"}}), ConfigError);
}

TEST(Theta0, ModeIsACosine) {
  const TorusGrid g(16, 16);
  Theta0Spec s = Theta0Spec::parse("mode:2,-1,0.3");
  const GridField f = to_physical(make_theta0(s, g));
  for (int i1 = 0; i1 < 16; ++i1)
    for (int i2 = 0; i2 < 16; ++i2)
      EXPECT_NEAR(f(i1, i2), 0.3 * std::cos(2 * std::numbers::pi * (2 * i1 - i2) / 16.0), 1e-15);
  s = Theta0Spec::parse("mode:8,0,0.5");  // Nyquist: (-1)^i1
  const GridField n = to_physical(make_theta0(s, g));
  EXPECT_NEAR(n(3, 0), -0.5, 1e-15);
  SolverConfig c;
  c.n1 = c.n2 = 16;
  c.theta0 = Theta0Spec::parse("mode:9,0,1");
  EXPECT_THROW(c.validate(), ConfigError);
}
