#include <gtest/gtest.h>

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

#include "ssg/error.hpp"
#include "ssg/random.hpp"
#include "ssg/transport.hpp"

using namespace ssg;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralField2D sample(const TorusGrid& g, double (*fn)(double, double)) {
  return to_spectral(GridField::sample(g, fn));
}

// psi with grad^perp psi = (sin 2 pi x2, 0)
VelocityField shear(const TorusGrid& g) {
  return VelocityField::from_stream_function(
      sample(g, [](double, double x2) { return std::cos(2 * kPi * x2) / (2 * kPi); }));
}

// grad^perp psi = (0, 0.3 cos 2 pi x1)
VelocityField cross(const TorusGrid& g) {
  return VelocityField::from_stream_function(
      sample(g, [](double x1, double) { return 0.3 * std::sin(2 * kPi * x1) / (2 * kPi); }));
}

VelocityField constant(const TorusGrid& g, double a, double b) {
  VelocityField w = VelocityField::zero(g);
  w.w1.set_coeff(0, 0, {a, 0.0});
  w.w2.set_coeff(0, 0, {b, 0.0});
  return w;
}

}  // namespace

TEST(Hermite, ExactAtNodes) {
  const TorusGrid g(32, 24);
  const SpectralField2D f = random_band_limited(g, 1, 5, 1.0);
  const GridField v = to_physical(f);
  const HermiteInterpolant h(f);
  for (int i1 = 0; i1 < g.n1(); ++i1)
    for (int i2 = 0; i2 < g.n2(); ++i2) {
      EXPECT_EQ(h(g.x1(i1), g.x2(i2)), v(i1, i2));
      EXPECT_EQ(h(g.x1(i1) + 1.0, g.x2(i2) - 2.0), v(i1, i2));  // periodic images
    }
}

TEST(Hermite, FourthOrderAccurate) {
  auto fn = [](double x1, double x2) { return std::sin(2 * kPi * (x1 + 2 * x2)) + std::cos(2 * kPi * x1); };
  double err[2] = {0, 0};
  int idx = 0;
  for (int n : {32, 64}) {
    const TorusGrid g(n, n);
    const HermiteInterpolant h(to_spectral(GridField::sample(g, fn)));
    SplitMix64 rng(4);
    for (int s = 0; s < 2000; ++s) {
      const double x1 = rng.uniform(), x2 = rng.uniform();
      err[idx] = std::max(err[idx], std::abs(h(x1, x2) - fn(x1, x2)));
    }
    ++idx;
  }
  EXPECT_GT(err[0] / err[1], 12.0) << err[0] << " " << err[1];
  EXPECT_LT(err[1], 1e-5);
}

TEST(Velocity, DivergenceFreeAndSpeed) {
  const TorusGrid g(32, 32);
  const VelocityField w = VelocityField::from_stream_function(random_band_limited(g, 2, 5, 1.0));
  EXPECT_LT(w.divergence_defect(), 1e-13);
  EXPECT_NEAR(shear(g).max_speed(), 1.0, 1e-14);
}

TEST(Timeline, LinearInTimeAndBounded) {
  const TorusGrid g(16, 16);
  VelocityTimeline tl;
  EXPECT_THROW(tl.t_min(), DomainError);
  tl.add(0.0, constant(g, 1.0, 0.0));
  tl.add(2.0, constant(g, 3.0, -1.0));
  EXPECT_THROW(tl.add(1.0, constant(g, 0.0, 0.0)), DomainError);
  const auto v = tl(0.3, 0.7, 0.5);
  EXPECT_NEAR(v[0], 1.5, 1e-15);
  EXPECT_NEAR(v[1], -0.25, 1e-15);
  EXPECT_THROW(tl(0.0, 0.0, 2.1), DomainError);
  EXPECT_THROW(tl(0.0, 0.0, -0.1), DomainError);
  EXPECT_THROW(integrate_flow(tl, 0.0, 3.0, 4), DomainError);
  EXPECT_THROW(integrate_flow(tl, 0.0, 1.0, 0), DomainError);
}

TEST(Flow, IdentityWithoutIntegration) {
  const TorusGrid g(16, 16);
  VelocityTimeline tl;
  tl.add(0.0, shear(g));
  tl.add(1.0, shear(g));
  const FlowMapBatch f = integrate_flow(tl, 0.5, 0.5, 3);
  const FlowMapBatch id = FlowMapBatch::identity(g, 0.5);
  EXPECT_EQ(f.x1, id.x1);
  EXPECT_EQ(f.x2, id.x2);
  for (double d : f.d1) EXPECT_EQ(d, 0.0);
}

TEST(Flow, ZeroVelocityLeavesValuesUnchanged) {
  const TorusGrid g(32, 32);
  VelocityTimeline tl;
  tl.add(0.0, VelocityField::zero(g));
  tl.add(1.0, VelocityField::zero(g));
  const SpectralField2D theta = random_band_limited(g, 3, 4, 1.0);
  const GridField before = to_physical(theta);
  const GridField after = advect_values(theta, integrate_flow(tl, 1.0, 0.0, 8));
  EXPECT_EQ(std::memcmp(before.values().data(), after.values().data(), before.values().size_bytes()), 0);
}

TEST(Flow, TranslationIsExact) {
  const TorusGrid g(64, 64);
  VelocityTimeline tl;
  tl.add(0.0, constant(g, 0.25, -0.125));
  tl.add(1.0, constant(g, 0.25, -0.125));
  const FlowMapBatch f = integrate_flow(tl, 1.0, 0.0, 5);
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_NEAR(f.d1[k], -0.25, 1e-15);
    EXPECT_NEAR(f.d2[k], 0.125, 1e-15);
    EXPECT_GE(f.x1[k], 0.0);
    EXPECT_LT(f.x1[k], 1.0);
  }
  // theta(x, 1) = theta0(x - w)
  const SpectralField2D theta0 = random_band_limited(g, 8, 3, 1.0);
  const GridField got = advect_values(theta0, f);
  const GridField ref = to_physical(theta0);
  for (int i1 = 0; i1 < 64; ++i1)
    for (int i2 = 0; i2 < 64; ++i2)
      EXPECT_NEAR(got(i1, i2), ref((i1 + 48) % 64, (i2 + 8) % 64), 1e-14);
}

TEST(Flow, MatchesOdeintOracleOffGrid) {
  // w(x, t) = (1 - t) (sin 2 pi x2, 0) + t (0, 0.3 cos 2 pi x1)
  const TorusGrid g(256, 256);
  VelocityTimeline tl;
  tl.add(0.0, shear(g));
  tl.add(1.0, cross(g));
  using State = std::array<double, 2>;
  auto rhs = [](const State& x, State& dx, double t) {
    dx[0] = (1 - t) * std::sin(2 * kPi * x[1]);
    dx[1] = t * 0.3 * std::cos(2 * kPi * x[0]);
  };
  namespace ode = boost::numeric::odeint;
  SplitMix64 rng(21);
  for (int s = 0; s < 50; ++s) {
    State x{rng.uniform(), rng.uniform()};
    const State start = x;
    ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<State>>(1e-13, 1e-13), rhs,
                            x, 0.0, 0.5, 1e-3);
    const auto got = trace_point(tl, start, 0.0, 0.5, 200);
    EXPECT_NEAR(got[0], x[0], 1e-8);
    EXPECT_NEAR(got[1], x[1], 1e-8);
  }
}

TEST(Flow, BackwardForwardIsIdentity) {
  const TorusGrid g(128, 128);
  VelocityTimeline tl;
  tl.add(0.0, shear(g));
  tl.add(1.0, cross(g));
  const int n = cfl_substeps(tl, 0.0, 1.0);
  const FlowMapBatch fwd = integrate_flow(tl, 0.0, 1.0, n);
  double worst = 0.0;
  for (std::size_t k = 0; k < g.size(); k += 37) {
    const double x1 = g.x1(static_cast<int>(k / 128)), x2 = g.x2(static_cast<int>(k % 128));
    const auto back = trace_point(tl, {x1 + fwd.d1[k], x2 + fwd.d2[k]}, 1.0, 0.0, n);
    worst = std::max({worst, std::abs(back[0] - x1), std::abs(back[1] - x2)});
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Flow, CflSubsteps) {
  const TorusGrid g(64, 64);
  VelocityTimeline tl;
  tl.add(0.0, shear(g));
  tl.add(1.0, shear(g));
  EXPECT_EQ(cfl_substeps(tl, 0.0, 1.0), 128);
  EXPECT_EQ(cfl_substeps(tl, 1.0, 0.0, 1.0), 64);
  EXPECT_EQ(cfl_substeps(tl, 0.0, 1e-9), 1);
}

TEST(Bounds, ZeroVelocityHoldsWithEquality) {
  const TorusGrid g(32, 32);
  VelocityTimeline tl;
  tl.add(0.0, VelocityField::zero(g));
  tl.add(1.0, VelocityField::zero(g));
  const SpectralField2D theta = random_band_limited(g, 1, 3, 0.1);
  const FlowMapBatch flows[] = {integrate_flow(tl, 1.0, 0.0, 1)};
  const double times[] = {0.0, 1.0};
  const SpectralField2D thetas[] = {theta, theta};
  const BoundReport r = check_appendix_bounds(times, thetas, tl, flows, {});
  EXPECT_TRUE(r.holds());
  for (const auto& rec : r.records)
    if (rec.bound_id == "b_flow_grad") EXPECT_EQ(rec.margin(), 0.0);
  std::ostringstream os;
  r.write_csv(os);
  EXPECT_EQ(os.str().substr(0, 26), "t,bound_id,lhs,rhs,margin\n");
}

TEST(Bounds, TranslationSlack) {
  const TorusGrid g(32, 32);
  VelocityTimeline tl;
  tl.add(0.0, constant(g, 0.3, 0.1));
  tl.add(1.0, constant(g, 0.3, 0.1));
  const FlowMapBatch flows[] = {integrate_flow(tl, 0.0, 1.0, 4)};
  const BoundReport r = check_appendix_bounds({}, {}, tl, flows, {});
  for (const auto& rec : r.records)
    if (rec.bound_id == "b_flow_grad") {
      EXPECT_NEAR(rec.lhs, 1.0, 1e-14);
      EXPECT_NEAR(rec.margin(), std::exp(0.3) - 1.0, 1e-14);
    }
}

TEST(Bounds, ShearAtUnitTime) {
  const TorusGrid g(128, 128);
  VelocityTimeline tl;
  tl.add(0.0, shear(g));
  tl.add(1.0, shear(g));
  const SpectralField2D theta0 = sample(g, [](double x1, double x2) {
    return std::cos(2 * kPi * x1) + 0.5 * std::cos(2 * kPi * x2);
  });
  const FlowMapBatch back = integrate_flow(tl, 1.0, 0.0, cfl_substeps(tl, 0.0, 1.0));
  const FlowMapBatch flows[] = {back};
  const double times[] = {0.0, 1.0};
  const SpectralField2D thetas[] = {theta0, advect(theta0, back)};
  const BoundReport r = check_appendix_bounds(times, thetas, tl, flows, {});
  EXPECT_EQ(r.records.size(), 3u + 8u);
  EXPECT_GE(r.worst_margin(), 0.0);
}
