#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>

#include "ssg/monge_ampere.hpp"

using namespace ssg;

namespace {

constexpr double kPi = std::numbers::pi;

bool bitwise_equal(const StripField3D& a, const StripField3D& b) {
  for (int j = 0; j < a.n3(); ++j) {
    const auto x = a.level(j).data();
    const auto y = b.level(j).data();
    if (std::memcmp(x.data(), y.data(), x.size_bytes()) != 0) return false;
  }
  return true;
}

StripField3D profile_field(const StripGrid& sg, double a, double b) {
  // a cos(2 pi x1) + b cos(2 pi x2), scaled by (1 + x3) per level
  StripField3D f(sg);
  for (int j = 0; j < sg.n3(); ++j) {
    const double s = 1.0 + sg.x3(j);
    f.level(j).set_coeff(1, 0, {0.5 * a * s, 0.0});
    f.level(j).set_coeff(0, 1, {0.5 * b * s, 0.0});
  }
  return f;
}

}  // namespace

TEST(MongeAmpere, ProductOfCosines) {
  // phi11 = -4pi^2 a cos x1', phi22 = -4pi^2 b cos x2', phi12 = 0
  const StripGrid sg(TorusGrid(32, 32), 9);
  const double a = 0.3, b = -0.7;
  const StripField3D m = monge_ampere_apply(profile_field(sg, a, b));
  const double c = 16 * std::pow(kPi, 4) * a * b;
  for (int j = 0; j < 9; ++j) {
    const double s = (1.0 + sg.x3(j)) * (1.0 + sg.x3(j));
    const GridField v = to_physical(m.level(j));
    for (int i1 = 0; i1 < 32; ++i1)
      for (int i2 = 0; i2 < 32; ++i2)
        EXPECT_NEAR(v(i1, i2), c * s * std::cos(2 * kPi * i1 / 32.0) * std::cos(2 * kPi * i2 / 32.0),
                    1e-11);
  }
}

TEST(MongeAmpere, SaddleWithMixedTerm) {
  // phi = sin(2 pi x1) sin(2 pi x2): M = (2pi)^4 (sin^2 sin^2 - cos^2 cos^2)
  const TorusGrid g(32, 32);
  const StripGrid sg(g, 9);
  const auto phi2d = to_spectral(GridField::sample(
      g, [](double x1, double x2) { return std::sin(2 * kPi * x1) * std::sin(2 * kPi * x2); }));
  StripField3D phi(sg);
  for (int j = 0; j < 9; ++j) phi.level(j) = phi2d;
  const GridField v = to_physical(monge_ampere_apply(phi).level(4));
  for (int i1 = 0; i1 < 32; ++i1)
    for (int i2 = 0; i2 < 32; ++i2) {
      const double s1 = std::sin(2 * kPi * i1 / 32.0), s2 = std::sin(2 * kPi * i2 / 32.0);
      const double c1 = std::cos(2 * kPi * i1 / 32.0), c2 = std::cos(2 * kPi * i2 / 32.0);
      EXPECT_NEAR(v(i1, i2), std::pow(2 * kPi, 4) * (s1 * s1 * s2 * s2 - c1 * c1 * c2 * c2), 1e-10);
    }
}

TEST(MongeAmpere, VanishesForOneDimensionalFields) {
  const StripGrid sg(TorusGrid(32, 32), 9);
  const StripField3D m = monge_ampere_apply(profile_field(sg, 0.4, 0.0));
  for (int j = 0; j < 9; ++j) EXPECT_EQ(m.level(j).max_abs_coeff(), 0.0);
}

TEST(Gamma, SymmetricAndDiagonalBitwise) {
  const StripGrid sg(TorusGrid(32, 32), 9);
  const StripField3D f = random_strip_field(sg, 1, 4, 2, 0.1);
  const StripField3D h = random_strip_field(sg, 2, 4, 2, 0.1);
  EXPECT_TRUE(bitwise_equal(gamma_apply(f, h), gamma_apply(h, f)));
  EXPECT_TRUE(bitwise_equal(gamma_apply(f, f), 2.0 * monge_ampere_apply(f)));
}

TEST(Gamma, BilinearAndPolarisation) {
  const StripGrid sg(TorusGrid(32, 32), 9);
  const StripField3D f = random_strip_field(sg, 3, 4, 2, 0.1);
  const StripField3D g = random_strip_field(sg, 4, 4, 2, 0.1);
  const StripField3D h = random_strip_field(sg, 5, 4, 2, 0.1);
  const double scale = strip_sup_norm(gamma_apply(f, h)) + strip_sup_norm(gamma_apply(g, h));
  EXPECT_LT(strip_sup_norm(gamma_apply(f + 2.0 * g, h) - gamma_apply(f, h) - 2.0 * gamma_apply(g, h)),
            1e-13 * scale);
  // M[f] - M[g] = gamma(f - g, f + g) / 2
  const StripField3D lhs = monge_ampere_apply(f) - monge_ampere_apply(g);
  const StripField3D rhs = 0.5 * gamma_apply(f - g, f + g);
  EXPECT_LT(strip_sup_norm(lhs - rhs), 1e-13 * strip_sup_norm(lhs));
}

TEST(MongeAmpere, HorizontalMeanVanishes) {
  const StripGrid sg(TorusGrid(32, 32), 9);
  const StripField3D m = monge_ampere_apply(random_strip_field(sg, 6, 5, 3, 1.0));
  for (int j = 0; j < 9; ++j) EXPECT_LT(std::abs(m.level(j).mean()), 1e-12);
}

TEST(MongeAmpere, QuadraticBoundsInProxyNorms) {
  const StripGrid sg(TorusGrid(32, 32), 9);
  const PairSampling s{0.5, 8192, 11};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const StripField3D f1 = random_strip_field(sg, seed, 1 + seed % 4, 2, 0.01);
    const StripField3D f2 = random_strip_field(sg, seed + 100, 1 + seed % 4, 2, 0.01);
    const double n1 = strip_holder_norm(f1, 2, s), n2 = strip_holder_norm(f2, 2, s);
    EXPECT_LE(strip_holder_norm(monge_ampere_apply(f1), 0, s), 2 * n1 * n1 * 1.05);
    EXPECT_LE(strip_holder_norm(monge_ampere_apply(f1) - monge_ampere_apply(f2), 0, s),
              2 * (n1 + n2) * strip_holder_norm(f1 - f2, 2, s) * 1.05);
  }
}

TEST(Gamma, CrossedCosines) {
  const StripGrid sg(TorusGrid(32, 32), 9);
  const StripField3D f = profile_field(sg, 1.0, 0.0);
  const StripField3D h = profile_field(sg, 0.0, 1.0);
  const StripField3D r = gamma_apply(f, h);
  EXPECT_EQ(strip_sup_norm(gamma_apply(f, StripField3D(sg))), 0.0);
  for (int j = 0; j < 9; ++j) {
    const double s = (1.0 + sg.x3(j)) * (1.0 + sg.x3(j));
    EXPECT_NEAR(r.level(j).coeff(1, 1).real(), 16 * std::pow(kPi, 4) * s / 4, 1e-10);
    EXPECT_NEAR(r.level(j).coeff(1, -1).real(), 16 * std::pow(kPi, 4) * s / 4, 1e-10);
  }
}
