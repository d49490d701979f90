#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dualwave/dual_map.hpp"
#include "dualwave/error.hpp"
#include "dualwave/functionals.hpp"
#include "dualwave/random_fields.hpp"
#include "dualwave/scalings.hpp"
#include "oracles.hpp"

using namespace dualwave;

namespace {

RadialField unit_gaussian(int N, double R = 10.0, int M = 1001) {
  return mass_project(sample_gaussian(make_grid(N, R, M), 1.0, 1.0), 1.0);
}

Nonlinearity zero_nl() {
  Custom c;
  c.h = [](double) { return 0.0; };
  c.H = [](double) { return 0.0; };
  return Nonlinearity::custom(c);
}

Nonlinearity quadratic_nl() {
  Custom c;
  c.h = [](double t) { return t; };
  c.H = [](double t) { return 0.5 * t * t; };
  return Nonlinearity::custom(c);
}

}  // namespace

TEST(Mass, ZeroSymmetricAndRefined) {
  const auto g = make_grid(2, 20.0, 2001);
  EXPECT_EQ(mass(RadialField::zeros(g)), 0.0);
  const auto v = sample_gaussian(g, 1.0, 1.0);
  std::vector<double> neg(v.values().begin(), v.values().end());
  for (double& x : neg) x = -x;
  EXPECT_EQ(mass(RadialField(g, neg)), mass(v));
  const double fine = mass(sample_gaussian(make_grid(2, 20.0, 20001), 1.0, 1.0));
  EXPECT_NEAR(mass(v) / fine, 1.0, 1e-4);
  const double ref = oracle::radial_integral(2, [](double r) {
    const double f = oracle::f(std::exp(-r * r));
    return f * f;
  }, 20.0, 4000);
  EXPECT_NEAR(mass(v) / ref, 1.0, 1e-4);
}

TEST(Psi, ZeroAndFreeCase) {
  const auto v = unit_gaussian(2);
  EXPECT_EQ(psi(RadialField::zeros(v.grid_ptr()), Nonlinearity::power(3)), 0.0);
  EXPECT_DOUBLE_EQ(psi(v, zero_nl()), 0.5 * kinetic(v));
  EXPECT_LT(psi(v, Nonlinearity::sobolev_critical(3.0, 2.0)), psi(v, Nonlinearity::sobolev_critical(3.0, 1.0)));
}

TEST(Breakdown, ConsistentParts) {
  const auto v = unit_gaussian(3);
  const auto nl = Nonlinearity::power(6.0);
  const auto b = breakdown(v, nl, 1.0);
  EXPECT_DOUBLE_EQ(b.psi, 0.5 * b.kinetic - b.potential);
  EXPECT_NEAR(b.mass, 1.0, 1e-12);
  EXPECT_THROW(breakdown(v, nl, 0.0), DomainError);
  EXPECT_THROW(lagrange_lambda(v, nl, -1.0), DomainError);
}

TEST(Pohozaev, DegenerateBracketAndFiberIdentity) {
  const auto v = unit_gaussian(2);
  EXPECT_EQ(pohozaev_G(RadialField::zeros(v.grid_ptr()), Nonlinearity::power(7)), 0.0);
  EXPECT_NEAR(pohozaev_G(v, quadratic_nl()), kinetic(v) + dual_kinetic(v), 1e-10 * kinetic(v));
  const auto nl = Nonlinearity::power(7.0);
  EXPECT_NEAR(fiber_dpsi(v, nl, 1.0), pohozaev_G(v, nl), 1e-10 * std::abs(pohozaev_G(v, nl)));
}

TEST(Pohozaev, ResidualTwoDimensionalDropsKinetic) {
  const auto v = unit_gaussian(2);
  const auto nl = Nonlinearity::power(7.0);
  EXPECT_EQ(pohozaev_residual(RadialField::zeros(v.grid_ptr()), nl, 3.0), 0.0);
  const double lam = -2.0;
  EXPECT_NEAR(pohozaev_residual(v, nl, lam), -lam * mass(v) - 2.0 * potential(v, nl), 1e-12);
}

TEST(Gradients, MatchFiniteDifferences) {
  const auto g = make_grid(3, 6.0, 61);
  std::mt19937_64 rng(5);
  const auto v = random_mixture(g, rng);
  const auto nl = Nonlinearity::power(6.0);
  const auto st = energy_state(v, nl, true);
  std::vector<double> x(v.values().begin(), v.values().end());
  for (int i : {0, 7, 23, 41}) {
    const double e = 1e-6;
    auto at = [&](double d) {
      auto y = x;
      y[i] += d;
      return energy_state(RadialField(g, y), nl, false);
    };
    const auto p = at(e), m = at(-e);
    EXPECT_NEAR(st.grad_psi[i], (p.psi() - m.psi()) / (2 * e), 1e-6 * (1 + std::abs(st.grad_psi[i])));
    EXPECT_NEAR(st.grad_mass[i], (p.mass - m.mass) / (2 * e), 1e-6 * (1 + std::abs(st.grad_mass[i])));
    EXPECT_NEAR(st.grad_G[i], (p.G() - m.G()) / (2 * e), 1e-5 * (1 + std::abs(st.grad_G[i])));
  }
}

TEST(Fiber, UnitValueVanishingAndDecay) {
  const auto v = unit_gaussian(2, 20.0, 2001);
  const auto p3 = Nonlinearity::power(3.0), p7 = Nonlinearity::power(7.0);
  EXPECT_DOUBLE_EQ(fiber_psi(v, p7, 1.0), psi(v, p7));
  // For p = 3, N = 2 the fiber vanishes linearly in t.
  EXPECT_LE(std::abs(fiber_psi(v, p3, 1e-4)), 1e-4 * std::abs(psi(v, p3)));
  EXPECT_NEAR(fiber_psi(v, p3, 1e-3) / fiber_psi(v, p3, 1e-4), 10.0, 0.1);
  // The fiber of this field peaks near t = 21; past it the decay is monotone.
  const double tv = find_tv(v, p7).t;
  const double f1 = fiber_psi(v, p7, 2.5 * tv), f2 = fiber_psi(v, p7, 5.0 * tv);
  EXPECT_LT(f2, f1);
  EXPECT_LT(f1, 0.0);
}

TEST(Fiber, DerivativeMatchesDifference) {
  const auto v = unit_gaussian(2);
  const auto nl = Nonlinearity::power(7.0);
  const double t = 0.7, e = 1e-5;
  const double num = (fiber_psi(v, nl, t + e) - fiber_psi(v, nl, t - e)) / (2 * e);
  EXPECT_NEAR(fiber_dpsi(v, nl, t), num, 1e-5 * std::abs(num));
  EXPECT_EQ(fiber_dpsi(RadialField::zeros(v.grid_ptr()), nl, 2.0), 0.0);
}

TEST(Fiber, SurplusesAndSplitting) {
  const auto nl = Nonlinearity::power(7.0);
  const auto g = make_grid(2, 10.0, 1001);
  std::mt19937_64 rng(11);
  for (int k = 0; k < 5; ++k) {
    const auto v = random_mixture(g, rng);
    EXPECT_NEAR(surplus_A(v, 1.0), 0.0, 1e-12);
    EXPECT_NEAR(surplus_B(v, nl, 1.0), 0.0, 1e-12);
    const double tol = 1e-10 * (1 + kinetic(v));
    for (double t : {0.25, 0.5, 2.0, 4.0}) {
      EXPECT_GE(surplus_A(v, t), -tol);
      EXPECT_GE(surplus_B(v, nl, t), -tol);
    }
    for (double t : {0.3, 1.0, 3.0}) EXPECT_LE(splitting_residual(v, nl, t), 1e-8);
  }
}

TEST(GagliardoNirenberg, HomogeneityAndZero) {
  const auto g = make_grid(3, 10.0, 1001);
  const auto u = sample_gaussian(g, 1.0, 1.0);
  std::vector<double> s(u.values().begin(), u.values().end());
  for (double& x : s) x *= 3.7;
  const double r1 = gn_ratio(u, 4.0), r2 = gn_ratio(RadialField(g, s), 4.0);
  EXPECT_NEAR(r1, r2, 1e-12 * r1);
  EXPECT_EQ(gn_check(RadialField::zeros(g), 4.0, 1.0), 0.0);
  EXPECT_NEAR(gn_ratio_l1(u, 4.0), gn_ratio_l1(RadialField(g, s), 4.0), 1e-10 * gn_ratio_l1(u, 4.0));
}

TEST(TrudingerMoser, ZeroAndGaussianClosedForm) {
  const auto g = make_grid(2, 10.0, 2001);
  EXPECT_EQ(tm_integral(RadialField::zeros(g), 1.0), 0.0);
  // int (exp(beta e^{-2 r^2}) - 1) dx = (pi/2) sum beta^k / (k k!)
  const double beta = 2.0;
  double ref = 0, term = 1;
  for (int k = 1; k < 40; ++k) {
    term *= beta / k;
    ref += term / k;
  }
  ref *= M_PI / 2;
  EXPECT_NEAR(tm_integral(sample_gaussian(g, 1.0, 1.0), beta) / ref, 1.0, 1e-4);
  EXPECT_THROW(tm_integral(sample_gaussian(g, 30.0, 1.0), 1.0), RangeError);
}
