#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dualwave/error.hpp"
#include "dualwave/functionals.hpp"
#include "dualwave/random_fields.hpp"
#include "dualwave/scalings.hpp"

using namespace dualwave;

TEST(MassProject, ExactAndIdempotent) {
  const auto g = make_grid(2, 12.0, 1201);
  const auto v = sample_gaussian(g, 0.8, 1.3);
  const auto same = mass_project(v, mass(v));
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(same[i], v[i], 1e-12);
  const auto w = mass_project(v, 2.5);
  EXPECT_NEAR(mass(w), 2.5, 2.5e-10);
  const auto w2 = mass_project(w, 2.5);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(w2[i], w[i], 1e-12);
  EXPECT_THROW(mass_project(v, 0.0), DomainError);
  EXPECT_THROW(mass_project(RadialField::zeros(g), 1.0), DomainError);
}

TEST(Stretch, IdentityAndMassInvariance) {
  for (int N : {2, 3}) {
    const auto g = make_grid(N, 24.0, 4001);
    const auto v = mass_project(sample_gaussian(g, 1.0, 1.0), 1.0);
    const auto same = stretch(v, 1.0);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(same[i], v[i], 1e-12);
    for (double t : {0.125, 0.5, 2.0, 8.0}) EXPECT_NEAR(mass(stretch(v, t)), 1.0, 1e-4);
  }
  const auto g = make_grid(2, 4.0, 41);
  EXPECT_THROW(stretch(sample_gaussian(g, 1, 1), 0.0), DomainError);
}

TEST(Stretch, GroupProperty) {
  const auto g = make_grid(2, 24.0, 4001);
  const auto v = mass_project(sample_gaussian(g, 1.0, 1.0), 1.0);
  const auto a = stretch(stretch(v, 2.0), 1.5);
  const auto b = stretch(v, 3.0);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  EXPECT_LE(num / den, 2e-3);
}

TEST(Dilate, MassAndKineticScaling) {
  const auto g = make_grid(2, 30.0, 3001);
  const auto v = sample_gaussian(g, 1.0, 1.0);
  const auto same = dilate(v, 1.0);
  EXPECT_FALSE(same.truncated);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(same.field[i], v[i], 1e-14);
  const auto d = dilate(v, 2.0);
  EXPECT_NEAR(mass(d.field) / mass(v), 2.0, 2e-3);
  EXPECT_NEAR(kinetic(d.field) / kinetic(v), 1.0, 1e-3);
  EXPECT_TRUE(dilate(v, 1e4).truncated);
}

TEST(FindTv, RootAtOneOnManifold) {
  const auto g = make_grid(2, 20.0, 2001);
  const auto nl = Nonlinearity::power(7.0);
  const auto v = mass_project(sample_gaussian(g, 1.0, 1.0), 10.0);
  const auto r = find_tv(v, nl);
  const auto w = stretch(v, r.t);
  EXPECT_NEAR(find_tv(w, nl).t, 1.0, 1e-3);
  EXPECT_EQ(r.sign_changes, 1);
}

TEST(FindTv, MatchesBruteForceScan) {
  const auto g = make_grid(2, 20.0, 2001);
  const auto nl = Nonlinearity::power(7.0);
  const auto v = mass_project(sample_gaussian(g, 1.0, 1.0), 1.0);
  const FiberProfile fp(v, nl);
  const double tv = find_tv(v, nl).t;
  double best_t = 0, best = -INFINITY;
  const int n = 10000;
  for (int k = 0; k < n; ++k) {
    const double t = tv / 10 * std::pow(100.0, static_cast<double>(k) / (n - 1));
    if (fp.psi(t) > best) best = fp.psi(t), best_t = t;
  }
  EXPECT_NEAR(best_t / tv, 1.0, 1e-3);
  EXPECT_GE(fp.psi(tv), best - 1e-12 * std::abs(best));
  EXPECT_GT(fp.dpsi(tv / 2), 0.0);
  EXPECT_LT(fp.dpsi(tv * 2), 0.0);
}

TEST(FindTv, StableUnderPerturbation) {
  const auto g = make_grid(2, 20.0, 2001);
  const auto nl = Nonlinearity::power(7.0);
  const auto v = mass_project(sample_gaussian(g, 1.0, 1.0), 1.0);
  std::mt19937_64 rng(9);
  std::vector<double> p(v.values().begin(), v.values().end());
  for (double& x : p) x *= 1 + 1e-8 * (2 * uniform01(rng) - 1);
  EXPECT_NEAR(find_tv(RadialField(g, p), nl).t / find_tv(v, nl).t, 1.0, 1e-5);
}

TEST(FindTv, NoRootForSubcritical) {
  const auto g = make_grid(2, 20.0, 2001);
  Custom c;
  c.h = [](double) { return 0.0; };
  c.H = [](double) { return 0.0; };
  EXPECT_THROW(find_tv(sample_gaussian(g, 1, 1), Nonlinearity::custom(c)), NoFiberRoot);
  EXPECT_THROW(find_tv(RadialField::zeros(g), Nonlinearity::power(7)), DomainError);
}
