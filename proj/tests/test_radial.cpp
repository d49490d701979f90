#include <cmath>

#include <gtest/gtest.h>

#include "dualwave/error.hpp"
#include "dualwave/radial.hpp"
#include "oracles.hpp"

using namespace dualwave;

TEST(Grid, WeightSums) {
  const auto g2 = make_grid(2, 1.0, 1001);
  double s = 0;
  for (double w : g2->weights) s += w;
  EXPECT_NEAR(s, M_PI, 1e-5);
  const auto g3 = make_grid(3, 2.0, 2001);
  s = 0;
  for (double w : g3->weights) s += w;
  EXPECT_NEAR(s, 4.0 * M_PI / 3.0 * 8.0, 1e-3);
  EXPECT_NEAR(g3->ball_volume(), 4.0 * M_PI / 3.0 * 8.0, 1e-12);
}

TEST(Grid, InvalidParameters) {
  EXPECT_THROW(make_grid(2, 1.0, 2), ConfigError);
  EXPECT_THROW(make_grid(4, 1.0, 10), ConfigError);
  EXPECT_THROW(make_grid(2, -1.0, 10), ConfigError);
  EXPECT_THROW(make_grid(2, 0.0, 10), ConfigError);
}

TEST(Grid, NodesUniform) {
  const auto g = make_grid(3, 5.0, 11);
  ASSERT_EQ(g->nodes.size(), 11u);
  EXPECT_EQ(g->nodes.front(), 0.0);
  EXPECT_DOUBLE_EQ(g->nodes.back(), 5.0);
  EXPECT_DOUBLE_EQ(g->h, 0.5);
}

TEST(Integrate, ConstantsZerosAndGaussian) {
  const auto g = make_grid(2, 1.0, 1001);
  EXPECT_NEAR(integrate(*g, std::vector<double>(1001, 1.0)), M_PI, 1e-5);
  EXPECT_EQ(integrate(*g, std::vector<double>(1001, 0.0)), 0.0);
  const auto g8 = make_grid(2, 8.0, 4001);
  std::vector<double> s(4001);
  for (int i = 0; i < 4001; ++i) s[i] = std::exp(-g8->nodes[i] * g8->nodes[i]);
  EXPECT_NEAR(integrate(*g8, s), M_PI * (1 - std::exp(-64.0)), 1e-6);
}

TEST(Integrate, LengthMismatch) {
  const auto g = make_grid(2, 1.0, 11);
  EXPECT_THROW(integrate(*g, std::vector<double>(10, 1.0)), ShapeError);
}

TEST(Integrate, ThreeDimensionalGaussian) {
  const auto g = make_grid(3, 8.0, 4001);
  std::vector<double> s(4001);
  for (int i = 0; i < 4001; ++i) s[i] = std::exp(-g->nodes[i] * g->nodes[i]);
  EXPECT_NEAR(integrate(*g, s), std::pow(M_PI, 1.5), 1e-5);
}

TEST(Kinetic, ZeroAndGaussianClosedForm) {
  const auto g = make_grid(2, 8.0, 2001);
  EXPECT_EQ(kinetic(RadialField::zeros(g)), 0.0);
  const auto v = sample_gaussian(g, 1.0, 1.0);
  EXPECT_NEAR(kinetic(v) / M_PI, 1.0, 2e-3);
  // Independent quadrature of |v'|^2 for N = 3.
  const auto g3 = make_grid(3, 8.0, 2001);
  const double ref = oracle::radial_integral(3, [](double r) { return 4 * r * r * std::exp(-2 * r * r); }, 8.0);
  EXPECT_NEAR(kinetic(sample_gaussian(g3, 1.0, 1.0)) / ref, 1.0, 2e-3);
}

TEST(Kinetic, SecondOrderConvergence) {
  auto err = [](int M) {
    const auto g = make_grid(2, 8.0, M);
    return std::abs(kinetic(sample_gaussian(g, 1.0, 1.0)) - M_PI);
  };
  const double e1 = err(201), e2 = err(401);
  EXPECT_GT(e1 / e2, 3.5);
  EXPECT_LT(e1 / e2, 4.5);
}

TEST(Kinetic, NonnegativeAndZeroOnlyForZero) {
  const auto g = make_grid(3, 4.0, 101);
  std::vector<double> vals(101);
  for (int i = 0; i < 101; ++i) vals[i] = std::sin(3.0 * i) * (i < 100);
  EXPECT_GT(kinetic(RadialField(g, vals)), 0.0);
}

TEST(Gaussian, EndpointsAndErrors) {
  const auto g = make_grid(2, 5.0, 501);
  const auto v = sample_gaussian(g, 2.5, 1.0);
  EXPECT_EQ(v[0], 2.5);
  EXPECT_EQ(v[500], 0.0);
  EXPECT_THROW(sample_gaussian(g, 1.0, 0.0), ConfigError);
  EXPECT_THROW(sample_gaussian(g, 1.0, -1.0), ConfigError);
}

TEST(Field, TailForcedAndFiniteRequired) {
  const auto g = make_grid(2, 1.0, 5);
  const RadialField v(g, {1, 1, 1, 1, 1});
  EXPECT_EQ(v[4], 0.0);
  EXPECT_THROW(RadialField(g, {1, 1, 1}), ShapeError);
  EXPECT_ANY_THROW(RadialField(g, {1, NAN, 1, 1, 1}));
}

TEST(Field, LinearInterpolation) {
  const auto g = make_grid(2, 4.0, 5);
  const RadialField v(g, {4, 3, 2, 1, 0});
  EXPECT_DOUBLE_EQ(v.at(0.5), 3.5);
  EXPECT_EQ(v.at(10.0), 0.0);
}

TEST(Resample, IdentityZeroAndChangeOfVariables) {
  const auto g = make_grid(2, 16.0, 4001);
  const auto v = sample_gaussian(g, 1.0, 1.5);
  EXPECT_EQ(resample(v, 1.0), v);
  EXPECT_EQ(resample(RadialField::zeros(g), 3.0), RadialField::zeros(g));
  auto sq = [&](const RadialField& w) {
    std::vector<double> s(w.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = w[i] * w[i];
    return integrate(w.grid(), s);
  };
  for (double t : {0.5, 2.0}) EXPECT_NEAR(sq(resample(v, t)) / (std::pow(t, -2.0) * sq(v)), 1.0, 1e-4);
}

TEST(Serialization, JsonRoundTripAndCsv) {
  const auto g = make_grid(3, 2.0, 7);
  const auto v = sample_gaussian(g, 0.7, 0.9);
  const auto j = field_to_json(v);
  const auto w = field_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(w.grid().N, 3);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(w[i], v[i]);
  const auto csv = field_to_csv(v);
  EXPECT_EQ(csv.rfind("r,value", 0), 0u);
}
