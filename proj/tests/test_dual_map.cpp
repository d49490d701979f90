#include <cmath>

#include <gtest/gtest.h>

#include "dualwave/dual_map.hpp"
#include "dualwave/error.hpp"
#include "oracles.hpp"

using namespace dualwave;

TEST(DualMap, InverseAtZero) { EXPECT_EQ(f_inverse(0.0), 0.0); }

TEST(DualMap, InverseAtOneMatchesQuadrature) {
  const double q = oracle::f_inverse(1.0);
  EXPECT_NEAR(q, std::sqrt(3.0) / 2.0 + std::asinh(std::sqrt(2.0)) / (2.0 * std::sqrt(2.0)), 1e-12);
  EXPECT_NEAR(f_inverse(1.0), q, 1e-6);
  EXPECT_NEAR(f_inverse(1.0), 1.2712739, 1e-6);
}

TEST(DualMap, InverseSmallArgumentSeries) {
  const double s = 1e-3;
  EXPECT_NEAR(f_inverse(s), s + s * s * s / 3.0, 1e-12);
}

TEST(DualMap, EvalRoundTrip) {
  EXPECT_NEAR(f_eval(1.2712739), 1.0, 1e-6);
  EXPECT_EQ(f_eval(0.0), 0.0);
  for (double t : {1e-5, 0.3, 2.0, 17.0, 400.0, 9e3, 3e4}) EXPECT_NEAR(f_inverse(f_eval(t)), t, 1e-10 * (1 + t));
}

TEST(DualMap, EvalAgainstBisectionOracle) {
  for (double t : {0.01, 0.5, 1.0, 3.0, 25.0}) EXPECT_NEAR(f_eval(t), oracle::f(t), 1e-9 * (1 + t));
}

TEST(DualMap, LargeArgumentAsymptote) { EXPECT_NEAR(f_eval(1e6), std::pow(2.0, 0.25) * 1e3, 0.5); }

TEST(DualMap, BeyondTableUsesAsymptoticSeed) {
  const double t = 5e7;
  EXPECT_NEAR(f_inverse(f_eval(t)), t, 1e-9 * t);
}

TEST(DualMap, OddBitExact) {
  for (double t : {1e-6, 0.2, 1.0, 7.5, 1e3, 1e6}) {
    EXPECT_EQ(f_eval(-t), -f_eval(t));
    EXPECT_EQ(f_prime(-t), f_prime(t));
    EXPECT_EQ(f_inverse(-t), -f_inverse(t));
  }
}

TEST(DualMap, MonotoneOnLogGrid) {
  double prev = 0.0;
  for (int k = 0; k <= 400; ++k) {
    const double t = std::pow(10.0, -6.0 + 12.0 * k / 400.0);
    const double f = f_eval(t);
    EXPECT_GT(f, prev);
    prev = f;
  }
}

TEST(DualMap, PrimeBoundsAndDerivative) {
  EXPECT_EQ(f_prime(0.0), 1.0);
  for (double t : {0.5, 5.0, 500.0}) {
    EXPECT_LE(f_prime(t), 1.0);
    EXPECT_LE(f_prime(-t), 1.0);
  }
  const double eps = 1e-5;
  EXPECT_NEAR((f_eval(1 + eps) - f_eval(1 - eps)) / (2 * eps), f_prime(1.0), 1e-6);
}

TEST(DualMap, UpperEnvelope) {
  for (double t : {1e-3, 0.1, 1.0, 10.0, 1e4}) {
    const double f = f_eval(t);
    EXPECT_LE(f, t * (1 + 1e-15));
    EXPECT_LE(f, std::pow(2.0, 0.25) * std::sqrt(t) * (1 + 1e-15));
  }
}

TEST(DualMap, NamedProperties) {
  const double t = 2.0;
  const double f = f_eval(t), fp = f_prime(t);
  EXPECT_LE(f * f / 2, t * f * fp);
  EXPECT_LE(t * f * fp, f * f);
  const double T = 1e3;
  EXPECT_LE(std::abs(f_eval(T) * f_prime(T)), 1 / std::sqrt(2.0));
  EXPECT_NEAR(f_eval(1e-6) / 1e-6, 1.0, 1e-9);
}

TEST(DualMap, NonFiniteRejected) {
  EXPECT_THROW(f_eval(std::nan("")), DomainError);
  EXPECT_THROW(f_eval(INFINITY), DomainError);
  EXPECT_THROW(f_inverse(std::nan("")), DomainError);
}

TEST(DualMap, PropertyReportAllPass) {
  const auto rep = check_f_properties(default_dual_map(), 2000);
  EXPECT_TRUE(rep.all_passed());
  EXPECT_GT(rep.lower_constant, 0.0);
  for (const auto& it : rep.items) EXPECT_TRUE(it.passed) << it.item << " " << it.statement;
  EXPECT_THROW(check_f_properties(default_dual_map(), 0), ConfigError);
}

TEST(DualMap, SpanEvalMatchesScalar) {
  const std::vector<double> t = {-3.0, 0.0, 0.25, 11.0};
  std::vector<double> out(t.size());
  default_dual_map().eval(t, out);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(out[i], f_eval(t[i]));
}
