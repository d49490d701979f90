#include <cmath>

#include <gtest/gtest.h>

#include "dualwave/error.hpp"
#include "dualwave/nonlinearity.hpp"

using namespace dualwave;

TEST(Nonlinearity, PowerValues) {
  const auto nl = Nonlinearity::power(3.0);
  EXPECT_DOUBLE_EQ(nl.h(2.0), 4.0);
  EXPECT_DOUBLE_EQ(nl.H(2.0), 8.0 / 3.0);
}

TEST(Nonlinearity, SobolevCriticalValues) {
  const auto nl = Nonlinearity::sobolev_critical(3.0, 1.0);
  EXPECT_DOUBLE_EQ(nl.h(1.0), 2.0);
  EXPECT_DOUBLE_EQ(nl.H(1.0), 5.0 / 12.0);
}

TEST(Nonlinearity, ExpCriticalValue) {
  const auto nl = Nonlinearity::exp_critical(1.0, 1.0, 8.0);
  EXPECT_NEAR(nl.H(1.0), std::exp(1.0), 1e-12);
  EXPECT_THROW(nl.H(6.0), RangeError);
}

TEST(Nonlinearity, ParityBitExact) {
  for (const auto& nl : {Nonlinearity::power(7.0), Nonlinearity::sobolev_critical(3.0),
                         Nonlinearity::exp_critical(1.0, 2.0, 8.0)}) {
    for (double t : {1e-3, 0.4, 1.0, 2.5}) {
      EXPECT_EQ(nl.h(-t), -nl.h(t));
      EXPECT_EQ(nl.H(-t), nl.H(t));
      EXPECT_GT(nl.H(t), 0.0);
    }
  }
}

TEST(Nonlinearity, PowerPinchExact) {
  const auto nl = Nonlinearity::power(7.0);
  for (double t : {1e-2, 0.5, 3.0, 40.0}) EXPECT_NEAR(t * nl.h(t) / nl.H(t), 7.0, 1e-13);
}

TEST(Nonlinearity, ExpRatioIdentity) {
  const auto nl = Nonlinearity::exp_critical(1.0, 1.0, 8.0);
  for (double t : {0.5, 1.0, 2.0}) EXPECT_NEAR(t * nl.h(t) / nl.H(t), 8.0 + 4.0 * std::pow(t, 4), 1e-10);
}

TEST(Nonlinearity, HprimeMatchesDifference) {
  const auto nl = Nonlinearity::power(5.0);
  const double t = 1.3, e = 1e-6;
  EXPECT_NEAR(nl.hprime(t), (nl.h(t + e) - nl.h(t - e)) / (2 * e), 1e-6);
}

TEST(Nonlinearity, JsonRoundTrip) {
  for (const auto& nl : {Nonlinearity::power(7.0), Nonlinearity::sobolev_critical(3.0, 2.0),
                         Nonlinearity::exp_critical(1.0, 0.5, 8.0)}) {
    const auto back = Nonlinearity::from_json(nl.to_json());
    EXPECT_EQ(back.to_json(), nl.to_json());
  }
  EXPECT_THROW(Nonlinearity::from_json({{"variant", "bogus"}}), ConfigError);
  EXPECT_THROW(Nonlinearity::from_json({{"variant", "power"}}), ConfigError);
}

TEST(Classify, Regimes) {
  EXPECT_EQ(growth_classify(Nonlinearity::power(3.0), 2), Regime::MassSubcritical);
  EXPECT_EQ(growth_classify(Nonlinearity::power(5.0), 2), Regime::MassCriticalBand);
  EXPECT_EQ(growth_classify(Nonlinearity::power(7.0), 2), Regime::MassSupercritical);
  EXPECT_EQ(growth_classify(Nonlinearity::power(12.0), 3), Regime::Nonexistence);
  EXPECT_EQ(growth_classify(Nonlinearity::power(6.0), 2), Regime::UnsupportedBoundary);
  EXPECT_EQ(growth_classify(Nonlinearity::sobolev_critical(3.0), 3), Regime::SobolevCritical);
  EXPECT_EQ(growth_classify(Nonlinearity::exp_critical(1, 1, 8), 2), Regime::ExpCritical);
}

TEST(Hypotheses, SupercriticalPowerPasses) {
  EXPECT_TRUE(validate_hypotheses(Nonlinearity::power(7.0), HypothesisSet::HSet, 2).passed());
  EXPECT_TRUE(validate_hypotheses(Nonlinearity::power(5.5), HypothesisSet::HSet, 3).passed());
}

TEST(Hypotheses, ThreeDimensionalUpperBandIsStrict) {
  EXPECT_FALSE(validate_hypotheses(Nonlinearity::power(6.0), HypothesisSet::HSet, 3).passed());
}

TEST(Hypotheses, SubcriticalPowerFailsBand) {
  const auto rep = validate_hypotheses(Nonlinearity::power(3.0), HypothesisSet::HSet, 2);
  EXPECT_FALSE(rep.passed());
}

TEST(Hypotheses, ExpModelSatisfiesExpSet) {
  const auto nl = Nonlinearity::exp_critical(1.0, 1.0, 8.0);
  EXPECT_TRUE(validate_hypotheses(nl, HypothesisSet::ExpSet, 2).passed());
  EXPECT_TRUE(validate_hypotheses(nl, HypothesisSet::ExpGrowth, 2).passed());
}

TEST(Hypotheses, TooFewSamples) {
  EXPECT_THROW(validate_hypotheses(Nonlinearity::power(7.0), HypothesisSet::HSet, 2, log_samples(1e-4, 1e3, 10)),
               ConfigError);
}
