#include <cmath>

#include <gtest/gtest.h>

#include "dualwave/calibration.hpp"
#include "dualwave/error.hpp"
#include "dualwave/geometry.hpp"

using namespace dualwave;

namespace {

// rho_a(t) = 1/2 - a^{3/4} t^{-1/4} - t^2 for p = 3, A = B = 1, maximized by
// golden section on log t.
double rho3(double a, double t) { return 0.5 - std::pow(a, 0.75) * std::pow(t, -0.25) - t * t; }

double argmax3(double a) {
  double lo = std::log(1e-6), hi = std::log(1e3);
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 200; ++it) {
    const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    if (rho3(a, std::exp(x1)) < rho3(a, std::exp(x2)))
      lo = x1;
    else
      hi = x2;
  }
  return std::exp(0.5 * (lo + hi));
}

}  // namespace

TEST(Geometry, HarnessUnits) {
  const auto geo = sobolev_geometry_AB(3.0, 1.0, 1.0, 1.0);
  EXPECT_NEAR(geo.t_star, std::pow(8.0, -4.0 / 9.0), 1e-6);
  EXPECT_NEAR(geo.t_star, argmax3(1.0), 1e-6);
  EXPECT_NEAR(geo.rho_max, -0.91741, 1e-5);
  EXPECT_NEAR(geo.rho_max, rho3(1.0, argmax3(1.0)), 1e-10);
  EXPECT_NEAR(geo.K0, 1.41741, 1e-5);
  EXPECT_NEAR(geo.a_tilde0, 0.20952, 1e-4);
  EXPECT_NEAR(geo.rho_max, geo.rho_max_closed, 1e-10);
  EXPECT_NEAR(geo.t_star, geo.t_star_foc, 1e-7);
}

TEST(Geometry, ZeroMaximumAtThreshold) {
  const auto geo = sobolev_geometry_AB(3.0, 1.0, 1.0, 1.0);
  EXPECT_NEAR(geo.rho_at(geo.a_tilde0, geo.argmax_at(geo.a_tilde0)), 0.0, 1e-10);
  EXPECT_NEAR(geo.t_star0, geo.argmax_at(geo.a_tilde0), 1e-7);
}

TEST(Geometry, RhoDivergesAtBothEnds) {
  const auto geo = sobolev_geometry_AB(3.0, 1.0, 1.0, 1.0);
  EXPECT_LT(geo.rho(1e-12), -100.0);
  EXPECT_LT(geo.rho(1e6), -100.0);
}

TEST(Geometry, ExponentRange) {
  EXPECT_THROW(sobolev_geometry_AB(2.0, 1.0, 1.0, 1.0), ConfigError);
  EXPECT_THROW(sobolev_geometry_AB(10.0 / 3.0, 1.0, 1.0, 1.0), ConfigError);
  EXPECT_THROW(sobolev_geometry(3.0, 1.0, 0.0, 1.0), ConfigError);
}

TEST(Geometry, LowerBoundHolds) {
  const auto geo = sobolev_geometry_AB(3.0, 1.0, 1.0, 1.0);
  const auto chk = check_lower_bound(geo, 30, 4);
  EXPECT_EQ(chk.samples, 30);
  EXPECT_EQ(chk.violations, 0);
  EXPECT_GE(chk.min_margin, -1e-10);
}

TEST(Geometry, LocalMinimizerPrecondition) {
  const auto geo = sobolev_geometry_AB(3.0, 1.0, 1.0, 1.0);
  SolveConfig cfg;
  cfg.N = 3;
  EXPECT_THROW(local_minimize_m0(geo.a_tilde0, 3.0, cfg, geo), ConfigError);
  cfg.N = 2;
  EXPECT_THROW(local_minimize_m0(geo.a_tilde0 / 4, 3.0, cfg, geo), ConfigError);
}

TEST(Calibration, TalentiConstant) {
  // Best constant of |grad u|_2^2 >= S |u|_6^2 in R^3.
  EXPECT_NEAR(talenti_S(), 3.0 * std::pow(M_PI / 2.0, 4.0 / 3.0), 1e-8);
}

TEST(Calibration, FreshSampleHasNoViolations) {
  const auto cal = calibrate_gn(3, 4.0, 100, 1);
  EXPECT_GT(cal.C, 0.0);
  const auto ver = verify_gn(cal, 100, 2);
  EXPECT_EQ(ver.violations, 0);
  EXPECT_GT(ver.min_margin, 0.0);
}

TEST(ExpBound, LambdaMaxClosedForm) {
  EXPECT_DOUBLE_EQ(lambda_max(8.0, 1.0), 0.03515625);
  EXPECT_GT(lambda_max(8.0, 1.0), lambda_max(8.0, 10.0));
  EXPECT_GT(lambda_max(8.0, 10.0), lambda_max(8.0, 100.0));
  // Direct maximization of (p-2) t^2/(2p) - xi t^{p-4}.
  double best = 0;
  for (int k = 1; k < 200000; ++k) {
    const double t = k * 1e-5;
    best = std::max(best, 6.0 * t * t / 16.0 - 3.0 * std::pow(t, 4));
  }
  EXPECT_NEAR(lambda_max(8.0, 3.0), best, 1e-9);
}

TEST(ExpBound, PreconditionsAndReference) {
  SolveConfig cfg;
  cfg.N = 2;
  cfg.M = 801;
  cfg.adapt_grid = true;
  const auto ref = build_reference(1.0, 8.0, cfg);
  ASSERT_EQ(ref.status, Status::Converged);
  const auto rc = check_reference(ref, 8.0);
  EXPECT_TRUE(rc.passed);
  EXPECT_GT(rc.m_star, 0.0);
  EXPECT_LT(rc.lambda, 0.0);
  const auto xs = xi_star(8.0, 1.0, ref);
  EXPECT_THROW(exp_level_bound(1.0, Nonlinearity::exp_critical(1.0, 0.5 * xs.value, 8.0), ref), ConfigError);
  EXPECT_THROW(exp_level_bound(1.0, Nonlinearity::power(8.0), ref), ConfigError);
  const auto rep = exp_level_bound(1.0, Nonlinearity::exp_critical(1.0, 2.0 * xs.value, 8.0), ref);
  EXPECT_NEAR(rep.bound, 4.0 * 8.0 / 2.0 * rep.m_star * rep.lambda_max, 1e-12 * rep.bound);
  EXPECT_THROW(build_reference(1.0, 5.0, cfg), ConfigError);
}
