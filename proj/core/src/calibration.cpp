#include "dualwave/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "dualwave/error.hpp"
#include "dualwave/functionals.hpp"
#include "dualwave/random_fields.hpp"

namespace dualwave {

double talenti_S(int panels) {
  // r = tan(theta) maps [0, inf) to [0, pi/2) with smooth integrands:
  //   |grad U|^2 r^2 dr -> sin^4, U^6 r^2 dr -> sin^2 cos^2.
  if (panels < 2 || panels % 2) throw DomainError("talenti_S: panels must be even and >= 2");
  const double h = 0.5 * std::numbers::pi / panels;
  double grad = 0.0, six = 0.0;
  for (int k = 0; k <= panels; ++k) {
    const double th = k * h;
    const double wk = (k == 0 || k == panels) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    const double s = std::sin(th), c = std::cos(th);
    grad += wk * s * s * s * s;
    six += wk * s * s * c * c;
  }
  grad *= 4.0 * std::numbers::pi * h / 3.0;
  six *= 4.0 * std::numbers::pi * h / 3.0;
  return grad / std::cbrt(six);
}

nlohmann::json GnCalibration::to_json() const {
  return {{"N", N}, {"exponent", exponent}, {"l1", l1}, {"samples", samples},
          {"seed", seed}, {"max_ratio", max_ratio}, {"C", C}};
}

nlohmann::json GnVerification::to_json() const {
  return {{"samples", samples}, {"violations", violations}, {"min_margin", min_margin}};
}

nlohmann::json TmReport::to_json() const {
  return {{"beta", beta}, {"samples", samples}, {"all_finite", all_finite},
          {"max_integral", max_integral}, {"gaussian_integral", gaussian_integral}};
}

namespace {

constexpr double kSafety = 1.05;

MixtureOptions family() {
  MixtureOptions o;
  o.width_lo = 0.3;
  o.width_hi = 2.0;
  o.amp_lo = 0.2;
  o.amp_hi = 3.0;
  o.center_hi = 3.0;
  return o;
}

GridPtr family_grid(int N) { return make_grid(N, 14.0, 1401); }

RadialField draw(const GnCalibration& cal, const GridPtr& grid, std::mt19937_64& rng) {
  RadialField v = random_mixture(grid, rng, family());
  return cal.l1 ? dual_square(v) : v;
}

double ratio(const GnCalibration& cal, const RadialField& u) {
  return cal.l1 ? gn_ratio_l1(u, cal.exponent) : gn_ratio(u, cal.exponent);
}

GnCalibration calibrate(GnCalibration cal) {
  const auto grid = family_grid(cal.N);
  std::mt19937_64 rng(cal.seed);
  for (int k = 0; k < cal.samples; ++k) cal.max_ratio = std::max(cal.max_ratio, ratio(cal, draw(cal, grid, rng)));
  cal.C = std::pow(kSafety * cal.max_ratio, 1.0 / cal.exponent);
  return cal;
}

}  // namespace

GnCalibration calibrate_gn(int N, double s, int samples, std::uint64_t seed) {
  const double crit = N == 2 ? std::numeric_limits<double>::infinity() : 2.0 * N / (N - 2);
  if (!(s > 2.0 && s < crit)) throw DomainError("calibrate_gn: s outside (2, 2^*)");
  return calibrate({N, s, false, samples, seed, 0.0, 0.0});
}

GnCalibration calibrate_gn_l1(int N, double t, int samples, std::uint64_t seed) {
  const double crit = N == 2 ? std::numeric_limits<double>::infinity() : 4.0 * N / (N - 2);
  if (!(t > 2.0 && t < crit)) throw DomainError("calibrate_gn_l1: t outside (2, 2*2^*)");
  return calibrate({N, t, true, samples, seed, 0.0, 0.0});
}

GnVerification verify_gn(const GnCalibration& cal, int samples, std::uint64_t seed) {
  const auto grid = family_grid(cal.N);
  std::mt19937_64 rng(seed);
  GnVerification out;
  out.min_margin = std::numeric_limits<double>::infinity();
  const double cs = std::pow(cal.C, cal.exponent);
  for (int k = 0; k < samples; ++k) {
    const double r = ratio(cal, draw(cal, grid, rng));
    const double margin = 1.0 - r / cs;
    out.min_margin = std::min(out.min_margin, margin);
    if (margin < 0.0) ++out.violations;
    ++out.samples;
  }
  return out;
}

TmReport tm_check(double beta, int samples, std::uint64_t seed) {
  if (!(beta > 0.0)) throw DomainError("tm_check: beta must be positive");
  const auto grid = make_grid(2, 14.0, 1401);
  std::mt19937_64 rng(seed);
  TmReport rep;
  rep.beta = beta;
  rep.all_finite = true;
  rep.gaussian_integral = tm_integral(sample_gaussian(grid, 1.0, 1.0), beta);
  rep.all_finite = std::isfinite(rep.gaussian_integral);
  for (int k = 0; k < samples; ++k) {
    RadialField u = random_mixture(grid, rng, family());
    double l2 = 0.0;
    for (int i = 0; i < grid->M; ++i) l2 += grid->weights[i] * u[i] * u[i];
    const double scale = 1.0 / std::max(std::sqrt(kinetic(u)), std::sqrt(l2));
    std::vector<double> vals(u.values().begin(), u.values().end());
    for (double& x : vals) x *= scale;
    const double value = tm_integral(RadialField(grid, std::move(vals)), beta);
    rep.all_finite = rep.all_finite && std::isfinite(value);
    rep.max_integral = std::max(rep.max_integral, value);
    ++rep.samples;
  }
  return rep;
}

}  // namespace dualwave
