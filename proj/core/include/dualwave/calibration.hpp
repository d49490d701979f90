#pragma once

#include <cstdint>

#include <nlohmann/json.hpp>

namespace dualwave {

/// Sobolev constant in S |u|_6^2 <= |grad u|_2^2 on R^3, recomputed by
/// quadrature of the Aubin-Talenti profile (1 + r^2)^{-1/2}.
double talenti_S(int panels = 4096);

struct GnCalibration {
  int N = 3;
  double exponent = 4.0;  // s, or t for the L^1 form
  bool l1 = false;        // L^1 form, applied to u = f(v)^2
  int samples = 0;
  std::uint64_t seed = 0;
  double max_ratio = 0.0;
  double C = 0.0;  // C^exponent = 1.05 max_ratio
  nlohmann::json to_json() const;
};

/// Sup of the Gagliardo-Nirenberg ratio over random Gaussian mixtures.
GnCalibration calibrate_gn(int N, double s, int samples = 1000, std::uint64_t seed = 1);
GnCalibration calibrate_gn_l1(int N, double t, int samples = 1000, std::uint64_t seed = 1);

struct GnVerification {
  int samples = 0;
  int violations = 0;
  double min_margin = 0.0;  // relative to the right side
  nlohmann::json to_json() const;
};

/// Fresh draws from the calibration family, checked with the calibrated C.
GnVerification verify_gn(const GnCalibration& cal, int samples = 1000, std::uint64_t seed = 2);

struct TmReport {
  double beta = 0.0;
  int samples = 0;
  bool all_finite = false;
  double max_integral = 0.0;
  double gaussian_integral = 0.0;  // unit Gaussian, not normalized
  nlohmann::json to_json() const;
};

/// Trudinger-Moser integral over random fields scaled to |grad u|_2^2 <= 1
/// and |u|_2 <= 1 on an N = 2 grid.
TmReport tm_check(double beta = 2.0 * 3.141592653589793, int samples = 100, std::uint64_t seed = 3);

}  // namespace dualwave
