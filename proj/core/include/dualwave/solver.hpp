#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dualwave/functionals.hpp"
#include "dualwave/nonlinearity.hpp"
#include "dualwave/radial.hpp"

namespace dualwave {

enum class Status { Converged, UnboundedBelow, NonexistenceRegime, MaxIters };

std::string to_string(Status s);

struct SolveConfig {
  int N = 2;
  double R = 20.0;
  int M = 2001;
  double a = 1.0;

  double step0 = 1.0;
  double shrink = 0.5;
  int max_outer = 20000;
  int max_inner = 40;
  double tol_grad = 1.0e-7;
  double tol_G = 1.0e-6;
  /// Default: -1e6 (1 + |Psi(seed)|).
  std::optional<double> unbounded_floor;
  std::uint64_t seed = 1;

  int restarts = 3;
  /// Width of the first Gaussian seed; restarts draw widths around it.
  double seed_width = 1.0;
  /// Allows minimize_sigma on exponential-critical nonlinearities.
  bool experimental = false;
  /// minimize_sigma only: rescale R to adapt_widths times the width of the
  /// normalized seed, keeping M. Ground states concentrate as a -> 0.
  bool adapt_grid = false;
  double adapt_widths = 30.0;

  /// Throws ConfigError on invalid values.
  void validate() const;
  nlohmann::json to_json() const;
  /// Reads the keys present in j over the defaults; unknown keys are rejected.
  static SolveConfig from_json(const nlohmann::json& j, const std::string& path = "solve");
};

struct TrajectoryPoint {
  double kinetic = 0.0;
  double psi = 0.0;
  bool accepted = false;
};

struct SolveResult {
  Status status = Status::MaxIters;
  RadialField field;
  EnergyBreakdown breakdown;
  double a = 0.0;
  /// F(a), sigma(a) or m0(a) estimate. For a vanishing F-minimizer this is 0.
  double energy = 0.0;
  double grad_norm = 0.0;
  double mass_err = 0.0;           // |mass - a| / a
  double G_residual = 0.0;         // |G| / (1 + kinetic)
  double pohozaev_residual = 0.0;  // |pohozaev_residual| / (1 + kinetic)
  double t_v_residual = 0.0;       // |t_v - 1| at the final field (sigma mode)
  int iterations = 0;
  int restart = 0;
  /// The box minimizer has nonnegative energy: the infimum over the whole
  /// space is the t -> 0 limit and is not attained.
  bool vanishing = false;
  std::vector<TrajectoryPoint> trajectory;

  explicit SolveResult(RadialField f) : field(std::move(f)) {}

  /// {status, a, psi, lambda, mass_err, G_residual, pohozaev_residual, iterations, field_ref}
  nlohmann::json to_json(const std::string& field_ref = "") const;
};

/// F(a) = inf over S_a of Psi for the pure power p.
SolveResult minimize_F(double a, double p, const SolveConfig& cfg);

struct ThresholdPoint {
  double a = 0.0;
  Status status = Status::MaxIters;
  double energy = 0.0;
  bool certified_negative = false;
};

struct ThresholdResult {
  double a_star = 0.0;
  double a_star_star = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double eps_neg = 0.0;
  std::vector<ThresholdPoint> scan;  // sorted by a
  int monotonicity_violations = 0;
  double max_abs_below = 0.0;  // max |F| over scanned a < a_star
  nlohmann::json to_json() const;
};

/// Scans a log grid of scan_points values in [a_lo, a_hi], then bisects in
/// log a on F(a) < -eps_neg until hi/lo - 1 <= tol.
/// Throws NoSignChange when the bracket does not straddle the sign change.
ThresholdResult find_a_star(double p, int N, double a_lo, double a_hi, double tol, const SolveConfig& cfg,
                            int scan_points = 9);

/// sigma(a) = inf over S_a with G = 0 of Psi.
SolveResult minimize_sigma(double a, const Nonlinearity& nl, const SolveConfig& cfg);

struct RegimeReport {
  Regime regime = Regime::MassSupercritical;
  bool sigma_permitted = false;
  /// Recombined sign identity on random fields (N = 3, mu1 >= 12 only).
  int identity_samples = 0;
  double identity_max_residual = 0.0;
  double max_pinch_integral = 0.0;  // max of int (mu1 H - h f); must be <= 0
  nlohmann::json to_json() const;
};

RegimeReport classify_and_guard(const Nonlinearity& nl, int N, int identity_samples = 100,
                                std::uint64_t seed = 1);

struct CurveRow {
  double a = 0.0;
  Status status = Status::MaxIters;
  double psi = 0.0;
  double lambda = 0.0;
  double G_residual = 0.0;
  std::string error;  // set when the solve threw
};

struct CurveTable {
  std::vector<CurveRow> rows;  // sorted by a
  int monotonicity_violations = 0;
};

/// Solves run in parallel over a (DUALWAVE_THREADS caps the worker count).
CurveTable scan_F_curve(const std::vector<double>& a_list, double p, const SolveConfig& cfg);
CurveTable scan_sigma_curve(const std::vector<double>& a_list, const Nonlinearity& nl, const SolveConfig& cfg);

/// Worker count from DUALWAVE_THREADS, else the hardware concurrency.
int worker_count();

}  // namespace dualwave
