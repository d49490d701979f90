#pragma once

#include <limits>
#include <vector>

#include "dualwave/functionals.hpp"
#include "dualwave/solver.hpp"

namespace dualwave::detail {

/// Tridiagonal H^1 metric P = L + sigma W on the free nodes 0..M-2, where
/// L is the Hessian of kinetic/2 and W the node weights. Factorized once.
class Metric {
 public:
  explicit Metric(const RadialGrid& g, double sigma = 1.0);
  double sigma() const { return sigma_; }
  std::vector<double> solve(const std::vector<double>& rhs) const;

 private:
  std::size_t n_;
  double sigma_;
  std::vector<double> lower_;  // Thomas factors
  std::vector<double> diag_;
  std::vector<double> upper_;
};

double dot(const std::vector<double>& x, const std::vector<double>& y);

struct DescentSpec {
  const Nonlinearity* nl = nullptr;
  double a = 1.0;
  bool pohozaev = false;  // adds the constraint G = 0
  double kinetic_cap = std::numeric_limits<double>::infinity();
  double floor = -std::numeric_limits<double>::infinity();
  bool record_trials = false;
};

struct DescentOutcome {
  RadialField field;
  EnergyState state;
  /// sqrt(<g, P^{-1} g> / (1 + kinetic)) for the projected gradient g.
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool unbounded = false;
  std::vector<TrajectoryPoint> trajectory;
};

/// Preconditioned Riemannian gradient descent with Armijo backtracking.
/// v0 must already satisfy the constraints. Throws CapSaturated when
/// max_inner consecutive trials are rejected by the kinetic cap.
DescentOutcome descend(const RadialField& v0, const DescentSpec& spec, const SolveConfig& cfg);

/// Restores mass = a and G = 0 by Newton steps along the metric gradients
/// of both constraints, then projects the mass exactly. Empty on failure.
std::optional<RadialField> pohozaev_retract(const RadialField& w, const Nonlinearity& nl, double a,
                                            const Metric& metric);

}  // namespace dualwave::detail
