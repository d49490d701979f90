#pragma once

#include "dualwave/random_fields.hpp"
#include "dualwave/solver.hpp"

namespace dualwave::detail {

// Unconstrained minimizers satisfy G = 0 only up to discretization error.
inline constexpr double kTolGF = 1.0e-3;

GridPtr grid_of(const SolveConfig& cfg);

/// Restart 0 is a Gaussian of width seed_width; later restarts are seeded mixtures.
Mixture seed_mixture(const SolveConfig& cfg, int restart);

/// Largest radius where |v| exceeds 1e-10 of its peak.
double support_radius(const RadialField& v);

void fill_diagnostics(SolveResult& r, const Nonlinearity& nl, double a);

/// Moves v along its fiber to the minimum of Psi(v_t) over stretches that
/// keep the support inside the box, resolved by the grid and below cap.
RadialField fiber_descend_seed(const RadialField& v, const Nonlinearity& nl, double a, double cap);

/// Lowest fiber value over t in [1, 1e4].
double fiber_floor_min(const RadialField& v, const Nonlinearity& nl);

}  // namespace dualwave::detail
