#include "solve_common.hpp"

#include <cmath>
#include <limits>

#include "dualwave/error.hpp"
#include "dualwave/scalings.hpp"

namespace dualwave::detail {

GridPtr grid_of(const SolveConfig& cfg) { return make_grid(cfg.N, cfg.R, cfg.M); }

Mixture seed_mixture(const SolveConfig& cfg, int restart) {
  if (restart == 0) return Mixture{{{1.0, cfg.seed_width, 0.0}}};
  std::mt19937_64 rng(cfg.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(restart));
  MixtureOptions opts;
  opts.width_lo = 0.5 * cfg.seed_width;
  opts.width_hi = 2.0 * cfg.seed_width;
  opts.center_hi = 0.5 * cfg.seed_width;
  return draw_mixture(rng, opts);
}

double support_radius(const RadialField& v) {
  const double peak = v.max_abs();
  const auto& g = v.grid();
  for (int i = g.M - 1; i >= 0; --i)
    if (std::abs(v[i]) > 1.0e-10 * peak) return g.nodes[i];
  return 0.0;
}

void fill_diagnostics(SolveResult& r, const Nonlinearity& nl, double a) {
  r.a = a;
  r.breakdown = breakdown(r.field, nl, a);
  const auto& b = r.breakdown;
  r.mass_err = std::abs(b.mass - a) / a;
  r.G_residual = std::abs(b.G) / (1.0 + b.kinetic);
  r.pohozaev_residual = std::abs(pohozaev_residual(r.field, nl, b.lambda)) / (1.0 + b.kinetic);
}

// Moves v along its fiber to the minimum of Psi(v_t) over stretches that
// keep the support inside the box and resolved by the grid.
RadialField fiber_descend_seed(const RadialField& v, const Nonlinearity& nl, double a, double cap) {
  const FiberProfile fp(v, nl);
  const auto& g = v.grid();
  const double support = support_radius(v);
  const double t_lo = std::max(1.0e-3, support / (0.9 * g.R));
  const double t_hi = std::max(t_lo, std::min(1.0e3, support / (20.0 * g.h)));
  double best_t = 1.0;
  double best = fp.psi(1.0);
  const int n = 201;
  for (int k = 0; k < n; ++k) {
    const double t = t_lo * std::pow(t_hi / t_lo, static_cast<double>(k) / (n - 1));
    double val;
    try {
      val = fp.psi(t);
    } catch (const RangeError&) {
      continue;
    }
    const double kin_t = t * t * (fp.kinetic() - fp.dual_kinetic() + std::pow(t, g.N) * fp.dual_kinetic());
    if (kin_t >= cap) continue;
    if (val < best) {
      best = val;
      best_t = t;
    }
  }
  if (best_t == 1.0 || !(best < 0.0)) return v;
  return mass_project(stretch(v, best_t), a);
}

double fiber_floor_min(const RadialField& v, const Nonlinearity& nl) {
  const FiberProfile fp(v, nl);
  double lowest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 64; ++k) {
    const double t = std::pow(1.0e4, k / 63.0);
    lowest = std::min(lowest, fp.psi(t));
  }
  return lowest;
}

}  // namespace dualwave::detail
