#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dualwave/radial.hpp"

namespace dualwave {

/// Uniform on [0, 1) from the top 53 bits, identical on every platform.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

struct MixtureOptions {
  int max_components = 3;
  double width_lo = 0.5;
  double width_hi = 2.0;
  double amp_lo = 0.2;
  double amp_hi = 1.5;
  /// Centers are drawn in [0, center_hi]; 0 gives centered Gaussians only.
  double center_hi = 0.0;
};

struct GaussianComponent {
  double amplitude;
  double width;
  double center;
};

/// sum_k c_k exp(-((r - r_k)/s_k)^2).
struct Mixture {
  std::vector<GaussianComponent> components;
  /// Samples the mixture with every width and center multiplied by scale.
  RadialField sample(const GridPtr& grid, double scale = 1.0) const;
};

/// 1..max_components components.
Mixture draw_mixture(std::mt19937_64& rng, const MixtureOptions& opts = {});

inline RadialField random_mixture(const GridPtr& grid, std::mt19937_64& rng, const MixtureOptions& opts = {}) {
  return draw_mixture(rng, opts).sample(grid);
}

}  // namespace dualwave
