#include "dualwave/random_fields.hpp"

#include <cmath>

#include "dualwave/error.hpp"

namespace dualwave {

RadialField Mixture::sample(const GridPtr& grid, double scale) const {
  if (!(scale > 0.0)) throw ConfigError("Mixture::sample: scale must be positive");
  std::vector<double> values(grid->M, 0.0);
  for (const auto& c : components) {
    const double s = c.width * scale;
    const double r0 = c.center * scale;
    for (int i = 0; i < grid->M; ++i) {
      const double z = (grid->nodes[i] - r0) / s;
      values[i] += c.amplitude * std::exp(-z * z);
    }
  }
  return RadialField(grid, std::move(values));
}

Mixture draw_mixture(std::mt19937_64& rng, const MixtureOptions& opts) {
  if (opts.max_components < 1 || !(opts.width_lo > 0.0) || opts.width_hi < opts.width_lo)
    throw ConfigError("draw_mixture: invalid options");
  const int count = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(opts.max_components));
  Mixture m;
  for (int k = 0; k < count; ++k) {
    GaussianComponent c;
    c.amplitude = uniform(rng, opts.amp_lo, opts.amp_hi);
    c.width = std::exp(uniform(rng, std::log(opts.width_lo), std::log(opts.width_hi)));
    c.center = uniform(rng, 0.0, opts.center_hi);
    m.components.push_back(c);
  }
  return m;
}

}  // namespace dualwave
