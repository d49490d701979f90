#include "dualwave/radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "dualwave/error.hpp"

namespace dualwave {

double RadialGrid::ball_volume() const { return omega * std::pow(R, N) / N; }

GridPtr make_grid(int N, double R, int M) {
  if (N != 2 && N != 3) throw ConfigError(fmt::format("grid: N must be 2 or 3, got {}", N));
  if (!(R > 0.0) || !std::isfinite(R)) throw ConfigError("grid: R must be positive and finite");
  if (M < 3) throw ConfigError(fmt::format("grid: M must be >= 3, got {}", M));

  auto g = std::make_shared<RadialGrid>();
  g->N = N;
  g->R = R;
  g->M = M;
  g->h = R / (M - 1);
  g->omega = N == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
  g->nodes.resize(M);
  g->weights.resize(M);
  g->cell_weights.resize(M - 1);
  for (int i = 0; i < M; ++i) g->nodes[i] = i == M - 1 ? R : i * g->h;
  for (int i = 0; i < M; ++i) {
    const double trap = (i == 0 || i == M - 1) ? 0.5 : 1.0;
    g->weights[i] = g->omega * std::pow(g->nodes[i], N - 1) * g->h * trap;
  }
  if (N == 2) g->weights[0] = g->omega * g->h * g->h / 12.0;
  for (int j = 0; j < M - 1; ++j) {
    const double mid = (j + 0.5) * g->h;
    g->cell_weights[j] = g->omega * std::pow(mid, N - 1) * g->h;
  }
  return g;
}

double integrate(const RadialGrid& grid, std::span<const double> samples) {
  if (samples.size() != grid.weights.size())
    throw ShapeError(fmt::format("integrate: expected {} samples, got {}", grid.weights.size(), samples.size()));
  double sum = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) sum += grid.weights[i] * samples[i];
  return sum;
}

RadialField::RadialField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw ConfigError("field: null grid");
  if (values_.size() != static_cast<std::size_t>(grid_->M))
    throw ShapeError(fmt::format("field: expected {} values, got {}", grid_->M, values_.size()));
  for (double x : values_)
    if (!std::isfinite(x)) throw DomainError("field: non-finite value");
  values_.back() = 0.0;
}

RadialField RadialField::zeros(GridPtr grid) {
  const auto m = static_cast<std::size_t>(grid->M);
  return RadialField(std::move(grid), std::vector<double>(m, 0.0));
}

double RadialField::max_abs() const {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::abs(x));
  return m;
}

double RadialField::at(double r) const {
  if (r < 0.0) r = -r;
  const double pos = r / grid_->h;
  if (pos >= grid_->M - 1) return 0.0;
  const auto j = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(j);
  return frac == 0.0 ? values_[j] : values_[j] + frac * (values_[j + 1] - values_[j]);
}

double kinetic(const RadialField& v) {
  const auto& g = v.grid();
  const auto x = v.values();
  double sum = 0.0;
  for (int j = 0; j < g.M - 1; ++j) {
    const double d = (x[j + 1] - x[j]) / g.h;
    sum += g.cell_weights[j] * d * d;
  }
  return sum;
}

RadialField sample_gaussian(const GridPtr& grid, double amplitude, double width) {
  if (!(width > 0.0)) throw ConfigError("sample_gaussian: width must be positive");
  if (!std::isfinite(amplitude)) throw ConfigError("sample_gaussian: amplitude must be finite");
  std::vector<double> vals(grid->M);
  for (int i = 0; i < grid->M; ++i) {
    const double z = grid->nodes[i] / width;
    vals[i] = amplitude * std::exp(-z * z);
  }
  return RadialField(grid, std::move(vals));
}

RadialField resample(const RadialField& v, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("resample: t must be positive");
  const auto& g = v.grid();
  const auto x = v.values();
  std::vector<double> out(g.M, 0.0);
  // Node positions in units of h are exactly i, so t = 1 reproduces v.
  for (int i = 0; i < g.M; ++i) {
    const double pos = t * i;
    if (pos >= g.M - 1) break;
    const auto j = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(j);
    out[i] = frac == 0.0 ? x[j] : x[j] + frac * (x[j + 1] - x[j]);
  }
  return RadialField(v.grid_ptr(), std::move(out));
}

std::string field_to_csv(const RadialField& v) {
  std::string out = "r,value\n";
  const auto& g = v.grid();
  for (int i = 0; i < g.M; ++i) out += fmt::format("{:.17g},{:.17g}\n", g.nodes[i], v[i]);
  return out;
}

nlohmann::json field_to_json(const RadialField& v) {
  const auto& g = v.grid();
  return nlohmann::json{{"N", g.N}, {"R", g.R}, {"M", g.M}, {"values", std::vector<double>(v.values().begin(), v.values().end())}};
}

RadialField field_from_json(const nlohmann::json& j) {
  try {
    auto grid = make_grid(j.at("N").get<int>(), j.at("R").get<double>(), j.at("M").get<int>());
    return RadialField(grid, j.at("values").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("field json: {}", e.what()));
  }
}

}  // namespace dualwave
