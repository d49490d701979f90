#include "dualwave/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "descent.hpp"
#include "solve_common.hpp"
#include "dualwave/error.hpp"
#include "dualwave/random_fields.hpp"
#include "dualwave/scalings.hpp"

namespace dualwave {

using detail::fiber_descend_seed;
using detail::fiber_floor_min;
using detail::fill_diagnostics;
using detail::grid_of;
using detail::seed_mixture;

std::string to_string(Status s) {
  switch (s) {
    case Status::Converged:
      return "Converged";
    case Status::UnboundedBelow:
      return "UnboundedBelow";
    case Status::NonexistenceRegime:
      return "NonexistenceRegime";
    case Status::MaxIters:
      return "MaxIters";
  }
  return "MaxIters";
}

void SolveConfig::validate() const {
  if (N != 2 && N != 3) throw ConfigError("solve.N: must be 2 or 3");
  if (!(R > 0.0)) throw ConfigError("solve.R: must be positive");
  if (M < 3) throw ConfigError("solve.M: must be at least 3");
  if (!(a > 0.0)) throw ConfigError("solve.a: must be positive");
  if (!(step0 > 0.0)) throw ConfigError("solve.step0: must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw ConfigError("solve.shrink: must lie in (0, 1)");
  if (max_outer < 1) throw ConfigError("solve.max_outer: must be positive");
  if (max_inner < 1) throw ConfigError("solve.max_inner: must be positive");
  if (!(tol_grad > 0.0)) throw ConfigError("solve.tol_grad: must be positive");
  if (!(tol_G > 0.0)) throw ConfigError("solve.tol_G: must be positive");
  if (unbounded_floor && !(*unbounded_floor < 0.0)) throw ConfigError("solve.unbounded_floor: must be negative");
  if (restarts < 1) throw ConfigError("solve.restarts: must be positive");
  if (!(seed_width > 0.0)) throw ConfigError("solve.seed_width: must be positive");
  if (!(adapt_widths > 2.0)) throw ConfigError("solve.adapt_widths: must exceed 2");
}

nlohmann::json SolveConfig::to_json() const {
  nlohmann::json j = {{"N", N},
                      {"R", R},
                      {"M", M},
                      {"a", a},
                      {"step0", step0},
                      {"shrink", shrink},
                      {"max_outer", max_outer},
                      {"max_inner", max_inner},
                      {"tol_grad", tol_grad},
                      {"tol_G", tol_G},
                      {"seed", seed},
                      {"restarts", restarts},
                      {"seed_width", seed_width},
                      {"experimental", experimental},
                      {"adapt_grid", adapt_grid},
                      {"adapt_widths", adapt_widths}};
  if (unbounded_floor) j["unbounded_floor"] = *unbounded_floor;
  return j;
}

namespace {

template <typename T>
T read_key(const nlohmann::json& j, const std::string& key, const std::string& path) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(fmt::format("{}.{}: wrong type", path, key));
  }
}

}  // namespace

SolveConfig SolveConfig::from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(fmt::format("{}: expected an object", path));
  static const std::set<std::string> known = {"N",        "R",     "M",         "a",          "step0",
                                              "shrink",   "max_outer", "max_inner", "tol_grad", "tol_G",
                                              "unbounded_floor", "seed", "restarts", "seed_width",
                                              "experimental", "adapt_grid", "adapt_widths"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError(fmt::format("{}.{}: unknown key", path, key));
  SolveConfig c;
  if (j.contains("N")) c.N = read_key<int>(j, "N", path);
  if (j.contains("R")) c.R = read_key<double>(j, "R", path);
  if (j.contains("M")) c.M = read_key<int>(j, "M", path);
  if (j.contains("a")) c.a = read_key<double>(j, "a", path);
  if (j.contains("step0")) c.step0 = read_key<double>(j, "step0", path);
  if (j.contains("shrink")) c.shrink = read_key<double>(j, "shrink", path);
  if (j.contains("max_outer")) c.max_outer = read_key<int>(j, "max_outer", path);
  if (j.contains("max_inner")) c.max_inner = read_key<int>(j, "max_inner", path);
  if (j.contains("tol_grad")) c.tol_grad = read_key<double>(j, "tol_grad", path);
  if (j.contains("tol_G")) c.tol_G = read_key<double>(j, "tol_G", path);
  if (j.contains("unbounded_floor")) c.unbounded_floor = read_key<double>(j, "unbounded_floor", path);
  if (j.contains("seed")) c.seed = read_key<std::uint64_t>(j, "seed", path);
  if (j.contains("restarts")) c.restarts = read_key<int>(j, "restarts", path);
  if (j.contains("seed_width")) c.seed_width = read_key<double>(j, "seed_width", path);
  if (j.contains("experimental")) c.experimental = read_key<bool>(j, "experimental", path);
  if (j.contains("adapt_grid")) c.adapt_grid = read_key<bool>(j, "adapt_grid", path);
  if (j.contains("adapt_widths")) c.adapt_widths = read_key<double>(j, "adapt_widths", path);
  c.validate();
  return c;
}

nlohmann::json SolveResult::to_json(const std::string& field_ref) const {
  nlohmann::json j;
  j["status"] = to_string(status);
  j["a"] = a;
  j["psi"] = breakdown.psi;
  j["lambda"] = breakdown.lambda;
  j["mass_err"] = mass_err;
  j["G_residual"] = G_residual;
  j["pohozaev_residual"] = pohozaev_residual;
  j["iterations"] = iterations;
  j["field_ref"] = field_ref;
  j["energy"] = energy;
  j["grad_norm"] = grad_norm;
  j["kinetic"] = breakdown.kinetic;
  j["t_v_residual"] = t_v_residual;
  j["vanishing"] = vanishing;
  j["R"] = field.grid().R;
  j["M"] = field.grid().M;
  return j;
}

namespace {

double max_exponent(int N) { return N == 2 ? std::numeric_limits<double>::infinity() : 12.0; }

}  // namespace

SolveResult minimize_F(double a, double p, const SolveConfig& cfg_in) {
  SolveConfig cfg = cfg_in;
  cfg.a = a;
  cfg.validate();
  if (!(p > 2.0 && p < max_exponent(cfg.N)))
    throw ConfigError(fmt::format("minimize_F: p = {} outside (2, 2*2^*) for N = {}", p, cfg.N));
  const auto grid = grid_of(cfg);
  const Nonlinearity nl = Nonlinearity::power(p);
  const double eps_neg = 10.0 * cfg.tol_grad;

  std::optional<SolveResult> best;
  for (int r = 0; r < cfg.restarts; ++r) {
    const RadialField v0 = mass_project(seed_mixture(cfg, r).sample(grid), a);
    const double psi0 = psi(v0, nl);
    const double floor = cfg.unbounded_floor.value_or(-1.0e6 * (1.0 + std::abs(psi0)));
    const double lowest = fiber_floor_min(v0, nl);
    if (lowest < floor) {
      SolveResult res(v0);
      fill_diagnostics(res, nl, a);
      res.status = Status::UnboundedBelow;
      res.energy = lowest;
      res.restart = r;
      return res;
    }
    const RadialField start = fiber_descend_seed(v0, nl, a, std::numeric_limits<double>::infinity());
    detail::DescentSpec spec;
    spec.nl = &nl;
    spec.a = a;
    spec.floor = floor;
    auto out = detail::descend(start, spec, cfg);
    if (out.unbounded) {
      SolveResult res(out.field);
      fill_diagnostics(res, nl, a);
      res.status = Status::UnboundedBelow;
      res.energy = out.state.psi();
      res.iterations = out.iterations;
      res.restart = r;
      return res;
    }
    const bool better = !best || out.state.psi() < best->breakdown.psi;
    if (better) {
      SolveResult res(out.field);
      fill_diagnostics(res, nl, a);
      res.grad_norm = out.grad_norm;
      res.iterations = out.iterations;
      res.restart = r;
      const bool g_ok = res.G_residual <= std::max(cfg.tol_G, detail::kTolGF);
      res.status = out.converged && g_ok ? Status::Converged : Status::MaxIters;
      res.energy = res.breakdown.psi;
      best = std::move(res);
    }
  }
  SolveResult res = std::move(*best);
  if (res.breakdown.psi >= -eps_neg) {
    res.vanishing = true;
    res.status = Status::MaxIters;
    res.energy = 0.0;
  }
  return res;
}

nlohmann::json ThresholdResult::to_json() const {
  nlohmann::json scan_json = nlohmann::json::array();
  for (const auto& pt : scan)
    scan_json.push_back({{"a", pt.a},
                         {"status", to_string(pt.status)},
                         {"F", pt.energy},
                         {"certified_negative", pt.certified_negative}});
  return {{"a_star", a_star},
          {"a_star_star", a_star_star},
          {"bracket", {bracket_lo, bracket_hi}},
          {"eps_neg", eps_neg},
          {"monotonicity_violations", monotonicity_violations},
          {"max_abs_F_below_a_star", max_abs_below},
          {"scan", scan_json}};
}

ThresholdResult find_a_star(double p, int N, double a_lo, double a_hi, double tol, const SolveConfig& cfg_in,
                            int scan_points) {
  if (!(p >= 2.0 + 4.0 / N && p < 4.0 + 4.0 / N))
    throw ConfigError(fmt::format("find_a_star: p = {} outside [2 + 4/N, 4 + 4/N)", p));
  if (!(a_lo > 0.0 && a_hi > a_lo)) throw ConfigError("find_a_star: need 0 < a_lo < a_hi");
  if (!(tol > 0.0)) throw ConfigError("find_a_star: tol must be positive");
  if (scan_points < 2) throw ConfigError("find_a_star: need at least two scan points");
  SolveConfig cfg = cfg_in;
  cfg.N = N;
  ThresholdResult out;
  out.eps_neg = 10.0 * cfg.tol_grad;

  auto evaluate = [&](double a) {
    const auto r = minimize_F(a, p, cfg);
    ThresholdPoint pt{a, r.status, r.energy, r.status == Status::Converged && r.energy < -out.eps_neg};
    out.scan.push_back(pt);
    return pt.certified_negative;
  };

  std::vector<double> grid(scan_points);
  for (int k = 0; k < scan_points; ++k)
    grid[k] = a_lo * std::pow(a_hi / a_lo, static_cast<double>(k) / (scan_points - 1));
  std::vector<bool> neg(scan_points);
  for (int k = 0; k < scan_points; ++k) neg[k] = evaluate(grid[k]);
  if (neg.front() || !neg.back())
    throw NoSignChange(fmt::format("find_a_star: F(a) < 0 does not switch on inside [{}, {}]", a_lo, a_hi));
  int first = 0;
  while (!neg[first]) ++first;
  double lo = grid[first - 1];
  double hi = grid[first];
  while (hi / lo - 1.0 > tol) {
    const double mid = std::sqrt(lo * hi);
    if (evaluate(mid))
      hi = mid;
    else
      lo = mid;
  }
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.a_star = std::sqrt(lo * hi);
  out.a_star_star = hi;

  std::sort(out.scan.begin(), out.scan.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  for (std::size_t k = 0; k + 1 < out.scan.size(); ++k)
    if (out.scan[k].energy < out.scan[k + 1].energy - 1.0e-6) ++out.monotonicity_violations;
  for (const auto& pt : out.scan)
    if (pt.a < out.a_star) out.max_abs_below = std::max(out.max_abs_below, std::abs(pt.energy));
  return out;
}

nlohmann::json RegimeReport::to_json() const {
  return {{"regime", to_string(regime)},
          {"sigma_permitted", sigma_permitted},
          {"identity_samples", identity_samples},
          {"identity_max_residual", identity_max_residual},
          {"max_pinch_integral", max_pinch_integral}};
}

RegimeReport classify_and_guard(const Nonlinearity& nl, int N, int identity_samples, std::uint64_t seed) {
  RegimeReport rep;
  rep.regime = growth_classify(nl, N);
  rep.sigma_permitted = rep.regime == Regime::MassSupercritical;
  if (rep.regime != Regime::Nonexistence) return rep;

  const double mu = nl.mu1().value();
  const auto grid = make_grid(N, 10.0, 1001);
  std::mt19937_64 rng(seed);
  MixtureOptions opts;
  opts.width_lo = 0.3;
  opts.width_hi = 2.0;
  opts.center_hi = 1.0;
  for (int k = 0; k < identity_samples; ++k) {
    const RadialField v = random_mixture(grid, rng, opts);
    const auto st = energy_state(v, nl);
    const double lam = (st.kinetic + st.dual_kinetic - st.hf) / st.mass;
    const double pinch = mu * st.potential - st.hf;
    const double lhs = (0.5 * (N - 2) / N - 2.0 / mu) * st.kinetic + st.grad_f_squared() / mu;
    const double rhs = (0.5 - 1.0 / mu) * lam * st.mass + pinch / mu;
    const double pr = 0.5 * (N - 2) * st.kinetic - 0.5 * N * lam * st.mass - N * st.potential;
    const double residual = std::abs(lhs - rhs - pr / N) / (1.0 + std::abs(lhs) + std::abs(rhs));
    rep.identity_max_residual = std::max(rep.identity_max_residual, residual);
    rep.max_pinch_integral = std::max(rep.max_pinch_integral, pinch / (1.0 + std::abs(st.hf)));
    ++rep.identity_samples;
  }
  return rep;
}

namespace {

// Rescales the seed until its fiber maximum sits at t = 1, so the
// stretch onto the Pohozaev manifold moves the field only slightly.
struct SigmaSeed {
  RadialField field;
  double scale;
};

SigmaSeed sigma_seed(const Mixture& mix, const GridPtr& grid, const Nonlinearity& nl, double a, double scale = 1.0) {
  // Below a few cells the sampled seed degenerates to a spike; the caller
  // is expected to shrink the grid instead.
  double min_width = std::numeric_limits<double>::infinity();
  for (const auto& c : mix.components) min_width = std::min(min_width, c.width);
  const double floor = 4.0 * grid->h / min_width;
  scale = std::max(scale, floor);
  RadialField v = mass_project(mix.sample(grid, scale), a);
  for (int it = 0; it < 40; ++it) {
    const double t = find_tv(v, nl).t;
    if (std::abs(t - 1.0) < 1.0e-3) break;
    const double next = std::max(scale / t, floor);
    if (next == scale) break;
    scale = next;
    v = mass_project(mix.sample(grid, scale), a);
  }
  const double t = find_tv(v, nl).t;
  return {mass_project(stretch(v, t), a), scale / t};
}

}  // namespace

SolveResult minimize_sigma(double a, const Nonlinearity& nl, const SolveConfig& cfg_in) {
  SolveConfig cfg = cfg_in;
  cfg.a = a;
  cfg.validate();
  auto grid = grid_of(cfg);
  const auto guard = classify_and_guard(nl, cfg.N, 0);
  if (guard.regime == Regime::Nonexistence) {
    SolveResult res(RadialField::zeros(grid));
    res.a = a;
    res.status = Status::NonexistenceRegime;
    return res;
  }
  if (guard.regime == Regime::ExpCritical) {
    if (!cfg.experimental)
      throw ConfigError("minimize_sigma: exponential-critical minimization requires the experimental flag");
  } else {
    const auto report = validate_hypotheses(nl, HypothesisSet::HSet, cfg.N);
    if (!report.passed())
      throw ConfigError(fmt::format("minimize_sigma: hypotheses fail for {}: {}", nl.name(),
                                    report.to_json().dump()));
  }

  double scale = 1.0;
  if (cfg.adapt_grid) {
    for (int pass = 0; pass < 8; ++pass) {
      scale = sigma_seed(seed_mixture(cfg, 0), grid, nl, a, scale).scale;
      const double target = cfg.adapt_widths * cfg.seed_width * scale;
      if (std::abs(std::log(target / grid->R)) < std::log(1.25)) break;
      grid = make_grid(cfg.N, target, cfg.M);
    }
  }
  const detail::Metric metric(*grid);
  std::optional<SolveResult> best;
  for (int r = 0; r < cfg.restarts; ++r) {
    RadialField v = sigma_seed(seed_mixture(cfg, r), grid, nl, a, scale).field;
    if (auto w = detail::pohozaev_retract(v, nl, a, metric)) v = *w;
    detail::DescentSpec spec;
    spec.nl = &nl;
    spec.a = a;
    spec.pohozaev = true;
    auto out = detail::descend(v, spec, cfg);
    if (best && !(out.state.psi() < best->breakdown.psi)) continue;
    SolveResult res(out.field);
    fill_diagnostics(res, nl, a);
    res.grad_norm = out.grad_norm;
    res.iterations = out.iterations;
    res.restart = r;
    res.energy = res.breakdown.psi;
    res.status = out.converged ? Status::Converged : Status::MaxIters;
    best = std::move(res);
  }
  SolveResult res = std::move(*best);
  res.t_v_residual = std::abs(find_tv(res.field, nl).t - 1.0);
  if (res.status == Status::Converged && !(res.breakdown.lambda < 0.0))
    throw NumericError(fmt::format("minimize_sigma: multiplier {} is not negative", res.breakdown.lambda));
  return res;
}

int worker_count() {
  if (const char* env = std::getenv("DUALWAVE_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1) return static_cast<int>(std::min(n, 256L));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

template <typename Solve>
CurveTable scan_curve(const std::vector<double>& a_list, Solve&& solve) {
  if (a_list.empty()) throw ConfigError("curve: empty a grid");
  for (std::size_t k = 0; k + 1 < a_list.size(); ++k)
    if (!(a_list[k] < a_list[k + 1])) throw ConfigError("curve: a grid must be strictly increasing");
  CurveTable table;
  table.rows.resize(a_list.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < a_list.size(); k = next++) {
      CurveRow& row = table.rows[k];
      row.a = a_list[k];
      try {
        const SolveResult r = solve(a_list[k]);
        row.status = r.status;
        row.psi = r.energy;
        row.lambda = r.breakdown.lambda;
        row.G_residual = r.G_residual;
      } catch (const Error& e) {
        row.error = fmt::format("{}: {}", e.kind(), e.what());
      }
    }
  };
  const int workers = std::min<int>(worker_count(), static_cast<int>(a_list.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (std::size_t k = 0; k + 1 < table.rows.size(); ++k) {
    const auto& x = table.rows[k];
    const auto& y = table.rows[k + 1];
    if (x.error.empty() && y.error.empty() && x.psi < y.psi - 1.0e-6) ++table.monotonicity_violations;
  }
  return table;
}

}  // namespace

CurveTable scan_F_curve(const std::vector<double>& a_list, double p, const SolveConfig& cfg) {
  return scan_curve(a_list, [&](double a) { return minimize_F(a, p, cfg); });
}

CurveTable scan_sigma_curve(const std::vector<double>& a_list, const Nonlinearity& nl, const SolveConfig& cfg) {
  return scan_curve(a_list, [&](double a) { return minimize_sigma(a, nl, cfg); });
}

}  // namespace dualwave
