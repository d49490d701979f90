#include "dualwave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "descent.hpp"
#include "dualwave/error.hpp"
#include "dualwave/functionals.hpp"
#include "dualwave/random_fields.hpp"
#include "dualwave/scalings.hpp"
#include "solve_common.hpp"

namespace dualwave {

namespace {

// Maximizes g over [lo, hi] given a point inside with a larger value.
double golden_max(const std::function<double(double)>& g, double lo, double hi, double tol) {
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
  double g1 = g(x1), g2 = g(x2);
  while (hi - lo > tol) {
    if (g1 < g2) {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + invphi * (hi - lo);
      g2 = g(x2);
    } else {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - invphi * (hi - lo);
      g1 = g(x1);
    }
  }
  return 0.5 * (lo + hi);
}

// Log-grid scan followed by golden section in log t. Points where g throws
// RangeError are skipped.
struct Peak {
  double t;
  double value;
};

Peak log_maximize(const std::function<double(double)>& g, double t_lo, double t_hi, int n, double tol) {
  const double x_lo = std::log(t_lo), x_hi = std::log(t_hi);
  const double dx = (x_hi - x_lo) / (n - 1);
  auto safe = [&](double x) {
    try {
      const double v = g(std::exp(x));
      return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
    } catch (const RangeError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  int best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    const double v = safe(x_lo + k * dx);
    if (v > best_v) {
      best_v = v;
      best = k;
    }
  }
  if (!std::isfinite(best_v)) throw NumericError("log_maximize: no finite value on the scan");
  const double lo = x_lo + std::max(best - 1, 0) * dx;
  const double hi = x_lo + std::min(best + 1, n - 1) * dx;
  const double x = golden_max(safe, lo, hi, tol);
  const double v = safe(x);
  if (v >= best_v) return {std::exp(x), v};
  return {std::exp(x_lo + best * dx), best_v};
}

SobolevGeometry finish(SobolevGeometry g) {
  const double p = g.p;
  const double e = (3.0 * p - 10.0) / (18.0 - 3.0 * p);
  g.K0 = std::pow(g.A * (10.0 - 3.0 * p) / (8.0 * g.B), e) * (g.A * (18.0 - 3.0 * p) / 8.0);
  g.a_tilde0 = std::pow(1.0 / (2.0 * g.K0), 1.5);
  g.t_star = g.argmax_at(g.a);
  g.rho_max = g.rho(g.t_star);
  const double scale = std::pow(g.a, (6.0 - p) / 4.0);
  g.t_star_foc = std::pow(g.A * (10.0 - 3.0 * p) * scale / (8.0 * g.B), 4.0 / (18.0 - 3.0 * p));
  g.t_star_display2B = std::pow(g.A * (10.0 - 3.0 * p) / (2.0 * g.B), 4.0 / (18.0 - 3.0 * p)) * std::cbrt(g.a);
  g.rho_max_closed = 0.5 - g.K0 * std::pow(g.a, 2.0 / 3.0);
  g.t_star0 = g.argmax_at(g.a_tilde0);
  return g;
}

void check_range(double p, double a) {
  if (!(p > 2.0 && p < 10.0 / 3.0)) throw ConfigError(fmt::format("sobolev_geometry: p = {} outside (2, 10/3)", p));
  if (!(a > 0.0)) throw ConfigError("sobolev_geometry: a must be positive");
}

}  // namespace

double SobolevGeometry::rho_at(double mass, double t) const {
  return 0.5 - A * std::pow(mass, (6.0 - p) / 4.0) * std::pow(t, (3.0 * p - 10.0) / 4.0) - B * t * t;
}

double SobolevGeometry::argmax_at(double mass) const {
  return log_maximize([&](double t) { return rho_at(mass, t); }, 1.0e-16, 1.0e16, 801, 1.0e-12).t;
}

nlohmann::json SobolevGeometry::to_json() const {
  return {{"p", p},
          {"a", a},
          {"A", A},
          {"B", B},
          {"C", C},
          {"S", S},
          {"K0", K0},
          {"a_tilde0", a_tilde0},
          {"t_star", t_star},
          {"rho_max", rho_max},
          {"rho_max_closed", rho_max_closed},
          {"t_star_foc", t_star_foc},
          {"t_star_display2B", t_star_display2B},
          {"t_star0", t_star0}};
}

SobolevGeometry sobolev_geometry(double p, double a, double C, double S) {
  check_range(p, a);
  if (!(C > 0.0) || !(S > 0.0)) throw ConfigError("sobolev_geometry: C and S must be positive");
  SobolevGeometry g;
  g.p = p;
  g.a = a;
  g.C = C;
  g.S = S;
  g.A = std::pow(C, p) / p;
  g.B = 2.0 / (3.0 * S * S * S);
  return finish(g);
}

SobolevGeometry sobolev_geometry_AB(double p, double a, double A, double B) {
  check_range(p, a);
  if (!(A > 0.0) || !(B > 0.0)) throw ConfigError("sobolev_geometry: A and B must be positive");
  SobolevGeometry g;
  g.p = p;
  g.a = a;
  g.A = A;
  g.B = B;
  return finish(g);
}

nlohmann::json LowerBoundCheck::to_json() const {
  return {{"samples", samples}, {"violations", violations}, {"min_margin", min_margin}};
}

LowerBoundCheck check_lower_bound(const SobolevGeometry& geo, int samples, std::uint64_t seed) {
  const auto grid = make_grid(3, 14.0, 1401);
  const Nonlinearity nl = Nonlinearity::sobolev_critical(geo.p, 1.0);
  std::mt19937_64 rng(seed);
  MixtureOptions opts;
  opts.width_lo = 0.3;
  opts.width_hi = 2.0;
  opts.center_hi = 3.0;
  LowerBoundCheck out;
  out.min_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const RadialField v = mass_project(random_mixture(grid, rng, opts), geo.a);
    const auto st = energy_state(v, nl);
    const double margin = st.psi() - st.kinetic * geo.rho(st.kinetic);
    out.min_margin = std::min(out.min_margin, margin);
    if (margin < -1.0e-10) ++out.violations;
    ++out.samples;
  }
  return out;
}

SolveResult local_minimize_m0(double a, double p, const SolveConfig& cfg_in, const SobolevGeometry& geo) {
  SolveConfig cfg = cfg_in;
  cfg.a = a;
  cfg.validate();
  if (cfg.N != 3) throw ConfigError("local_minimize_m0: N must be 3");
  check_range(p, a);
  if (geo.p != p) throw ConfigError("local_minimize_m0: geometry was built for another p");
  if (!(a < geo.a_tilde0))
    throw ConfigError(fmt::format("local_minimize_m0: a = {} must lie below a_tilde0 = {}", a, geo.a_tilde0));
  const Nonlinearity nl = Nonlinearity::sobolev_critical(p, 1.0);
  const double cap = 0.999 * geo.t_star0;
  const auto grid = detail::grid_of(cfg);

  std::optional<SolveResult> best;
  for (int r = 0; r < cfg.restarts; ++r) {
    RadialField v = mass_project(detail::seed_mixture(cfg, r).sample(grid), a);
    // Spread the seed until it lies inside the kinetic ball.
    for (int k = 0; k < 60 && kinetic(v) >= 0.5 * cap; ++k) v = mass_project(stretch(v, 0.5), a);
    v = detail::fiber_descend_seed(v, nl, a, cap);
    detail::DescentSpec spec;
    spec.nl = &nl;
    spec.a = a;
    spec.kinetic_cap = cap;
    spec.record_trials = true;
    auto out = detail::descend(v, spec, cfg);
    if (best && !(out.state.psi() < best->breakdown.psi)) continue;
    SolveResult res(out.field);
    detail::fill_diagnostics(res, nl, a);
    res.grad_norm = out.grad_norm;
    res.iterations = out.iterations;
    res.restart = r;
    res.energy = res.breakdown.psi;
    res.trajectory = std::move(out.trajectory);
    const bool g_ok = res.G_residual <= std::max(cfg.tol_G, detail::kTolGF);
    res.status = out.converged && g_ok ? Status::Converged : Status::MaxIters;
    best = std::move(res);
  }
  return std::move(*best);
}

SolveResult build_reference(double a, double p, const SolveConfig& cfg_in) {
  if (!(p > 6.0)) throw ConfigError("build_reference: p must exceed 6");
  SolveConfig cfg = cfg_in;
  cfg.N = 2;
  return minimize_sigma(a, Nonlinearity::power(p), cfg);
}

nlohmann::json ReferenceCheck::to_json() const {
  return {{"m_star", m_star}, {"Ip", Ip}, {"Ip_bound", Ip_bound},
          {"slack", slack},   {"lambda", lambda}, {"passed", passed}};
}

ReferenceCheck check_reference(const SolveResult& ref, double p) {
  ReferenceCheck c;
  c.m_star = ref.breakdown.psi;
  c.Ip = p * ref.breakdown.potential;
  c.Ip_bound = 4.0 * p / (p - 6.0) * c.m_star;
  c.slack = c.Ip_bound - c.Ip;
  c.lambda = ref.breakdown.lambda;
  c.passed = ref.status == Status::Converged && c.m_star > 0.0 && c.lambda < 0.0 && c.slack >= 0.0;
  return c;
}

double lambda_max(double p, double xi) {
  if (!(p > 6.0) || !(xi > 0.0)) throw DomainError("lambda_max: needs p > 6 and xi > 0");
  return std::pow((p - 2.0) / (p * (p - 4.0) * xi), 2.0 / (p - 6.0)) * (p - 2.0) * (p - 6.0) /
         (2.0 * p * (p - 4.0));
}

XiStar xi_star(double p, double zeta0, const SolveResult& ref) {
  const double m = ref.breakdown.psi;
  const double Ip = p * ref.breakdown.potential;
  XiStar x;
  const double lead = (p - 2.0) / (p * (p - 4.0));
  x.first = lead * std::pow(zeta0 * (p - 2.0) * m / (2.0 * std::numbers::pi * (p - 4.0)), 0.5 * (p - 6.0));
  x.second = ref.breakdown.kinetic / (2.0 * Ip);
  x.value = std::max(x.first, x.second);
  x.chain_equality = lead * std::pow(2.0 * zeta0 * (p - 2.0) * m / (std::numbers::pi * (p - 4.0)), 0.5 * (p - 6.0));
  return x;
}

nlohmann::json ExpBoundReport::to_json() const {
  return {{"a", a},
          {"p", p},
          {"zeta0", zeta0},
          {"xi", xi},
          {"xi_star", xs.value},
          {"xi_star_first", xs.first},
          {"xi_star_second", xs.second},
          {"xi_chain_equality", xs.chain_equality},
          {"m_star", m_star},
          {"lambda_max", lambda_max},
          {"t_lambda", t_lambda},
          {"bound", bound},
          {"pi_over_zeta0", pi_over_zeta0},
          {"margin", margin},
          {"bound_below", bound_below},
          {"upsilon_max", upsilon_max},
          {"upsilon_t", upsilon_t},
          {"upsilon_at_one", upsilon_at_one},
          {"fiber_max", fiber_max}};
}

ExpBoundReport exp_level_bound(double a, const Nonlinearity& nl_exp, const SolveResult& ref) {
  const auto* model = std::get_if<ExpCriticalModel>(&nl_exp.variant());
  if (!model) throw ConfigError("exp_level_bound: nonlinearity must be exp_critical");
  const double p = model->p;
  if (!(p > 6.0)) throw ConfigError("exp_level_bound: p must exceed 6");
  if (ref.field.grid().N != 2) throw ConfigError("exp_level_bound: the reference must live on an N = 2 grid");
  if (ref.status != Status::Converged) throw ConfigError("exp_level_bound: the reference did not converge");
  ExpBoundReport r;
  r.a = a;
  r.p = p;
  r.zeta0 = model->zeta0;
  r.xi = model->xi;
  r.xs = xi_star(p, r.zeta0, ref);
  if (!(r.xi > r.xs.value))
    throw ConfigError(fmt::format("exp_level_bound: xi = {} does not exceed xi* = {}", r.xi, r.xs.value));
  r.m_star = ref.breakdown.psi;
  r.lambda_max = lambda_max(p, r.xi);
  r.t_lambda = std::pow((p - 2.0) / (p * (p - 4.0) * r.xi), 1.0 / (p - 6.0));
  r.bound = 4.0 * p / (p - 6.0) * r.m_star * r.lambda_max;
  r.pi_over_zeta0 = std::numbers::pi / r.zeta0;
  r.margin = r.pi_over_zeta0 - r.bound;
  r.bound_below = r.margin > 0.0;

  const double K = ref.breakdown.kinetic;
  const double DK = ref.breakdown.dual_kinetic;
  const double Ip = p * ref.breakdown.potential;
  const double xi = r.xi;
  auto upsilon = [&](double t) {
    return 0.5 * t * t * (K - DK) + 0.5 * t * t * t * t * DK - xi * std::pow(t, p - 2.0) * Ip;
  };
  const Peak up = log_maximize(upsilon, 1.0e-6, 1.0e3, 2001, 1.0e-10);
  r.upsilon_max = up.value;
  r.upsilon_t = up.t;
  r.upsilon_at_one = upsilon(1.0);
  const FiberProfile fp(ref.field, nl_exp);
  r.fiber_max = log_maximize([&](double t) { return fp.psi(t); }, 1.0e-6, 1.0e3, 2001, 1.0e-10).value;
  return r;
}

}  // namespace dualwave
