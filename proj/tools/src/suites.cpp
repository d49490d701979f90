#include "dualwave/suites.hpp"

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "dualwave/calibration.hpp"
#include "dualwave/cli.hpp"
#include "dualwave/dual_map.hpp"
#include "dualwave/error.hpp"
#include "dualwave/functionals.hpp"
#include "dualwave/geometry.hpp"
#include "dualwave/random_fields.hpp"
#include "dualwave/scalings.hpp"
#include "dualwave/solver.hpp"

namespace dualwave::suites {

nlohmann::json Outcome::to_json() const {
  return {{"id", id},           {"name", name}, {"passed", passed}, {"seconds", seconds},
          {"budget_seconds", budget_seconds}, {"lines", lines}, {"report", report}};
}

namespace {

// Accumulates sub-checks of one suite.
struct Checks {
  Outcome o;
  void add(bool ok, const std::string& what) {
    o.lines.push_back(fmt::format("{} {}", ok ? "ok  " : "FAIL", what));
    if (!ok) o.passed = false;
  }
  Outcome done() { return std::move(o); }
  Checks() { o.passed = true; }
};

std::string g(double x) { return fmt::format("{:.6g}", x); }

// A scratch directory removed on scope exit.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / fmt::format("dualwave-check-{}", static_cast<long>(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

int cli_run(const std::vector<std::string>& args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

// 1
Outcome dual_map_suite() {
  Checks c;
  const auto rep = check_f_properties(default_dual_map(), 10000, 1.0e-9);
  nlohmann::json items = nlohmann::json::array();
  for (const auto& it : rep.items) {
    items.push_back({{"item", it.item},
                     {"statement", it.statement},
                     {"worst_margin", it.worst_margin},
                     {"worst_at", it.worst_at},
                     {"passed", it.passed}});
    c.add(it.passed, fmt::format("({}) {}: worst {} at t = {}", it.item, it.statement, g(it.worst_margin),
                                 g(it.worst_at)));
  }
  c.o.report = {{"items", items}, {"lower_constant", rep.lower_constant}};
  return c.done();
}

// 2
Outcome identity_suite() {
  Checks c;
  struct Case {
    int N;
    double p;
  };
  nlohmann::json rep = nlohmann::json::array();
  for (const Case cs : {Case{2, 7.0}, Case{3, 6.0}}) {
    const auto grid = make_grid(cs.N, 10.0, 1001);
    const Nonlinearity nl = Nonlinearity::power(cs.p);
    std::mt19937_64 rng(100 + cs.N);
    double split = 0.0, min_A = std::numeric_limits<double>::infinity(), min_B = min_A, fd = 0.0;
    for (int k = 0; k < 20; ++k) {
      const RadialField v = random_mixture(grid, rng);
      const FiberProfile fp(v, nl);
      for (double t : {0.25, 0.5, 2.0, 4.0}) {
        split = std::max(split, fp.splitting_residual(t));
        min_A = std::min(min_A, fp.surplus_A(t));
        min_B = std::min(min_B, fp.surplus_B(t));
        const double eps = 1.0e-5 * t;
        const double num = (fp.psi(t + eps) - fp.psi(t - eps)) / (2.0 * eps);
        const double d = fp.dpsi(t);
        fd = std::max(fd, std::abs(d - num) / (1.0 + std::abs(d)));
      }
    }
    const std::string tag = fmt::format("Power({}) N={}", cs.p, cs.N);
    c.add(split <= 1.0e-8, fmt::format("{}: splitting residual {} <= 1e-8", tag, g(split)));
    c.add(min_A >= -1.0e-10, fmt::format("{}: min A {} >= -1e-10", tag, g(min_A)));
    c.add(min_B >= -1.0e-10, fmt::format("{}: min B {} >= -1e-10", tag, g(min_B)));
    c.add(fd <= 1.0e-5, fmt::format("{}: fiber derivative vs difference {} <= 1e-5", tag, g(fd)));
    rep.push_back({{"N", cs.N}, {"p", cs.p}, {"splitting", split}, {"min_A", min_A}, {"min_B", min_B},
                   {"fd", fd}});
  }
  c.o.report = rep;
  return c.done();
}

// 3
Outcome stretch_suite() {
  Checks c;
  nlohmann::json rep = nlohmann::json::array();
  const Nonlinearity nl = Nonlinearity::power(7.0);
  for (int N : {2, 3}) {
    // R balances tail truncation at t = 1/8 against resolution at t = 8.
    const auto grid = make_grid(N, 24.0, 4001);
    const RadialField v = mass_project(sample_gaussian(grid, 1.0, 1.0), 1.0);
    const FiberProfile fp(v, nl);
    const double m = mass(v);
    for (double t : {0.125, 0.5, 2.0, 8.0}) {
      const RadialField w = stretch(v, t);
      const double dm = std::abs(mass(w) - m) / m;
      const double closed = fp.psi(t);
      const double sampled = psi(w, nl);
      const double dpsi = std::abs(closed - sampled) / std::abs(closed);
      c.add(dm <= 1.0e-4, fmt::format("N={} t={}: mass drift {} <= 1e-4", N, t, g(dm)));
      c.add(dpsi <= 1.0e-3, fmt::format("N={} t={}: closed vs resampled Psi {} <= 1e-3", N, t, g(dpsi)));
      rep.push_back({{"N", N}, {"t", t}, {"mass_drift", dm}, {"psi_closed", closed}, {"psi_resampled", sampled}});
    }
  }
  c.o.report = rep;
  return c.done();
}

SolveConfig trichotomy_config() {
  SolveConfig cfg;
  cfg.N = 2;
  cfg.R = 20.0;
  cfg.M = 2001;
  return cfg;
}

// 4
Outcome trichotomy_suite() {
  Checks c;
  const SolveConfig cfg = trichotomy_config();
  nlohmann::json rep = nlohmann::json::object();

  const auto r3 = minimize_F(1.0, 3.0, cfg);
  rep["p3_a1"] = r3.to_json();
  c.add(r3.status == Status::Converged,
        fmt::format("p=3 a=1: status {} (G residual {}, Pohozaev residual {})", to_string(r3.status),
                    g(r3.G_residual), g(r3.pohozaev_residual)));
  c.add(r3.energy < -1.0e-3, fmt::format("p=3 a=1: F = {} < -1e-3", g(r3.energy)));

  const auto r5s = minimize_F(0.01, 5.0, cfg);
  rep["p5_a0.01"] = r5s.to_json();
  c.add(std::abs(r5s.energy) <= 1.0e-3, fmt::format("p=5 a=0.01: |F| = {} <= 1e-3", g(std::abs(r5s.energy))));
  const bool fake_zero = r5s.status == Status::Converged && std::abs(r5s.breakdown.psi) <= 1.0e-3;
  c.add(!fake_zero && (r5s.vanishing || r5s.grad_norm > cfg.tol_grad),
        fmt::format("p=5 a=0.01: status {}, vanishing {}, no converged zero-level minimizer", to_string(r5s.status),
                    r5s.vanishing));

  const auto r5l = minimize_F(100.0, 5.0, cfg);
  rep["p5_a100"] = r5l.to_json();
  c.add(r5l.energy < -1.0e-3, fmt::format("p=5 a=100: F = {} < -1e-3 ({})", g(r5l.energy), to_string(r5l.status)));

  const auto r7 = minimize_F(1.0, 7.0, cfg);
  rep["p7_a1"] = r7.to_json();
  c.add(r7.status == Status::UnboundedBelow, fmt::format("p=7 a=1: status {}", to_string(r7.status)));
  c.o.report = rep;
  return c.done();
}

// 5
Outcome threshold_suite() {
  Checks c;
  const auto r = find_a_star(5.0, 2, 0.01, 100.0, 0.01, trichotomy_config(), 9);
  c.o.report = r.to_json();
  c.add(r.monotonicity_violations == 0,
        fmt::format("F nonincreasing along {} scanned masses (violations {})", r.scan.size(), r.monotonicity_violations));
  c.add(r.a_star < r.a_star_star, fmt::format("a_* = {} < a_** = {}", g(r.a_star), g(r.a_star_star)));
  c.add(r.max_abs_below <= 1.0e-3, fmt::format("max |F| below a_* = {} <= 1e-3", g(r.max_abs_below)));
  return c.done();
}

SolveConfig ground_state_config() {
  SolveConfig cfg;
  cfg.N = 2;
  cfg.R = 20.0;
  cfg.M = 2001;
  cfg.adapt_grid = true;
  return cfg;
}

const std::vector<double> kSigmaMasses = {1.0 / 16.0, 0.25, 1.0, 4.0};

// 6
Outcome ground_state_suite() {
  Checks c;
  const Nonlinearity nl = Nonlinearity::power(7.0);
  const SolveConfig cfg = ground_state_config();
  nlohmann::json rep = nlohmann::json::array();
  std::vector<double> sigma;
  for (double a : kSigmaMasses) {
    const auto r = minimize_sigma(a, nl, cfg);
    rep.push_back(r.to_json());
    sigma.push_back(r.energy);
    const bool ok = r.status == Status::Converged && r.breakdown.lambda < 0.0 && r.G_residual <= 1.0e-6 &&
                    r.pohozaev_residual <= 1.0e-3;
    c.add(ok, fmt::format("a={}: {} sigma {} lambda {} G {} Pohozaev {} (R = {})", a, to_string(r.status),
                          g(r.energy), g(r.breakdown.lambda), g(r.G_residual), g(r.pohozaev_residual),
                          g(r.field.grid().R)));
  }
  for (std::size_t i = 0; i + 1 < sigma.size(); ++i) {
    c.add(sigma[i] >= sigma[i + 1] - 1.0e-6,
          fmt::format("sigma({}) = {} >= sigma({}) = {}", kSigmaMasses[i], g(sigma[i]), kSigmaMasses[i + 1],
                      g(sigma[i + 1])));
    const double ratio = sigma[i] / sigma[i + 1];
    c.add(ratio >= 1.5, fmt::format("sigma({})/sigma({}) = {} >= 1.5", kSigmaMasses[i], kSigmaMasses[i + 1], g(ratio)));
  }
  c.o.report = rep;
  return c.done();
}

// 7
Outcome nonexistence_suite() {
  Checks c;
  TempDir tmp;
  const std::string cfg = tmp.file("power12.json");
  cli::emit_json({{"N", 3}, {"R", 10.0}, {"M", 1001}, {"a", 1.0}, {"nonlinearity", {{"variant", "power"}, {"p", 12.0}}}},
                 cfg);
  std::string err;
  const int code = cli_run({"minimize", "--mode", "sigma", "--config", cfg, "--out", tmp.file("r.json")}, &err);
  c.add(code == 3, fmt::format("minimize --mode sigma with Power(12), N=3 exits {}", code));
  const auto rep = classify_and_guard(Nonlinearity::power(12.0), 3, 100, 1);
  c.add(rep.regime == Regime::Nonexistence, fmt::format("regime {}", to_string(rep.regime)));
  c.add(rep.identity_samples == 100 && rep.identity_max_residual <= 1.0e-8,
        fmt::format("recombination identity on {} fields: max residual {} <= 1e-8", rep.identity_samples,
                    g(rep.identity_max_residual)));
  // For a pure power mu1 H - h f vanishes identically; only roundoff remains.
  c.add(rep.max_pinch_integral <= 1.0e-12,
        fmt::format("int (mu1 H - h f) <= 0 on every field (max {} relative, roundoff 1e-12)",
                    g(rep.max_pinch_integral)));
  c.o.report = {{"exit_code", code}, {"stderr", err}, {"guard", rep.to_json()}};
  return c.done();
}

// 8
Outcome sobolev_suite() {
  Checks c;
  const auto h = sobolev_geometry_AB(3.0, 1.0, 1.0, 1.0);
  c.add(std::abs(h.t_star - 0.39685) <= 1.0e-6, fmt::format("t_star = {:.9f} (0.39685 +- 1e-6)", h.t_star));
  c.add(std::abs(h.rho_max + 0.91741) <= 1.0e-5, fmt::format("max rho = {:.9f} (-0.91741 +- 1e-5)", h.rho_max));
  c.add(std::abs(h.a_tilde0 - 0.20952) <= 1.0e-4, fmt::format("a_tilde0 = {:.9f} (0.20952 +- 1e-4)", h.a_tilde0));
  const double closed_gap = std::abs(h.rho_max - h.rho_max_closed);
  c.add(closed_gap <= 1.0e-10, fmt::format("golden-section max vs 1/2 - K0 a^(2/3): {} <= 1e-10", g(closed_gap)));
  const double foc_gap = std::abs(h.t_star - h.t_star_foc) / h.t_star_foc;
  c.add(foc_gap <= 1.0e-6, fmt::format("argmax vs 8B first-order root: relative {} (2B display gives {})",
                                       g(foc_gap), g(h.t_star_display2B)));
  const auto at0 = sobolev_geometry_AB(3.0, h.a_tilde0, 1.0, 1.0);
  c.add(std::abs(at0.rho_max) <= 1.0e-10, fmt::format("max rho at a_tilde0 = {} (0 +- 1e-10)", g(at0.rho_max)));

  const auto cal = calibrate_gn(3, 3.0, 1000, 1);
  const auto geo = sobolev_geometry(3.0, 1.0, cal.C, talenti_S());
  const auto lb = check_lower_bound(geo, 100, 4);
  c.add(lb.violations == 0 && lb.min_margin >= -1.0e-10,
        fmt::format("Psi >= K rho_a(K) on {} fields of mass 1: min margin {}", lb.samples, g(lb.min_margin)));
  c.o.report = {{"harness", h.to_json()},
                {"harness_at_a_tilde0", at0.to_json()},
                {"calibration", cal.to_json()},
                {"calibrated", geo.to_json()},
                {"lower_bound", lb.to_json()}};
  return c.done();
}

// 9
Outcome local_min_suite() {
  Checks c;
  const auto cal = calibrate_gn(3, 3.0, 1000, 1);
  const double S = talenti_S();
  const auto base = sobolev_geometry(3.0, 1.0, cal.C, S);
  const double a = base.a_tilde0 / 4.0;
  const auto geo = sobolev_geometry(3.0, a, cal.C, S);
  SolveConfig cfg;
  cfg.N = 3;
  cfg.R = 300.0;
  cfg.M = 3001;
  cfg.seed_width = 20.0;
  const auto r = local_minimize_m0(a, 3.0, cfg, geo);
  c.add(r.status == Status::Converged, fmt::format("a = a_tilde0/4 = {}: {}", g(a), to_string(r.status)));
  c.add(r.energy < 0.0, fmt::format("m0 = {} < 0", g(r.energy)));
  c.add(r.breakdown.kinetic < geo.t_star0,
        fmt::format("kinetic {} < t_star0 = {}", g(r.breakdown.kinetic), g(geo.t_star0)));
  int near = 0, bad = 0;
  for (const auto& pt : r.trajectory) {
    if (pt.kinetic < 0.99 * geo.t_star0) continue;
    ++near;
    if (pt.psi <= 0.0) ++bad;
  }
  c.add(bad == 0, fmt::format("trajectory points with kinetic >= 0.99 t_star0: {}, with psi <= 0: {}", near, bad));
  // Probe the boundary of the kinetic ball along the fiber of the minimizer.
  const Nonlinearity nl = Nonlinearity::sobolev_critical(3.0, 1.0);
  double lo = 1.0, hi = 1.0;
  while (kinetic(stretch(r.field, hi)) < geo.t_star0 && hi < 1.0e4) hi *= 2.0;
  for (int k = 0; k < 60; ++k) {
    const double mid = std::sqrt(lo * hi);
    (kinetic(stretch(r.field, mid)) < geo.t_star0 ? lo : hi) = mid;
  }
  const RadialField edge = stretch(r.field, lo);
  const double edge_psi = psi(edge, nl);
  c.add(edge_psi > 0.0, fmt::format("fiber point at kinetic {} (t_star0 {}): psi = {} > 0", g(kinetic(edge)),
                                    g(geo.t_star0), g(edge_psi)));
  c.o.report = {{"geometry", geo.to_json()},
                {"result", r.to_json()},
                {"trajectory_points", r.trajectory.size()},
                {"near_cap", near},
                {"edge_psi", edge_psi}};
  return c.done();
}

// 10
Outcome gn_tm_suite() {
  Checks c;
  nlohmann::json rep = nlohmann::json::array();
  for (int N : {2, 3}) {
    for (bool l1 : {false, true}) {
      const auto cal = l1 ? calibrate_gn_l1(N, 4.0, 1000, 1) : calibrate_gn(N, 4.0, 1000, 1);
      const auto ver = verify_gn(cal, 1000, 2);
      c.add(ver.violations == 0,
            fmt::format("{} N={}: C = {}, {} fresh samples, {} violations, min relative margin {}",
                        l1 ? "L1 form on f(v)^2, t=4" : "s=4", N, g(cal.C), ver.samples, ver.violations,
                        g(ver.min_margin)));
      rep.push_back({{"calibration", cal.to_json()}, {"verification", ver.to_json()}});
    }
  }
  const auto grid = make_grid(2, 14.0, 1401);
  bool finite = true;
  nlohmann::json gauss = nlohmann::json::array();
  for (double beta : {1.0, 2.0 * 3.141592653589793, 4.0 * 3.141592653589793, 20.0}) {
    const double v = tm_integral(sample_gaussian(grid, 1.0, 1.0), beta);
    finite = finite && std::isfinite(v);
    gauss.push_back({{"beta", beta}, {"value", v}});
  }
  c.add(finite, "Trudinger-Moser integral finite for a unit Gaussian at beta in {1, 2pi, 4pi, 20}");
  const auto tm = tm_check(2.0 * 3.141592653589793, 100, 3);
  c.add(tm.all_finite && tm.samples == 100,
        fmt::format("beta = 2pi over {} admissible fields: all finite, max {}", tm.samples, g(tm.max_integral)));
  c.o.report = {{"gn", rep}, {"tm_gaussian", gauss}, {"tm", tm.to_json()}};
  return c.done();
}

// 11
Outcome exp_bound_suite() {
  Checks c;
  const double p = 8.0, zeta0 = 1.0;
  const double lm_ref = lambda_max(8.0, 1.0);
  c.add(lm_ref == 0.03515625, fmt::format("Lambda_max(p=8, xi=1) = {:.17g} (0.03515625)", lm_ref));
  const auto ref = build_reference(1.0, p, ground_state_config());
  const auto rc = check_reference(ref, p);
  c.add(rc.passed, fmt::format("reference a=1: {} m* = {} lambda = {} int|f|^p = {} <= {}", to_string(ref.status),
                               g(rc.m_star), g(rc.lambda), g(rc.Ip), g(rc.Ip_bound)));
  const auto xs = xi_star(p, zeta0, ref);
  const auto rep = exp_level_bound(1.0, Nonlinearity::exp_critical(zeta0, 2.0 * xs.value, p), ref);
  c.add(rep.bound_below, fmt::format("xi = 2 xi* = {}: bound {} < pi/zeta0 = {} (margin {}; Upsilon max {}, "
                                     "fiber max {}, bound reaches pi/zeta0 only for xi > {})",
                                     g(rep.xi), g(rep.bound), g(rep.pi_over_zeta0), g(rep.margin), g(rep.upsilon_max),
                                     g(rep.fiber_max), g(xs.chain_equality)));
  const double l1 = lambda_max(p, xs.value), l10 = lambda_max(p, 10.0 * xs.value),
               l100 = lambda_max(p, 100.0 * xs.value);
  c.add(l1 > l10 && l10 > l100,
        fmt::format("Lambda_max over xi*, 10 xi*, 100 xi*: {} > {} > {}", g(l1), g(l10), g(l100)));
  c.o.report = {{"reference", ref.to_json()}, {"reference_check", rc.to_json()}, {"bound", rep.to_json()},
                {"lambda_max_sweep", {l1, l10, l100}}};
  return c.done();
}

// 12
Outcome determinism_suite() {
  Checks c;
  TempDir tmp;
  nlohmann::json rep = nlohmann::json::array();
  for (std::size_t i = 0; i < kSigmaMasses.size(); ++i) {
    const double a = kSigmaMasses[i];
    const std::string cfg = tmp.file(fmt::format("cfg{}.json", i));
    cli::emit_json({{"N", 2}, {"R", 20.0}, {"M", 2001}, {"a", a}, {"adapt_grid", true}, {"seed", 1},
                    {"nonlinearity", {{"variant", "power"}, {"p", 7.0}}}},
                   cfg);
    std::string first, second;
    int codes[2];
    for (int run = 0; run < 2; ++run) {
      const std::string out = tmp.file(fmt::format("r{}_{}.json", i, run));
      codes[run] = cli_run({"minimize", "--mode", "sigma", "--config", cfg, "--out", out});
      (run == 0 ? first : second) = slurp(out);
    }
    const bool same = codes[0] == 0 && codes[1] == 0 && !first.empty() && first == second;
    c.add(same, fmt::format("a={}: exit codes {} {}, {} bytes, identical {}", a, codes[0], codes[1], first.size(),
                            first == second));
    rep.push_back({{"a", a}, {"bytes", first.size()}, {"identical", first == second}});
  }
  c.o.report = rep;
  return c.done();
}

}  // namespace

const std::vector<Suite>& all() {
  static const std::vector<Suite> suites = {
      {1, "f-properties", 1.0, dual_map_suite},
      {2, "identities", 30.0, identity_suite},
      {3, "stretch", 30.0, stretch_suite},
      {4, "trichotomy", 300.0, trichotomy_suite},
      {5, "threshold", 600.0, threshold_suite},
      {6, "ground-state", 600.0, ground_state_suite},
      {7, "nonexistence", 30.0, nonexistence_suite},
      {8, "sobolev-geometry", 10.0, sobolev_suite},
      {9, "local-min", 300.0, local_min_suite},
      {10, "gn-tm", 120.0, gn_tm_suite},
      {11, "exp-bound", 600.0, exp_bound_suite},
      {12, "determinism", 1200.0, determinism_suite},
  };
  return suites;
}

const Suite& find(const std::string& name) {
  for (const auto& s : all())
    if (s.name == name || std::to_string(s.id) == name) return s;
  throw ConfigError(fmt::format("check: unknown suite '{}'", name));
}

Outcome execute(const Suite& s) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = s.run();
  } catch (const std::exception& e) {
    o = Outcome{};
    o.passed = false;
    o.lines.push_back(fmt::format("FAIL threw: {}", e.what()));
  }
  o.id = s.id;
  o.name = s.name;
  o.budget_seconds = s.budget_seconds;
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = o.seconds <= s.budget_seconds;
  o.lines.push_back(fmt::format("{} runtime {:.2f}s within {:.0f}s", in_time ? "ok  " : "FAIL", o.seconds,
                                s.budget_seconds));
  o.passed = o.passed && in_time;
  return o;
}

}  // namespace dualwave::suites
