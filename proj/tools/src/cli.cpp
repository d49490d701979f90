#include "dualwave/cli.hpp"

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "dualwave/calibration.hpp"
#include "dualwave/dual_map.hpp"
#include "dualwave/error.hpp"
#include "dualwave/functionals.hpp"
#include "dualwave/geometry.hpp"
#include "dualwave/scalings.hpp"
#include "dualwave/solver.hpp"
#include "dualwave/suites.hpp"

namespace dualwave::cli {

namespace {

class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "io"; }
};

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + fmt::format(".tmp{}", static_cast<long>(::getpid()));
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError(fmt::format("cannot open {} for writing", tmp.string()));
    f << content;
    f.flush();
    if (!f) {
      f.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError(fmt::format("write to {} failed", tmp.string()));
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError(fmt::format("cannot move output into {}", path));
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

void emit_csv(const CsvTable& table, const std::string& path) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_field(cells[i]);
    }
    out += "\r\n";
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  write_atomic(path, out);
}

void emit_json(const nlohmann::json& value, const std::string& path) { write_atomic(path, value.dump(2) + "\n"); }

std::vector<double> parse_a_grid(const std::string& spec) {
  const auto bad = [&] { return ConfigError(fmt::format("a-grid: '{}' is not lo:hi:logK or lo:hi:linK", spec)); };
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string::npos ? c1 : spec.find(':', c1 + 1);
  if (c2 == std::string::npos) throw bad();
  double lo, hi;
  int k;
  bool log;
  try {
    std::size_t used = 0;
    lo = std::stod(spec.substr(0, c1), &used);
    if (used != c1) throw bad();
    hi = std::stod(spec.substr(c1 + 1, c2 - c1 - 1), &used);
    if (used != c2 - c1 - 1) throw bad();
    const std::string tail = spec.substr(c2 + 1);
    if (tail.rfind("log", 0) == 0) {
      log = true;
    } else if (tail.rfind("lin", 0) == 0) {
      log = false;
    } else {
      throw bad();
    }
    k = std::stoi(tail.substr(3), &used);
    if (used != tail.size() - 3) throw bad();
  } catch (const std::logic_error&) {
    throw bad();
  }
  if (!(lo > 0.0) || !(hi >= lo) || k < 1 || (k == 1 && hi != lo)) throw bad();
  std::vector<double> out;
  for (int i = 0; i < k; ++i) {
    const double s = k == 1 ? 0.0 : static_cast<double>(i) / (k - 1);
    out.push_back(log ? lo * std::pow(hi / lo, s) : lo + (hi - lo) * s);
  }
  out.back() = hi;
  return out;
}

nlohmann::json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(fmt::format("config: cannot read {}", path));
  try {
    nlohmann::json j = nlohmann::json::parse(f);
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(fmt::format("config: {}", e.what()));
  }
}

namespace {

const std::set<std::string> kSolveKeys = {"N",        "R",         "M",        "a",
                                          "step0",    "shrink",    "max_outer", "max_inner",
                                          "tol_grad", "tol_G",     "unbounded_floor", "seed",
                                          "restarts", "seed_width", "experimental", "adapt_grid",
                                          "adapt_widths"};

// Splits a flat config into solve keys and run keys; anything else is rejected.
struct RunConfig {
  nlohmann::json run = nlohmann::json::object();
  SolveConfig solve;
};

RunConfig parse_run_config(const nlohmann::json& j, const std::set<std::string>& run_keys) {
  RunConfig rc;
  nlohmann::json solve = nlohmann::json::object();
  for (const auto& [k, v] : j.items()) {
    if (kSolveKeys.count(k)) {
      solve[k] = v;
    } else if (run_keys.count(k)) {
      rc.run[k] = v;
    } else {
      throw ConfigError(fmt::format("config.{}: unknown key", k));
    }
  }
  rc.solve = SolveConfig::from_json(solve, "config");
  return rc;
}

template <typename T>
T run_value(const RunConfig& rc, const std::string& key, const T& fallback) {
  if (!rc.run.contains(key)) return fallback;
  try {
    return rc.run.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(fmt::format("config.{}: wrong type", key));
  }
}

template <typename T>
std::optional<T> run_optional(const RunConfig& rc, const std::string& key) {
  if (!rc.run.contains(key)) return std::nullopt;
  return run_value<T>(rc, key, T{});
}

// Flags shared by the solving subcommands; set values override the config.
struct Overrides {
  std::string config;
  std::optional<double> a, p, R;
  std::optional<int> N, M, restarts;
  std::optional<std::uint64_t> seed;
  bool experimental = false;
  bool adapt_grid = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "flat JSON config");
    app->add_option("--a", a, "mass");
    app->add_option("--p", p, "power exponent");
    app->add_option("--N", N, "dimension");
    app->add_option("--R", R, "box radius");
    app->add_option("--M", M, "node count");
    app->add_option("--seed", seed, "random seed");
    app->add_option("--restarts", restarts, "seeds per solve");
    app->add_flag("--experimental", experimental, "allow exponential-critical minimization");
    app->add_flag("--adapt-grid", adapt_grid, "rescale R to the ground-state width");
  }

  RunConfig load(const std::set<std::string>& run_keys) const {
    RunConfig rc = parse_run_config(config.empty() ? nlohmann::json::object() : load_config(config), run_keys);
    if (a) rc.solve.a = *a;
    if (p) rc.run["p"] = *p;
    if (R) rc.solve.R = *R;
    if (N) rc.solve.N = *N;
    if (M) rc.solve.M = *M;
    if (restarts) rc.solve.restarts = *restarts;
    if (seed) rc.solve.seed = *seed;
    if (experimental) rc.solve.experimental = true;
    if (adapt_grid) rc.solve.adapt_grid = true;
    rc.solve.validate();
    return rc;
  }
};

Nonlinearity nonlinearity_of(const RunConfig& rc) {
  if (rc.run.contains("nonlinearity")) return Nonlinearity::from_json(rc.run.at("nonlinearity"));
  if (rc.run.contains("p")) return Nonlinearity::power(run_value<double>(rc, "p", 0.0));
  throw ConfigError("config: needs 'nonlinearity' or 'p'");
}

double required_p(const RunConfig& rc) {
  if (!rc.run.contains("p")) throw ConfigError("config.p: required");
  return run_value<double>(rc, "p", 0.0);
}

std::string status_cell(const CurveRow& r) { return r.error.empty() ? to_string(r.status) : "Error"; }

CsvTable curve_csv(const CurveTable& t) {
  CsvTable csv{{"a", "status", "psi", "lambda", "G_residual"}, {}};
  for (const auto& r : t.rows) {
    if (!r.error.empty()) {
      csv.rows.push_back({format_double(r.a), status_cell(r), "", "", ""});
      continue;
    }
    csv.rows.push_back({format_double(r.a), status_cell(r), format_double(r.psi), format_double(r.lambda),
                        format_double(r.G_residual)});
  }
  return csv;
}

int exit_for(const Error& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const ShapeError*>(&e))
    return kConfig;
  return kNumeric;
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message, int code) {
  err << nlohmann::json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}}.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"dualwave: normalized solutions of the quasilinear Schroedinger equation"};
  app.require_subcommand(1);
  int code = kOk;

  // transform-table
  double tt_tmax = 10.0;
  int tt_samples = 101;
  std::string tt_out;
  auto* tt = app.add_subcommand("transform-table", "tabulate f and f'");
  tt->add_option("--tmax", tt_tmax, "largest t");
  tt->add_option("--samples", tt_samples, "number of rows");
  tt->add_option("--out", tt_out, "CSV path")->required();
  tt->callback([&] {
    if (!(tt_tmax > 0.0) || tt_samples < 2) throw ConfigError("transform-table: needs tmax > 0 and samples >= 2");
    CsvTable csv{{"t", "f", "fprime"}, {}};
    const auto& map = default_dual_map();
    for (int k = 0; k < tt_samples; ++k) {
      const double t = tt_tmax * k / (tt_samples - 1);
      const auto v = map.eval_with_prime(t);
      csv.rows.push_back({format_double(t), format_double(v.f), format_double(v.fprime)});
    }
    emit_csv(csv, tt_out);
  });

  // fiber-scan
  Overrides fs_ov;
  double fs_tmin = 0.25, fs_tmax = 4.0;
  int fs_steps = 61;
  std::string fs_out, fs_fields;
  auto* fs = app.add_subcommand("fiber-scan", "scan the fiber t -> Psi(v_t) of a Gaussian seed");
  fs_ov.attach(fs);
  fs->add_option("--tmin", fs_tmin, "smallest t");
  fs->add_option("--tmax", fs_tmax, "largest t");
  fs->add_option("--steps", fs_steps, "log-spaced t values");
  fs->add_option("--out", fs_out, "CSV path")->required();
  fs->add_option("--emit-fields", fs_fields, "JSON path for the stretched fields");
  fs->callback([&] {
    const RunConfig rc = fs_ov.load({"nonlinearity", "p", "amplitude", "width"});
    if (!(fs_tmin > 0.0) || !(fs_tmax >= fs_tmin) || fs_steps < 1)
      throw ConfigError("fiber-scan: needs 0 < tmin <= tmax and steps >= 1");
    const Nonlinearity nl = nonlinearity_of(rc);
    const auto grid = make_grid(rc.solve.N, rc.solve.R, rc.solve.M);
    const RadialField v = mass_project(
        sample_gaussian(grid, run_value<double>(rc, "amplitude", 1.0), run_value<double>(rc, "width", 1.0)),
        rc.solve.a);
    const FiberProfile fp(v, nl);
    CsvTable csv{{"t", "psi_t", "dpsi_t", "A_t", "B_t", "split_residual"}, {}};
    nlohmann::json fields = nlohmann::json::array();
    for (int k = 0; k < fs_steps; ++k) {
      const double s = fs_steps == 1 ? 0.0 : static_cast<double>(k) / (fs_steps - 1);
      const double t = fs_tmin * std::pow(fs_tmax / fs_tmin, s);
      csv.rows.push_back({format_double(t), format_double(fp.psi(t)), format_double(fp.dpsi(t)),
                          format_double(fp.surplus_A(t)), format_double(fp.surplus_B(t)),
                          format_double(fp.splitting_residual(t))});
      if (!fs_fields.empty()) {
        const RadialField w = stretch(v, t);
        fields.push_back({{"t", t}, {"mass", mass(w)}, {"psi", psi(w, nl)}, {"field", field_to_json(w)}});
      }
    }
    emit_csv(csv, fs_out);
    if (!fs_fields.empty()) emit_json({{"a", rc.solve.a}, {"fields", fields}}, fs_fields);
  });

  // minimize
  Overrides mn_ov;
  std::string mn_mode, mn_out, mn_field_out;
  auto* mn = app.add_subcommand("minimize", "F(a), sigma(a) or m0(a)");
  mn_ov.attach(mn);
  mn->add_option("--mode", mn_mode, "F, sigma or m0")->required()->check(CLI::IsMember({"F", "sigma", "m0"}));
  mn->add_option("--out", mn_out, "result JSON path")->required();
  mn->add_option("--field-out", mn_field_out, "CSV path for the minimizer");
  mn->callback([&] {
    const RunConfig rc = mn_ov.load({"nonlinearity", "p", "C", "S"});
    const double a = rc.solve.a;
    std::optional<SolveResult> res;
    nlohmann::json extra = nlohmann::json::object();
    if (mn_mode == "F") {
      res = minimize_F(a, required_p(rc), rc.solve);
      extra["nonlinearity"] = Nonlinearity::power(required_p(rc)).to_json();
    } else if (mn_mode == "sigma") {
      const Nonlinearity nl = nonlinearity_of(rc);
      res = minimize_sigma(a, nl, rc.solve);
      extra["nonlinearity"] = nl.to_json();
    } else {
      const double p = required_p(rc);
      const double S = run_value<double>(rc, "S", talenti_S());
      const double C = rc.run.contains("C") ? run_value<double>(rc, "C", 0.0)
                                            : calibrate_gn(3, p, 1000, rc.solve.seed).C;
      const auto geo = sobolev_geometry(p, a, C, S);
      res = local_minimize_m0(a, p, rc.solve, geo);
      extra["nonlinearity"] = Nonlinearity::sobolev_critical(p, 1.0).to_json();
      extra["geometry"] = geo.to_json();
    }
    nlohmann::json j = res->to_json(mn_field_out);
    j["mode"] = mn_mode;
    for (const auto& [k, v] : extra.items()) j[k] = v;
    if (!mn_field_out.empty()) write_atomic(mn_field_out, field_to_csv(res->field));
    emit_json(j, mn_out);
    if (res->status == Status::NonexistenceRegime) {
      report_error(err, "regime", "minimize: nonexistence regime, no normalized solution with negative multiplier",
                   kRegime);
      code = kRegime;
    }
  });

  // curve
  Overrides cv_ov;
  std::string cv_mode, cv_grid, cv_out;
  auto* cv = app.add_subcommand("curve", "F or sigma over a grid of masses");
  cv_ov.attach(cv);
  cv->add_option("--mode", cv_mode, "F or sigma")->required()->check(CLI::IsMember({"F", "sigma"}));
  cv->add_option("--a-grid", cv_grid, "lo:hi:logK or lo:hi:linK")->required();
  cv->add_option("--out", cv_out, "CSV path")->required();
  cv->callback([&] {
    const RunConfig rc = cv_ov.load({"nonlinearity", "p"});
    const auto grid = parse_a_grid(cv_grid);
    if (cv_mode == "F") {
      emit_csv(curve_csv(scan_F_curve(grid, required_p(rc), rc.solve)), cv_out);
    } else {
      const Nonlinearity nl = nonlinearity_of(rc);
      if (growth_classify(nl, rc.solve.N) == Regime::Nonexistence) {
        report_error(err, "regime", "curve: nonexistence regime", kRegime);
        code = kRegime;
        return;
      }
      emit_csv(curve_csv(scan_sigma_curve(grid, nl, rc.solve)), cv_out);
    }
  });

  // threshold
  Overrides th_ov;
  double th_lo = 0.01, th_hi = 100.0, th_tol = 0.01;
  int th_points = 9;
  std::string th_out;
  auto* th = app.add_subcommand("threshold", "bracket a_* and a_**");
  th_ov.attach(th);
  th->add_option("--a-lo", th_lo, "lower end of the scan");
  th->add_option("--a-hi", th_hi, "upper end of the scan");
  th->add_option("--tol", th_tol, "relative bracket width");
  th->add_option("--scan-points", th_points, "log scan points");
  th->add_option("--out", th_out, "JSON path")->required();
  th->callback([&] {
    const RunConfig rc = th_ov.load({"p"});
    const double p = required_p(rc);
    auto j = find_a_star(p, rc.solve.N, th_lo, th_hi, th_tol, rc.solve, th_points).to_json();
    j["p"] = p;
    j["N"] = rc.solve.N;
    emit_json(j, th_out);
  });

  // sobolev-geometry
  double sg_p = 3.0, sg_a = 1.0;
  std::optional<double> sg_C, sg_S, sg_A, sg_B;
  int sg_samples = 100;
  std::uint64_t sg_seed = 1;
  std::string sg_out;
  auto* sg = app.add_subcommand("sobolev-geometry", "rho_a, K0, a_tilde0 and the lower-bound check");
  sg->add_option("--p", sg_p, "exponent in (2, 10/3)");
  sg->add_option("--a", sg_a, "mass");
  sg->add_option("--C", sg_C, "Gagliardo-Nirenberg constant (calibrated when absent)");
  sg->add_option("--S", sg_S, "Sobolev constant (Talenti quadrature when absent)");
  sg->add_option("--A", sg_A, "use A directly (with --B)");
  sg->add_option("--B", sg_B, "use B directly (with --A)");
  sg->add_option("--samples", sg_samples, "random fields for the lower-bound check");
  sg->add_option("--seed", sg_seed, "random seed");
  sg->add_option("--out", sg_out, "JSON path")->required();
  sg->callback([&] {
    nlohmann::json j;
    if (sg_A || sg_B) {
      if (!sg_A || !sg_B) throw ConfigError("sobolev-geometry: --A and --B go together");
      j["geometry"] = sobolev_geometry_AB(sg_p, sg_a, *sg_A, *sg_B).to_json();
    } else {
      double C;
      if (sg_C) {
        C = *sg_C;
      } else {
        const auto cal = calibrate_gn(3, sg_p, 1000, sg_seed);
        j["calibration"] = cal.to_json();
        C = cal.C;
      }
      const auto geo = sobolev_geometry(sg_p, sg_a, C, sg_S.value_or(talenti_S()));
      j["geometry"] = geo.to_json();
      j["lower_bound"] = check_lower_bound(geo, sg_samples, sg_seed).to_json();
    }
    emit_json(j, sg_out);
  });

  // exp-bound
  Overrides eb_ov;
  std::string eb_out;
  auto* eb = app.add_subcommand("exp-bound", "level bound for the exponential-critical model");
  eb_ov.attach(eb);
  eb->add_option("--out", eb_out, "JSON path")->required();
  eb->callback([&] {
    RunConfig rc = eb_ov.load({"p", "zeta0", "xi", "xi_factor"});
    const double p = required_p(rc);
    const double zeta0 = run_value<double>(rc, "zeta0", 1.0);
    if (rc.run.contains("xi") && rc.run.contains("xi_factor"))
      throw ConfigError("config: give either xi or xi_factor");
    const SolveResult ref = build_reference(rc.solve.a, p, rc.solve);
    const auto check = check_reference(ref, p);
    const auto xs = xi_star(p, zeta0, ref);
    const double xi = rc.run.contains("xi") ? run_value<double>(rc, "xi", 0.0)
                                            : run_value<double>(rc, "xi_factor", 2.0) * xs.value;
    const auto rep = exp_level_bound(rc.solve.a, Nonlinearity::exp_critical(zeta0, xi, p), ref);
    nlohmann::json j = rep.to_json();
    j["reference"] = ref.to_json();
    j["reference_check"] = check.to_json();
    nlohmann::json sweep = nlohmann::json::array();
    for (double f : {1.0, 10.0, 100.0})
      sweep.push_back({{"xi", f * xs.value}, {"lambda_max", lambda_max(p, f * xs.value)}});
    j["lambda_max_sweep"] = sweep;
    emit_json(j, eb_out);
  });

  // check
  std::string ck_suite, ck_out;
  auto* ck = app.add_subcommand("check", "run a verification suite");
  ck->add_option("--suite", ck_suite, "suite name or 'all'")->required();
  ck->add_option("--out", ck_out, "JSON report path");
  ck->callback([&] {
    std::vector<const suites::Suite*> chosen;
    if (ck_suite == "all") {
      for (const auto& s : suites::all()) chosen.push_back(&s);
    } else {
      chosen.push_back(&suites::find(ck_suite));
    }
    nlohmann::json reports = nlohmann::json::array();
    bool ok = true;
    for (const auto* s : chosen) {
      const auto o = suites::execute(*s);
      out << fmt::format("[{}] {:>2} {} ({:.1f}s)\n", o.passed ? "PASS" : "FAIL", o.id, o.name, o.seconds);
      for (const auto& l : o.lines) out << "       " << l << "\n";
      reports.push_back(o.to_json());
      ok = ok && o.passed;
    }
    if (!ck_out.empty()) emit_json(chosen.size() == 1 ? reports[0] : reports, ck_out);
    if (!ok) {
      report_error(err, "check", fmt::format("check: suite {} failed", ck_suite), kNumeric);
      code = kNumeric;
    }
  });

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report_error(err, "config", e.what(), kConfig);
    return kConfig;
  } catch (const Error& e) {
    const int c = exit_for(e);
    report_error(err, e.kind(), e.what(), c);
    return c;
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what(), kNumeric);
    return kNumeric;
  }
  return code;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace dualwave::cli
