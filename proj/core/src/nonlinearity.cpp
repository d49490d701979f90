#include "dualwave/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "dualwave/error.hpp"

namespace dualwave {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double exp_factor(double zeta0, double a) {
  const double e = zeta0 * a * a * a * a;
  if (e > kExpCap)
    throw RangeError(fmt::format("exp-critical nonlinearity: zeta0 t^4 = {} exceeds cap {}", e, kExpCap));
  return std::exp(e);
}

}  // namespace

Nonlinearity::Nonlinearity(Variant v, HypothesisParams params) : variant_(std::move(v)), params_(params) {
  std::visit(overloaded{
                 [](const Power& x) {
                   if (!(x.p > 2.0)) throw ConfigError(fmt::format("power: p must exceed 2, got {}", x.p));
                 },
                 [](const PowerPlusSobolevCritical& x) {
                   if (!(x.p > 2.0 && x.p < 12.0))
                     throw ConfigError(fmt::format("sobolev_critical: p must lie in (2, 12), got {}", x.p));
                   if (!(x.kappa > 0.0)) throw ConfigError("sobolev_critical: kappa must be positive");
                 },
                 [](const ExpCriticalModel& x) {
                   if (!(x.zeta0 > 0.0)) throw ConfigError("exp_critical: zeta0 must be positive");
                   if (!(x.xi > 0.0)) throw ConfigError("exp_critical: xi must be positive");
                   if (!(x.p > 2.0)) throw ConfigError("exp_critical: p must exceed 2");
                 },
                 [](const Custom& x) {
                   if (!x.h || !x.H) throw ConfigError("custom nonlinearity needs both h and H");
                 },
             },
             variant_);
}

double Nonlinearity::h(double t) const {
  if (const auto* c = std::get_if<Custom>(&variant_)) return c->h(t);
  const double a = std::abs(t);
  const double mag = std::visit(overloaded{
                                    [a](const Power& x) { return std::pow(a, x.p - 1.0); },
                                    [a](const PowerPlusSobolevCritical& x) {
                                      const double a2 = a * a;
                                      const double a5 = a2 * a2 * a;
                                      return x.kappa * std::pow(a, x.p - 1.0) + a5 * a5 * a;
                                    },
                                    [a](const ExpCriticalModel& x) {
                                      const double e = exp_factor(x.zeta0, a);
                                      return x.xi * e * (x.p * std::pow(a, x.p - 1.0) + 4.0 * x.zeta0 * std::pow(a, x.p + 3.0));
                                    },
                                    [](const Custom&) { return 0.0; },
                                },
                                variant_);
  return t < 0.0 ? -mag : mag;
}

double Nonlinearity::H(double t) const {
  const double a = std::abs(t);
  return std::visit(overloaded{
                        [a](const Power& x) { return std::pow(a, x.p) / x.p; },
                        [a](const PowerPlusSobolevCritical& x) {
                          const double a2 = a * a;
                          const double a6 = a2 * a2 * a2;
                          return x.kappa * std::pow(a, x.p) / x.p + a6 * a6 / 12.0;
                        },
                        [a](const ExpCriticalModel& x) { return x.xi * std::pow(a, x.p) * exp_factor(x.zeta0, a); },
                        [t](const Custom& x) { return x.H(t); },
                    },
                    variant_);
}

double Nonlinearity::hprime(double t) const {
  const double a = std::abs(t);
  return std::visit(overloaded{
                        [a](const Power& x) { return (x.p - 1.0) * std::pow(a, x.p - 2.0); },
                        [a](const PowerPlusSobolevCritical& x) {
                          const double a2 = a * a;
                          const double a5 = a2 * a2 * a;
                          return x.kappa * (x.p - 1.0) * std::pow(a, x.p - 2.0) + 11.0 * a5 * a5;
                        },
                        [a](const ExpCriticalModel& x) {
                          const double e = exp_factor(x.zeta0, a);
                          const double z = x.zeta0;
                          return x.xi * e *
                                 (x.p * (x.p - 1.0) * std::pow(a, x.p - 2.0) +
                                  4.0 * z * (2.0 * x.p + 3.0) * std::pow(a, x.p + 2.0) +
                                  16.0 * z * z * std::pow(a, x.p + 6.0));
                        },
                        [t](const Custom& x) {
                          if (x.hprime) return x.hprime(t);
                          const double eps = 1.0e-6 * std::max(1.0, std::abs(t));
                          return (x.h(t + eps) - x.h(t - eps)) / (2.0 * eps);
                        },
                    },
                    variant_);
}

double Nonlinearity::log_abs_h(double t) const {
  const double a = std::abs(t);
  if (const auto* x = std::get_if<ExpCriticalModel>(&variant_)) {
    if (a == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(x->xi) + std::log(x->p * std::pow(a, x->p - 1.0) + 4.0 * x->zeta0 * std::pow(a, x->p + 3.0)) +
           x->zeta0 * a * a * a * a;
  }
  const double v = std::abs(h(t));
  return v == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(v);
}

std::optional<double> Nonlinearity::mu1() const {
  if (params_.mu1) return params_.mu1;
  return std::visit(overloaded{
                        [](const Power& x) -> std::optional<double> { return x.p; },
                        [](const PowerPlusSobolevCritical& x) -> std::optional<double> { return x.p; },
                        [](const ExpCriticalModel& x) -> std::optional<double> { return x.p; },
                        [](const Custom&) -> std::optional<double> { return std::nullopt; },
                    },
                    variant_);
}

std::optional<double> Nonlinearity::mu2() const {
  if (params_.mu2) return params_.mu2;
  return std::visit(overloaded{
                        [](const Power& x) -> std::optional<double> { return x.p; },
                        [](const PowerPlusSobolevCritical&) -> std::optional<double> { return 12.0; },
                        [](const ExpCriticalModel&) -> std::optional<double> {
                          return std::numeric_limits<double>::infinity();
                        },
                        [](const Custom&) -> std::optional<double> { return std::nullopt; },
                    },
                    variant_);
}

std::optional<double> Nonlinearity::exponent() const {
  return std::visit(overloaded{
                        [](const Power& x) -> std::optional<double> { return x.p; },
                        [](const PowerPlusSobolevCritical& x) -> std::optional<double> { return x.p; },
                        [](const ExpCriticalModel& x) -> std::optional<double> { return x.p; },
                        [](const Custom&) -> std::optional<double> { return std::nullopt; },
                    },
                    variant_);
}

std::string Nonlinearity::name() const {
  return std::visit(overloaded{
                        [](const Power& x) { return fmt::format("Power({})", x.p); },
                        [](const PowerPlusSobolevCritical& x) {
                          return fmt::format("PowerPlusSobolevCritical({}, kappa={})", x.p, x.kappa);
                        },
                        [](const ExpCriticalModel& x) {
                          return fmt::format("ExpCriticalModel(zeta0={}, xi={}, p={})", x.zeta0, x.xi, x.p);
                        },
                        [](const Custom& x) { return x.label; },
                    },
                    variant_);
}

nlohmann::json Nonlinearity::to_json() const {
  return std::visit(overloaded{
                        [](const Power& x) { return nlohmann::json{{"variant", "power"}, {"p", x.p}}; },
                        [](const PowerPlusSobolevCritical& x) {
                          return nlohmann::json{{"variant", "sobolev_critical"}, {"p", x.p}, {"kappa", x.kappa}};
                        },
                        [](const ExpCriticalModel& x) {
                          return nlohmann::json{{"variant", "exp_critical"}, {"zeta0", x.zeta0}, {"xi", x.xi}, {"p", x.p}};
                        },
                        [](const Custom& x) { return nlohmann::json{{"variant", "custom"}, {"label", x.label}}; },
                    },
                    variant_);
}

Nonlinearity Nonlinearity::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("nonlinearity: expected an object");
  auto number = [&](const char* key) -> double {
    if (!j.contains(key)) throw ConfigError(fmt::format("nonlinearity.{}: missing", key));
    if (!j.at(key).is_number()) throw ConfigError(fmt::format("nonlinearity.{}: expected a number", key));
    return j.at(key).get<double>();
  };
  auto only = [&](std::initializer_list<const char*> keys) {
    for (const auto& [k, _] : j.items()) {
      if (std::find_if(keys.begin(), keys.end(), [&](const char* a) { return k == a; }) == keys.end())
        throw ConfigError(fmt::format("nonlinearity.{}: unknown key", k));
    }
  };
  if (!j.contains("variant") || !j.at("variant").is_string())
    throw ConfigError("nonlinearity.variant: missing or not a string");
  const auto variant = j.at("variant").get<std::string>();
  if (variant == "power") {
    only({"variant", "p"});
    return power(number("p"));
  }
  if (variant == "sobolev_critical") {
    only({"variant", "p", "kappa"});
    return sobolev_critical(number("p"), j.contains("kappa") ? number("kappa") : 1.0);
  }
  if (variant == "exp_critical") {
    only({"variant", "zeta0", "xi", "p"});
    return exp_critical(number("zeta0"), number("xi"), number("p"));
  }
  throw ConfigError(fmt::format("nonlinearity.variant: unknown variant '{}'", variant));
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::MassSubcritical: return "mass-subcritical";
    case Regime::MassCriticalBand: return "mass-critical-band";
    case Regime::MassSupercritical: return "mass-supercritical";
    case Regime::SobolevCritical: return "sobolev-critical";
    case Regime::ExpCritical: return "exp-critical";
    case Regime::Nonexistence: return "nonexistence";
    case Regime::UnsupportedBoundary: return "unsupported-boundary";
  }
  return "unknown";
}

Regime growth_classify(const Nonlinearity& nl, int N) {
  if (N != 2 && N != 3) throw ConfigError("growth_classify: N must be 2 or 3");
  if (std::holds_alternative<PowerPlusSobolevCritical>(nl.variant())) return Regime::SobolevCritical;
  if (std::holds_alternative<ExpCriticalModel>(nl.variant())) return Regime::ExpCritical;
  const auto p = nl.mu1();
  if (!p) throw ConfigError("growth_classify: nonlinearity has no exponent or mu1");
  const double lower = 2.0 + 4.0 / N;
  const double critical = 4.0 + 4.0 / N;
  if (N == 3 && *p >= 12.0) return Regime::Nonexistence;
  if (*p < lower) return Regime::MassSubcritical;
  if (*p < critical) return Regime::MassCriticalBand;
  if (*p == critical) return Regime::UnsupportedBoundary;
  return Regime::MassSupercritical;
}

bool ValidationReport::passed() const {
  return std::all_of(items.begin(), items.end(), [](const HypothesisItem& i) { return i.passed; });
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& it : items) arr.push_back({{"name", it.name}, {"passed", it.passed}, {"detail", it.detail}});
  const char* set_name = set == HypothesisSet::HSet ? "h-set" : set == HypothesisSet::ExpSet ? "H-set" : "exp-growth";
  return {{"set", set_name}, {"passed", passed()}, {"items", arr}};
}

std::vector<double> log_samples(double lo, double hi, int count) {
  std::vector<double> out(count);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int k = 0; k < count; ++k) out[k] = std::pow(10.0, count == 1 ? a : a + (b - a) * k / (count - 1));
  return out;
}

namespace {

HypothesisItem check_h1(const Nonlinearity& nl, const std::vector<double>& ts) {
  // h(t) = o(t): |h(t)/t| small at the smallest sample and shrinking towards 0.
  const double t0 = ts.front();
  const double r0 = std::abs(nl.h(t0) / t0);
  const double r1 = std::abs(nl.h(10.0 * t0) / (10.0 * t0));
  HypothesisItem it{"h1", r0 <= 1.0e-2 && r0 <= r1, {{"ratio_at_tmin", r0}, {"ratio_at_10tmin", r1}}};
  return it;
}

HypothesisItem check_h2(const Nonlinearity& nl, int N, const std::vector<double>& ts) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double t : ts) {
    for (double s : {t, -t}) {
      double H;
      try {
        H = nl.H(s);
      } catch (const RangeError&) {
        continue;
      }
      const double r = s * nl.h(s) / H;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  const auto mu1 = nl.mu1();
  const auto mu2 = nl.mu2();
  nlohmann::json d{{"min_ratio", lo}, {"max_ratio", hi}};
  bool ok = mu1.has_value() && mu2.has_value();
  if (ok) {
    d["mu1"] = *mu1;
    d["mu2"] = std::isfinite(*mu2) ? nlohmann::json(*mu2) : nlohmann::json("inf");
    const double slack = 1.0e-9;
    const double upper = N == 3 ? 6.0 : std::numeric_limits<double>::infinity();
    const bool pinch = *mu1 * (1.0 - slack) <= lo && hi <= *mu2 * (1.0 + slack);
    const bool band = 4.0 + 4.0 / N < *mu1 && *mu1 <= *mu2 && *mu2 < upper;
    d["pinch_holds"] = pinch;
    d["band_holds"] = band;
    ok = pinch && band;
  } else {
    d["reason"] = "mu1/mu2 unknown";
  }
  return {"h2", ok, d};
}

HypothesisItem check_h3(const Nonlinearity& nl, int N, const std::vector<double>& ts) {
  const double e = 3.0 + 4.0 / N;
  auto ratio = [&](double t) { return (nl.h(t) * t - 2.0 * nl.H(t)) / (std::pow(std::abs(t), e) * t); };
  std::vector<double> sorted = ts;
  std::sort(sorted.begin(), sorted.end());
  double worst = 0.0;
  int violations = 0;
  auto scan = [&](const std::vector<double>& order) {
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (double t : order) {
      double r;
      try {
        r = ratio(t);
      } catch (const RangeError&) {
        continue;
      }
      if (!std::isnan(prev)) {
        const double drop = prev - r;
        const double tol = 1.0e-12 * std::max(std::abs(prev), std::abs(r));
        if (drop > tol) {
          ++violations;
          worst = std::max(worst, drop);
        }
      }
      prev = r;
    }
  };
  scan(sorted);
  std::vector<double> neg;
  for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) neg.push_back(-*it);
  scan(neg);
  return {"h3", violations == 0, {{"violations", violations}, {"worst_drop", worst}}};
}

}  // namespace

ValidationReport validate_hypotheses(const Nonlinearity& nl, HypothesisSet set, int N,
                                     const std::vector<double>& ts) {
  if (ts.size() < 100) throw ConfigError("validate_hypotheses: need at least 100 samples");
  ValidationReport rep;
  rep.set = set;
  switch (set) {
    case HypothesisSet::HSet:
      rep.items.push_back(check_h1(nl, ts));
      rep.items.push_back(check_h2(nl, N, ts));
      rep.items.push_back(check_h3(nl, N, ts));
      break;
    case HypothesisSet::ExpSet: {
      {
        const double t0 = ts.front();
        const double r0 = std::abs(nl.h(t0) / std::pow(t0, 5.0));
        const double r1 = std::abs(nl.h(10.0 * t0) / std::pow(10.0 * t0, 5.0));
        rep.items.push_back({"H1", r0 <= 1.0e-2 && r0 <= r1, {{"ratio_at_tmin", r0}, {"ratio_at_10tmin", r1}}});
      }
      {
        HypothesisItem it{"H2", false, {}};
        double p = 0.0;
        double xi = 0.0;
        if (const auto* x = std::get_if<ExpCriticalModel>(&nl.variant())) {
          p = x->p;
          xi = x->xi;
        } else if (const auto* x = std::get_if<Power>(&nl.variant())) {
          p = x->p;
          xi = 1.0 / x->p;
        }
        if (p > 0.0) {
          double worst = std::numeric_limits<double>::infinity();
          for (double t : ts) {
            try {
              worst = std::min(worst, (nl.H(t) - xi * std::pow(t, p)) / (xi * std::pow(t, p)));
            } catch (const RangeError&) {
            }
          }
          it.passed = p > 6.0 && worst >= -1.0e-12;
          it.detail = {{"p", p}, {"xi", xi}, {"worst_relative_margin", worst}};
        } else {
          it.detail = {{"reason", "no lower power bound known for this variant"}};
        }
        rep.items.push_back(it);
      }
      {
        double worst = std::numeric_limits<double>::infinity();
        int skipped = 0;
        for (double t : ts)
          for (double s : {t, -t}) {
            try {
              const double H = nl.H(s);
              const double th = s * nl.h(s);
              worst = std::min(worst, H > 0.0 ? (th - 8.0 * H) / th : -1.0);
            } catch (const RangeError&) {
              ++skipped;
            }
          }
        rep.items.push_back({"H3", worst >= -1.0e-12, {{"worst_relative_margin", worst}, {"skipped", skipped}}});
      }
      {
        const double L0 = nl.params().L0;
        const double t0 = nl.params().t0;
        double worst = std::numeric_limits<double>::infinity();
        int skipped = 0;
        for (double t : ts) {
          if (t < t0) continue;
          try {
            const double H = nl.H(t);
            worst = std::min(worst, (L0 * std::abs(nl.h(t)) - H) / H);
          } catch (const RangeError&) {
            ++skipped;
          }
        }
        rep.items.push_back(
            {"H4", worst >= -1.0e-12, {{"L0", L0}, {"t0", t0}, {"worst_relative_margin", worst}, {"skipped", skipped}}});
      }
      break;
    }
    case HypothesisSet::ExpGrowth: {
      const auto* x = std::get_if<ExpCriticalModel>(&nl.variant());
      if (!x) {
        rep.items.push_back({"exp-growth", false, {{"reason", "no critical exponent zeta0 for this variant"}}});
        break;
      }
      auto log_ratio = [&](double zeta, double t) { return nl.log_abs_h(t) - zeta * t * t * t * t; };
      const double above = 1.1 * x->zeta0;
      const double below = 0.9 * x->zeta0;
      const double a5 = log_ratio(above, 5.0), a6 = log_ratio(above, 6.0);
      const double b5 = log_ratio(below, 5.0), b6 = log_ratio(below, 6.0);
      const bool vanishes = a6 < a5 && a6 < std::log(1.0e-3);
      const bool blows_up = b6 > b5 && b6 > std::log(1.0e3);
      rep.items.push_back({"exp-growth",
                           vanishes && blows_up,
                           {{"log_ratio_above_t5", a5},
                            {"log_ratio_above_t6", a6},
                            {"log_ratio_below_t5", b5},
                            {"log_ratio_below_t6", b6}}});
      break;
    }
  }
  return rep;
}

ValidationReport validate_hypotheses(const Nonlinearity& nl, HypothesisSet set, int N) {
  return validate_hypotheses(nl, set, N, log_samples(1.0e-4, 1.0e3, 200));
}

}  // namespace dualwave
