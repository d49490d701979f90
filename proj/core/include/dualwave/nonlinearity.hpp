#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace dualwave {

/// h(t) = |t|^{p-2} t, H(t) = |t|^p / p.
struct Power {
  double p;
};

/// h(t) = kappa |t|^{p-2} t + |t|^{10} t (N = 3, Sobolev-critical 2*2^* = 12).
struct PowerPlusSobolevCritical {
  double p;
  double kappa = 1.0;
};

/// H(t) = xi |t|^p exp(zeta0 t^4), p > 6: exponential-critical growth in N = 2.
struct ExpCriticalModel {
  double zeta0;
  double xi;
  double p;
};

/// User supplied h and H. hprime falls back to central differences.
struct Custom {
  std::function<double(double)> h;
  std::function<double(double)> H;
  std::function<double(double)> hprime;
  std::string label = "custom";
};

/// Constants of the growth hypotheses. mu1/mu2 bound t h(t) / H(t);
/// L0/t0 parametrize H(t) <= L0 |h(t)| for |t| >= t0.
struct HypothesisParams {
  std::optional<double> mu1;
  std::optional<double> mu2;
  double L0 = 1.0;
  double t0 = 1.0;
};

/// Largest admissible zeta0 t^4 before exp() is refused.
inline constexpr double kExpCap = 700.0;

class Nonlinearity {
 public:
  using Variant = std::variant<Power, PowerPlusSobolevCritical, ExpCriticalModel, Custom>;

  explicit Nonlinearity(Variant v, HypothesisParams params = {});

  static Nonlinearity power(double p) { return Nonlinearity(Power{p}); }
  static Nonlinearity sobolev_critical(double p, double kappa = 1.0) {
    return Nonlinearity(PowerPlusSobolevCritical{p, kappa});
  }
  static Nonlinearity exp_critical(double zeta0, double xi, double p) {
    return Nonlinearity(ExpCriticalModel{zeta0, xi, p});
  }
  static Nonlinearity custom(Custom c, HypothesisParams params = {}) {
    return Nonlinearity(std::move(c), params);
  }

  double h(double t) const;
  double H(double t) const;
  double hprime(double t) const;
  /// log|h(t)| evaluated without forming exp(zeta0 t^4); -inf at h = 0.
  double log_abs_h(double t) const;

  const Variant& variant() const { return variant_; }
  const HypothesisParams& params() const { return params_; }

  /// Pinch constants: built-in values unless overridden in params.
  std::optional<double> mu1() const;
  std::optional<double> mu2() const;
  /// The exponent p of the built-in families.
  std::optional<double> exponent() const;

  std::string name() const;
  nlohmann::json to_json() const;
  /// {"variant":"power","p":7}, {"variant":"sobolev_critical","p":3,"kappa":1},
  /// {"variant":"exp_critical","zeta0":1,"xi":1,"p":8}. Throws ConfigError.
  static Nonlinearity from_json(const nlohmann::json& j);

 private:
  Variant variant_;
  HypothesisParams params_;
};

enum class Regime {
  MassSubcritical,
  MassCriticalBand,
  MassSupercritical,
  SobolevCritical,
  ExpCritical,
  Nonexistence,
  UnsupportedBoundary,
};

std::string to_string(Regime r);

/// Classifies by the exponents 2 + 4/N, 4 + 4/N and 2*2^* (= 12 for N = 3).
Regime growth_classify(const Nonlinearity& nl, int N);

enum class HypothesisSet {
  HSet,       // (h1)-(h3)
  ExpSet,     // (H1)-(H4)
  ExpGrowth,  // critical exponential growth at zeta0
};

struct HypothesisItem {
  std::string name;
  bool passed = false;
  nlohmann::json detail;
};

struct ValidationReport {
  HypothesisSet set = HypothesisSet::HSet;
  std::vector<HypothesisItem> items;
  bool passed() const;
  nlohmann::json to_json() const;
};

/// Log-spaced positive samples on [lo, hi]; negatives are added by the
/// validators themselves.
std::vector<double> log_samples(double lo, double hi, int count);

/// Sampled check of a hypothesis set. The report carries violations
/// instead of throwing. Requires >= 100 samples.
ValidationReport validate_hypotheses(const Nonlinearity& nl, HypothesisSet set, int N,
                                     const std::vector<double>& t_samples);
ValidationReport validate_hypotheses(const Nonlinearity& nl, HypothesisSet set, int N);

}  // namespace dualwave
