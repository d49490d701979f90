#include "dualwave/dual_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "dualwave/error.hpp"

namespace dualwave {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
const double kFourthRootOf2 = std::pow(2.0, 0.25);

double newton_solve(double t, double guess, double tol, int max_iter) {
  // f(t) <= min(t, 2^{1/4} sqrt(t)) bounds the root from above.
  double lo = 0.0;
  double hi = std::min(t, kFourthRootOf2 * std::sqrt(t));
  double s = std::clamp(guess, lo, hi);
  for (int it = 0; it < max_iter; ++it) {
    const double g = DualMap::inverse(s) - t;
    if (g == 0.0) return s;
    if (g > 0.0)
      hi = s;
    else
      lo = s;
    double next = s - g / std::sqrt(1.0 + 2.0 * s * s);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - s);
    s = next;
    if (step <= tol + tol * std::abs(s)) {
      // One more Newton step squares the error; take it and stop.
      const double g2 = DualMap::inverse(s) - t;
      const double polished = s - g2 / std::sqrt(1.0 + 2.0 * s * s);
      return (polished >= lo && polished <= hi) ? polished : s;
    }
    if (hi - lo <= std::numeric_limits<double>::epsilon() * hi) return s;
  }
  throw NumericError(fmt::format("dual map: Newton did not converge for t = {}", t));
}

}  // namespace

DualMap::DualMap() : DualMap(Options{}) {}

DualMap::DualMap(Options opts) : opts_(opts) {
  if (!(opts_.t_max > 0.0) || !std::isfinite(opts_.t_max))
    throw ConfigError("dual map: t_max must be positive and finite");
  if (opts_.n_samples < 2) throw ConfigError("dual map: n_samples must be >= 2");
  if (!(opts_.tol > 0.0)) throw ConfigError("dual map: tol must be positive");
  dt_ = opts_.t_max / (opts_.n_samples - 1);
  table_t_.resize(opts_.n_samples);
  table_f_.resize(opts_.n_samples);
  double prev = 0.0;
  for (int k = 0; k < opts_.n_samples; ++k) {
    const double t = k == opts_.n_samples - 1 ? opts_.t_max : k * dt_;
    table_t_[k] = t;
    table_f_[k] = t == 0.0 ? 0.0 : newton_solve(t, std::max(prev, t / (1.0 + t)), opts_.tol, opts_.max_iter);
    prev = table_f_[k];
  }
}

double DualMap::inverse(double s) {
  if (!std::isfinite(s)) throw DomainError("f_inverse: argument is not finite");
  const double a = std::abs(s);
  const double value = 0.5 * a * std::sqrt(1.0 + 2.0 * a * a) + std::asinh(kSqrt2 * a) / (2.0 * kSqrt2);
  return s < 0.0 ? -value : value;
}

double DualMap::solve_positive(double t) const {
  double guess;
  if (t <= opts_.t_max) {
    const double pos = t / dt_;
    const auto k = std::min(static_cast<std::size_t>(pos), table_f_.size() - 2);
    const double frac = pos - static_cast<double>(k);
    guess = table_f_[k] + frac * (table_f_[k + 1] - table_f_[k]);
  } else {
    // F(s) ~ s^2 / sqrt(2) for large s.
    guess = std::sqrt(kSqrt2 * t);
  }
  return newton_solve(t, guess, opts_.tol, opts_.max_iter);
}

double DualMap::eval(double t) const {
  if (!std::isfinite(t)) throw DomainError("f_eval: argument is not finite");
  if (t == 0.0) return 0.0;
  const double s = solve_positive(std::abs(t));
  return t < 0.0 ? -s : s;
}

double DualMap::prime(double t) const {
  const double s = eval(t);
  return 1.0 / std::sqrt(1.0 + 2.0 * s * s);
}

DualMap::Value DualMap::eval_with_prime(double t) const {
  const double s = eval(t);
  return {s, 1.0 / std::sqrt(1.0 + 2.0 * s * s)};
}

void DualMap::eval(std::span<const double> t, std::span<double> out) const {
  if (t.size() != out.size()) throw ShapeError("dual map: input and output sizes differ");
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = eval(t[i]);
}

const DualMap& default_dual_map() {
  static const DualMap map;
  return map;
}

double f_eval(double t) { return default_dual_map().eval(t); }
double f_prime(double t) { return default_dual_map().prime(t); }
double f_inverse(double s) { return DualMap::inverse(s); }

bool PropertyReport::all_passed() const {
  return lower_constant > 0.0 &&
         std::all_of(items.begin(), items.end(), [](const PropertyCheck& c) { return c.passed; });
}

PropertyReport check_f_properties(const DualMap& map, int sample_count, double margin_tol) {
  if (sample_count < 1) throw ConfigError("check_f_properties: sample_count must be >= 1");

  std::vector<double> samples;
  samples.reserve(2 * static_cast<std::size_t>(sample_count));
  const double lg_lo = -6.0;
  const double lg_hi = 6.0;
  for (int k = 0; k < sample_count; ++k) {
    const double e = sample_count == 1 ? lg_lo : lg_lo + (lg_hi - lg_lo) * k / (sample_count - 1);
    const double t = std::pow(10.0, e);
    samples.push_back(t);
    samples.push_back(-t);
  }

  struct Acc {
    PropertyCheck check;
    void update(double margin, double t) {
      if (margin < check.worst_margin) {
        check.worst_margin = margin;
        check.worst_at = t;
      }
    }
  };
  auto make = [](int item, const char* statement) {
    Acc a;
    a.check.item = item;
    a.check.statement = statement;
    a.check.worst_margin = std::numeric_limits<double>::infinity();
    return a;
  };

  Acc inv = make(1, "invertible: |f^{-1}(f(t)) - t| <= 1e-9 max(1,|t|)");
  Acc p2 = make(2, "|f'(t)| <= 1");
  Acc p3 = make(3, "|f(t)| <= |t|");
  Acc p6 = make(6, "f(t)/2 <= t f'(t) <= f(t), t > 0");
  Acc p7 = make(7, "f(t)^2/2 <= t f(t) f'(t) <= f(t)^2, t >= 0");
  Acc p8 = make(8, "|f(t)| <= 2^{1/4} |t|^{1/2}");
  Acc p10 = make(10, "|f(t) f'(t)| <= 1/sqrt(2)");

  double c_small = std::numeric_limits<double>::infinity();
  double c_large = std::numeric_limits<double>::infinity();

  for (double t : samples) {
    const auto [f, fp] = map.eval_with_prime(t);
    const double at = std::abs(t);
    const double af = std::abs(f);

    inv.update(1.0 - std::abs(DualMap::inverse(f) - t) / (1.0e-9 * std::max(1.0, at)), t);
    p2.update(1.0 - std::abs(fp), t);
    p3.update((at - af) / at, t);
    p8.update((kFourthRootOf2 * std::sqrt(at) - af) / (kFourthRootOf2 * std::sqrt(at)), t);
    p10.update((1.0 / kSqrt2 - std::abs(f * fp)) * kSqrt2, t);
    if (t > 0.0) {
      const double tfp = t * fp;
      p6.update(std::min(tfp - 0.5 * f, f - tfp) / f, t);
      const double tffp = t * f * fp;
      p7.update(std::min(tffp - 0.5 * f * f, f * f - tffp) / (f * f), t);
    }
    if (at <= 1.0)
      c_small = std::min(c_small, af / at);
    else
      c_large = std::min(c_large, af / std::sqrt(at));
  }

  PropertyReport report;
  // Inverse consistency is a ratio to its own tolerance: pass iff margin >= 0.
  inv.check.passed = inv.check.worst_margin >= 0.0;
  report.items.push_back(inv.check);
  for (Acc* acc : {&p2, &p3}) {
    acc->check.passed = acc->check.worst_margin >= -margin_tol;
    report.items.push_back(acc->check);
  }

  const double t_small = 1.0e-4;
  PropertyCheck p4;
  p4.item = 4;
  p4.statement = "f(t)/t -> 1 as t -> 0 (deviation at t = 1e-4)";
  p4.worst_at = t_small;
  p4.worst_margin = std::abs(map.eval(t_small) / t_small - 1.0);
  p4.passed = p4.worst_margin <= 1.0e-6;
  report.items.push_back(p4);

  const double t_large = 1.0e6;
  PropertyCheck p5;
  p5.item = 5;
  p5.statement = "f(t)/sqrt(t) -> 2^{1/4} as t -> inf (deviation at t = 1e6)";
  p5.worst_at = t_large;
  p5.worst_margin = std::abs(map.eval(t_large) / std::sqrt(t_large) - kFourthRootOf2);
  p5.passed = p5.worst_margin <= 0.01;
  report.items.push_back(p5);

  for (Acc* acc : {&p6, &p7, &p8}) {
    acc->check.passed = acc->check.worst_margin >= -margin_tol;
    report.items.push_back(acc->check);
  }

  report.lower_constant = std::min(c_small, c_large);
  PropertyCheck p9;
  p9.item = 9;
  p9.statement = "|f(t)| >= C min(|t|, |t|^{1/2}) with C > 0";
  p9.worst_margin = report.lower_constant;
  p9.passed = report.lower_constant > 0.0;
  report.items.push_back(p9);

  p10.check.passed = p10.check.worst_margin >= -margin_tol;
  report.items.push_back(p10.check);
  return report;
}

}  // namespace dualwave
