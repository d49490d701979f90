#pragma once

#include <span>
#include <string>
#include <vector>

namespace dualwave {

/// The dual change of variables u = f(v), where f solves
/// f'(t) = (1 + 2 f(t)^2)^{-1/2}, f(0) = 0, and is odd.
///
/// The inverse has the closed form
///   f^{-1}(s) = s sqrt(1 + 2 s^2) / 2 + asinh(sqrt(2) s) / (2 sqrt(2)),
/// so f itself is obtained by a safeguarded Newton solve on that
/// expression. A monotone table on [0, t_max] seeds the Newton iteration;
/// arguments beyond the table start from the large-t asymptote instead.
///
/// Immutable after construction, so a single instance can be shared by
/// any number of threads.
class DualMap {
 public:
  struct Options {
    double t_max = 1.0e4;
    int n_samples = 8193;
    double tol = 1.0e-12;  // absolute and relative Newton tolerance
    int max_iter = 200;
  };

  DualMap();
  explicit DualMap(Options opts);

  /// f(t). Throws DomainError for non-finite input.
  double eval(double t) const;
  /// f'(t) = 1 / sqrt(1 + 2 f(t)^2).
  double prime(double t) const;
  /// f^{-1}(s), closed form.
  static double inverse(double s);

  /// f and f' at once; f' is computed from the same f value.
  struct Value {
    double f;
    double fprime;
  };
  Value eval_with_prime(double t) const;

  void eval(std::span<const double> t, std::span<double> out) const;

  double t_max() const { return opts_.t_max; }
  int n_samples() const { return opts_.n_samples; }
  double tol() const { return opts_.tol; }

  /// (t, f(t)) table used for Newton seeding.
  std::span<const double> table_t() const { return table_t_; }
  std::span<const double> table_f() const { return table_f_; }

 private:
  double solve_positive(double t) const;

  Options opts_;
  double dt_ = 0.0;
  std::vector<double> table_t_;
  std::vector<double> table_f_;
};

/// Process-wide default map used by the functionals.
const DualMap& default_dual_map();

/// Convenience wrappers on the default map.
double f_eval(double t);
double f_prime(double t);
double f_inverse(double s);

/// One item of the f-property report.
struct PropertyCheck {
  int item = 0;
  std::string statement;
  /// Worst relative margin over the samples; >= 0 means the property holds.
  /// For the limit items (4) and (5) this is the deviation from the limit.
  double worst_margin = 0.0;
  double worst_at = 0.0;
  bool passed = false;
};

struct PropertyReport {
  std::vector<PropertyCheck> items;
  /// Constant C of item (9), estimated as an infimum over the samples.
  double lower_constant = 0.0;
  bool all_passed() const;
};

/// Evaluates the listed properties of f on `sample_count` log-spaced points
/// of [1e-6, 1e6] and their negatives. `margin_tol` is the slack allowed on
/// the inequality items.
PropertyReport check_f_properties(const DualMap& map, int sample_count,
                                  double margin_tol = 1.0e-9);

}  // namespace dualwave
