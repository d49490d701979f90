#pragma once

#include <cstdint>

#include <nlohmann/json.hpp>

#include "dualwave/nonlinearity.hpp"
#include "dualwave/solver.hpp"

namespace dualwave {

/// rho_a(t) = 1/2 - A a^{(6-p)/4} t^{(3p-10)/4} - B t^2 with t = |grad v|_2^2,
/// for h = |t|^{p-2} t + |t|^{10} t in N = 3.
struct SobolevGeometry {
  double p = 3.0;
  double a = 1.0;
  double A = 0.0;  // C^p / p
  double B = 0.0;  // 2 / (3 S^3)
  double C = 0.0;  // Gagliardo-Nirenberg constant C_{p,3}, 0 when A was given
  double S = 0.0;  // Sobolev constant, 0 when B was given
  double K0 = 0.0;
  double a_tilde0 = 0.0;
  double t_star = 0.0;   // argmax of rho_a by golden section
  double rho_max = 0.0;  // rho_a(t_star)
  double t_star_foc = 0.0;        // root of the first-order condition
  double t_star_display2B = 0.0;  // same formula with 2B in place of 8B, for comparison only
  double rho_max_closed = 0.0;    // 1/2 - K0 a^{2/3}
  double t_star0 = 0.0;           // t_star at a = a_tilde0

  double rho(double t) const { return rho_at(a, t); }
  double rho_at(double mass, double t) const;
  /// Golden-section maximization of rho_mass in log t.
  double argmax_at(double mass) const;
  nlohmann::json to_json() const;
};

/// Throws ConfigError unless 2 < p < 10/3 and a, C, S > 0.
SobolevGeometry sobolev_geometry(double p, double a, double C, double S);
SobolevGeometry sobolev_geometry_AB(double p, double a, double A, double B);

struct LowerBoundCheck {
  int samples = 0;
  int violations = 0;
  double min_margin = 0.0;  // min of Psi(v) - K rho_a(K)
  nlohmann::json to_json() const;
};

/// Psi(v) >= K rho_a(K), K = |grad v|^2, on random N = 3 fields of mass a.
LowerBoundCheck check_lower_bound(const SobolevGeometry& geo, int samples = 100, std::uint64_t seed = 4);

/// m0(a) = inf Psi over S_a with |grad v|^2 < t_star0, N = 3, h of
/// power-plus-Sobolev-critical type with kappa = 1. Iterates whose kinetic
/// reaches 0.999 t_star0 are rejected. Throws ConfigError when a >= a_tilde0.
SolveResult local_minimize_m0(double a, double p, const SolveConfig& cfg, const SobolevGeometry& geo);

/// Ground state of the pure power p > 6 in N = 2 (minimize_sigma).
SolveResult build_reference(double a, double p, const SolveConfig& cfg);

struct ReferenceCheck {
  double m_star = 0.0;
  double Ip = 0.0;        // int |f(v)|^p
  double Ip_bound = 0.0;  // 4p/(p-6) m*
  double slack = 0.0;
  double lambda = 0.0;
  bool passed = false;
  nlohmann::json to_json() const;
};

ReferenceCheck check_reference(const SolveResult& ref, double p);

/// Lambda(t) = (p-2) t^2/(2p) - xi t^{p-4} at its maximizer.
double lambda_max(double p, double xi);

struct XiStar {
  double first = 0.0;   // (p-2)/(p(p-4)) [zeta0 (p-2) m*/(2 pi (p-4))]^{(p-6)/2}
  double second = 0.0;  // |grad v|^2 / (2 int |f(v)|^p)
  double value = 0.0;   // max of the two
  /// xi at which the chained bound equals pi/zeta0 exactly.
  double chain_equality = 0.0;
};

XiStar xi_star(double p, double zeta0, const SolveResult& ref);

struct ExpBoundReport {
  double a = 0.0;
  double p = 0.0;
  double zeta0 = 0.0;
  double xi = 0.0;
  XiStar xs;
  double m_star = 0.0;
  double lambda_max = 0.0;
  double t_lambda = 0.0;
  double bound = 0.0;         // 4p/(p-6) m* lambda_max
  double pi_over_zeta0 = 0.0;
  double margin = 0.0;        // pi/zeta0 - bound
  double upsilon_max = 0.0;   // max over t of Upsilon on the reference field
  double upsilon_t = 0.0;
  double upsilon_at_one = 0.0;
  double fiber_max = 0.0;     // max over t of Psi((v_ref)_t) for nl_exp
  bool bound_below = false;   // bound < pi/zeta0
  nlohmann::json to_json() const;
};

/// Throws ConfigError when nl_exp is not exponential-critical with p > 6 or
/// when xi <= xi*.
ExpBoundReport exp_level_bound(double a, const Nonlinearity& nl_exp, const SolveResult& ref);

}  // namespace dualwave
