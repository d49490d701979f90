#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "dualwave/dual_map.hpp"
#include "dualwave/nonlinearity.hpp"
#include "dualwave/radial.hpp"

namespace dualwave {

/// All scalar functionals of one field v (u = f(v) is never stored).
struct EnergyBreakdown {
  double mass = 0.0;          // int f(v)^2
  double kinetic = 0.0;       // int |grad v|^2
  double dual_kinetic = 0.0;  // int 2 f^2/(1 + 2 f^2) |grad v|^2
  double potential = 0.0;     // int H(f(v))
  double psi = 0.0;           // kinetic/2 - potential
  double G = 0.0;             // Pohozaev functional
  double lambda = 0.0;        // multiplier estimate
  nlohmann::json to_json() const;
};

/// Nodal integrals of one field plus, optionally, their gradients with
/// respect to the nodal values (the Dirichlet node has zero gradient).
///
/// The kinetic terms live on cells: with d_j = (v_{j+1} - v_j)/h,
///   kinetic      = sum_j c_j d_j^2,
///   dual_kinetic = sum_j c_j qbar_j d_j^2,  qbar_j = (q(v_j) + q(v_{j+1}))/2,
/// where q = 2 f^2 / (1 + 2 f^2). Every other integral uses node weights.
/// This makes the discrete Laplacian the exact adjoint of the discrete
/// gradient, so grad_psi is the true gradient of psi().
struct EnergyState {
  int N = 2;
  double mass = 0.0;
  double kinetic = 0.0;
  double dual_kinetic = 0.0;
  double potential = 0.0;
  double hf = 0.0;  // int h(f(v)) f(v)

  std::vector<double> grad_mass;
  std::vector<double> grad_psi;
  std::vector<double> grad_G;

  double psi() const { return 0.5 * kinetic - potential; }
  double G() const { return kinetic + 0.5 * N * dual_kinetic - 0.5 * N * (hf - 2.0 * potential); }
  /// int |grad f(v)|^2 in the same discretization: kinetic - dual_kinetic.
  double grad_f_squared() const { return kinetic - dual_kinetic; }
};

EnergyState energy_state(const RadialField& v, const Nonlinearity& nl, bool with_gradients = false);

double mass(const RadialField& v);
double dual_kinetic(const RadialField& v);
double potential(const RadialField& v, const Nonlinearity& nl);
double psi(const RadialField& v, const Nonlinearity& nl);
/// Throws DomainError when a <= 0.
EnergyBreakdown breakdown(const RadialField& v, const Nonlinearity& nl, double a);
double pohozaev_G(const RadialField& v, const Nonlinearity& nl);

/// lambda = (kinetic + dual_kinetic - int h(f) f) / a. Throws DomainError for a <= 0.
double lagrange_lambda(const RadialField& v, const Nonlinearity& nl, double a);
/// ((N-2)/2) kinetic - (N/2) lambda mass - N potential.
double pohozaev_residual(const RadialField& v, const Nonlinearity& nl, double lambda);

/// The fiber t -> Psi(v_t) along the mass-preserving stretching, evaluated
/// in closed form over the original field (no resampling).
class FiberProfile {
 public:
  FiberProfile(const RadialField& v, const Nonlinearity& nl);

  double psi(double t) const;
  double dpsi(double t) const;
  double surplus_A(double t) const;
  double surplus_B(double t) const;
  /// |Psi(v) - [Psi(v_t) + (1 - t^{N+2})/(N+2) G(v) + A + B]| / (1 + |Psi(v)|).
  double splitting_residual(double t) const;

  double kinetic() const { return kinetic_; }
  double dual_kinetic() const { return dual_kinetic_; }
  double psi_at_one() const { return 0.5 * kinetic_ - potential_; }
  double G() const;
  int N() const { return N_; }

 private:
  double scaled_potential(double t) const;  // int H(t^{N/2} f)
  double scaled_bracket(double t) const;    // int [h(s) s - 2 H(s)], s = t^{N/2} f

  Nonlinearity nl_;
  int N_;
  std::vector<double> f_;
  std::vector<double> w_;
  double kinetic_ = 0.0;
  double dual_kinetic_ = 0.0;
  double potential_ = 0.0;
  double bracket_ = 0.0;
};

double fiber_psi(const RadialField& v, const Nonlinearity& nl, double t);
double fiber_dpsi(const RadialField& v, const Nonlinearity& nl, double t);
double surplus_A(const RadialField& v, double t);
double surplus_B(const RadialField& v, const Nonlinearity& nl, double t);
double splitting_residual(const RadialField& v, const Nonlinearity& nl, double t);

/// u = f(v)^2 sampled on the same grid.
RadialField dual_square(const RadialField& v);

/// Gagliardo-Nirenberg: int |u|^s <= C^s |u|_2^{(2s-N(s-2))/2} |grad u|_2^{N(s-2)/2},
/// s in (2, 2^*). gn_ratio is the left side over the norm product; gn_check
/// returns C^s * product - left side.
double gn_ratio(const RadialField& u, double s);
double gn_check(const RadialField& u, double s, double C);

/// L^1 variant: int |u|^{t/2} <= C^t (int|u|)^{(4N-t(N-2))/(2(N+2))} (int|grad u|^2)^{N(t-2)/(2(N+2))},
/// t in (2, 2*2^*).
double gn_ratio_l1(const RadialField& u, double t);
double gn_check_l1(const RadialField& u, double t, double C);

/// int (exp(beta u^2) - 1) dx on an N = 2 grid. Throws RangeError when
/// beta u^2 exceeds the exp cap.
double tm_integral(const RadialField& u, double beta);

}  // namespace dualwave
