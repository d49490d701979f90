#include "dualwave/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "dualwave/error.hpp"

namespace dualwave {

nlohmann::json EnergyBreakdown::to_json() const {
  return {{"mass", mass},         {"kinetic", kinetic}, {"dual_kinetic", dual_kinetic}, {"potential", potential},
          {"psi", psi},           {"G", G},             {"lambda", lambda}};
}

EnergyState energy_state(const RadialField& v, const Nonlinearity& nl, bool with_gradients) {
  const auto& g = v.grid();
  const auto& map = default_dual_map();
  const auto x = v.values();
  const std::size_t m = x.size();

  std::vector<double> q(m), dq(m);
  EnergyState st;
  st.N = g.N;
  if (with_gradients) {
    st.grad_mass.assign(m, 0.0);
    st.grad_psi.assign(m, 0.0);
    st.grad_G.assign(m, 0.0);
  }
  std::vector<double> g_pot, g_hf;
  if (with_gradients) {
    g_pot.assign(m, 0.0);
    g_hf.assign(m, 0.0);
  }

  for (std::size_t i = 0; i < m; ++i) {
    const auto [f, fp] = map.eval_with_prime(x[i]);
    const double f2 = f * f;
    const double denom = 1.0 + 2.0 * f2;
    q[i] = 2.0 * f2 / denom;
    const double w = g.weights[i];
    const double hval = nl.h(f);
    const double Hval = nl.H(f);
    st.mass += w * f2;
    st.potential += w * Hval;
    st.hf += w * hval * f;
    if (with_gradients) {
      dq[i] = 4.0 * f * fp / (denom * denom);
      st.grad_mass[i] = w * 2.0 * f * fp;
      g_pot[i] = w * hval * fp;
      g_hf[i] = w * (nl.hprime(f) * f + hval) * fp;
    }
  }

  std::vector<double> g_kin, g_dk;
  if (with_gradients) {
    g_kin.assign(m, 0.0);
    g_dk.assign(m, 0.0);
  }
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const double c = g.cell_weights[j];
    const double d = (x[j + 1] - x[j]) / g.h;
    const double qbar = 0.5 * (q[j] + q[j + 1]);
    st.kinetic += c * d * d;
    st.dual_kinetic += c * qbar * d * d;
    if (with_gradients) {
      const double gk = 2.0 * c * d / g.h;
      g_kin[j + 1] += gk;
      g_kin[j] -= gk;
      g_dk[j + 1] += qbar * gk + 0.5 * c * d * d * dq[j + 1];
      g_dk[j] += -qbar * gk + 0.5 * c * d * d * dq[j];
    }
  }

  if (with_gradients) {
    const double half_n = 0.5 * g.N;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      st.grad_psi[i] = 0.5 * g_kin[i] - g_pot[i];
      st.grad_G[i] = g_kin[i] + half_n * g_dk[i] - half_n * (g_hf[i] - 2.0 * g_pot[i]);
    }
    st.grad_mass[m - 1] = 0.0;
  }
  return st;
}

double mass(const RadialField& v) {
  const auto& g = v.grid();
  const auto& map = default_dual_map();
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = map.eval(v[i]);
    sum += g.weights[i] * f * f;
  }
  return sum;
}

double dual_kinetic(const RadialField& v) {
  const auto& g = v.grid();
  const auto& map = default_dual_map();
  std::vector<double> q(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = map.eval(v[i]);
    q[i] = 2.0 * f * f / (1.0 + 2.0 * f * f);
  }
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < v.size(); ++j) {
    const double d = (v[j + 1] - v[j]) / g.h;
    sum += g.cell_weights[j] * 0.5 * (q[j] + q[j + 1]) * d * d;
  }
  return sum;
}

double potential(const RadialField& v, const Nonlinearity& nl) {
  const auto& g = v.grid();
  const auto& map = default_dual_map();
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) sum += g.weights[i] * nl.H(map.eval(v[i]));
  return sum;
}

double psi(const RadialField& v, const Nonlinearity& nl) { return 0.5 * kinetic(v) - potential(v, nl); }

EnergyBreakdown breakdown(const RadialField& v, const Nonlinearity& nl, double a) {
  if (!(a > 0.0)) throw DomainError("breakdown: mass a must be positive");
  const auto st = energy_state(v, nl);
  EnergyBreakdown b;
  b.mass = st.mass;
  b.kinetic = st.kinetic;
  b.dual_kinetic = st.dual_kinetic;
  b.potential = st.potential;
  b.psi = st.psi();
  b.G = st.G();
  b.lambda = (st.kinetic + st.dual_kinetic - st.hf) / a;
  return b;
}

double pohozaev_G(const RadialField& v, const Nonlinearity& nl) { return energy_state(v, nl).G(); }

double lagrange_lambda(const RadialField& v, const Nonlinearity& nl, double a) {
  if (!(a > 0.0)) throw DomainError("lagrange_lambda: mass a must be positive");
  const auto st = energy_state(v, nl);
  return (st.kinetic + st.dual_kinetic - st.hf) / a;
}

double pohozaev_residual(const RadialField& v, const Nonlinearity& nl, double lambda) {
  const auto st = energy_state(v, nl);
  const int N = st.N;
  return 0.5 * (N - 2) * st.kinetic - 0.5 * N * lambda * st.mass - N * st.potential;
}

FiberProfile::FiberProfile(const RadialField& v, const Nonlinearity& nl) : nl_(nl), N_(v.grid().N) {
  const auto& g = v.grid();
  const auto& map = default_dual_map();
  f_.resize(v.size());
  w_ = g.weights;
  for (std::size_t i = 0; i < v.size(); ++i) f_[i] = map.eval(v[i]);
  std::vector<double> q(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) q[i] = 2.0 * f_[i] * f_[i] / (1.0 + 2.0 * f_[i] * f_[i]);
  for (std::size_t j = 0; j + 1 < v.size(); ++j) {
    const double d = (v[j + 1] - v[j]) / g.h;
    kinetic_ += g.cell_weights[j] * d * d;
    dual_kinetic_ += g.cell_weights[j] * 0.5 * (q[j] + q[j + 1]) * d * d;
  }
  for (std::size_t i = 0; i < f_.size(); ++i) {
    const double H = nl_.H(f_[i]);
    potential_ += w_[i] * H;
    bracket_ += w_[i] * (nl_.h(f_[i]) * f_[i] - 2.0 * H);
  }
}

double FiberProfile::scaled_potential(double t) const {
  const double s = std::pow(t, 0.5 * N_);
  double sum = 0.0;
  for (std::size_t i = 0; i < f_.size(); ++i) sum += w_[i] * nl_.H(s * f_[i]);
  return sum;
}

double FiberProfile::scaled_bracket(double t) const {
  const double s = std::pow(t, 0.5 * N_);
  double sum = 0.0;
  for (std::size_t i = 0; i < f_.size(); ++i) {
    const double y = s * f_[i];
    sum += w_[i] * (nl_.h(y) * y - 2.0 * nl_.H(y));
  }
  return sum;
}

double FiberProfile::G() const { return kinetic_ + 0.5 * N_ * dual_kinetic_ - 0.5 * N_ * bracket_; }

double FiberProfile::psi(double t) const {
  if (!(t > 0.0)) throw DomainError("fiber_psi: t must be positive");
  const double tn = std::pow(t, N_);
  const double grad_part = (kinetic_ - dual_kinetic_) + tn * dual_kinetic_;
  return 0.5 * t * t * grad_part - scaled_potential(t) / tn;
}

double FiberProfile::dpsi(double t) const {
  if (!(t > 0.0)) throw DomainError("fiber_dpsi: t must be positive");
  const double tn = std::pow(t, N_);
  const double grad_part = (kinetic_ - dual_kinetic_) + tn * dual_kinetic_;
  return t * grad_part + 0.5 * N_ * tn * t * dual_kinetic_ - 0.5 * N_ * scaled_bracket(t) / (tn * t);
}

namespace {

double surplus_A_from(double kin, double dk, int N, double t) {
  if (!(t > 0.0)) throw DomainError("surplus_A: t must be positive");
  const double tn = std::pow(t, N);
  const double grad_part = (kin - dk) + tn * dk;
  const double c = (1.0 - tn * t * t) / (N + 2);
  return 0.5 * (kin - t * t * grad_part - c * (2.0 * kin + N * dk));
}

}  // namespace

double FiberProfile::surplus_A(double t) const { return surplus_A_from(kinetic_, dual_kinetic_, N_, t); }

double FiberProfile::surplus_B(double t) const {
  if (!(t > 0.0)) throw DomainError("surplus_B: t must be positive");
  const double tn = std::pow(t, N_);
  const double c = N_ * (1.0 - tn * t * t) / (2.0 * (N_ + 2));
  return -potential_ + scaled_potential(t) / tn + c * bracket_;
}

double FiberProfile::splitting_residual(double t) const {
  const double tn = std::pow(t, N_);
  const double base = psi_at_one();
  const double rhs = psi(t) + (1.0 - tn * t * t) / (N_ + 2) * G() + surplus_A(t) + surplus_B(t);
  return std::abs(base - rhs) / (1.0 + std::abs(base));
}

double fiber_psi(const RadialField& v, const Nonlinearity& nl, double t) { return FiberProfile(v, nl).psi(t); }
double fiber_dpsi(const RadialField& v, const Nonlinearity& nl, double t) { return FiberProfile(v, nl).dpsi(t); }
double surplus_A(const RadialField& v, double t) {
  return surplus_A_from(kinetic(v), dual_kinetic(v), v.grid().N, t);
}
double surplus_B(const RadialField& v, const Nonlinearity& nl, double t) { return FiberProfile(v, nl).surplus_B(t); }
double splitting_residual(const RadialField& v, const Nonlinearity& nl, double t) {
  return FiberProfile(v, nl).splitting_residual(t);
}

RadialField dual_square(const RadialField& v) {
  const auto& map = default_dual_map();
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = map.eval(v[i]);
    out[i] = f * f;
  }
  return RadialField(v.grid_ptr(), std::move(out));
}

namespace {

double power_integral(const RadialField& u, double s) {
  const auto& g = u.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += g.weights[i] * std::pow(std::abs(u[i]), s);
  return sum;
}

double gn_product(const RadialField& u, double s) {
  const int N = u.grid().N;
  const double upper = N == 2 ? std::numeric_limits<double>::infinity() : 6.0;
  if (!(s > 2.0 && s < upper))
    throw DomainError(fmt::format("gn_check: exponent s = {} outside (2, 2^*) for N = {}", s, N));
  const double l2 = power_integral(u, 2.0);
  const double kin = kinetic(u);
  return std::pow(l2, (2.0 * s - N * (s - 2.0)) / 4.0) * std::pow(kin, N * (s - 2.0) / 4.0);
}

double gn_product_l1(const RadialField& u, double t) {
  const int N = u.grid().N;
  const double upper = N == 2 ? std::numeric_limits<double>::infinity() : 12.0;
  if (!(t > 2.0 && t < upper))
    throw DomainError(fmt::format("gn_check_l1: exponent t = {} outside (2, 2*2^*) for N = {}", t, N));
  const double l1 = power_integral(u, 1.0);
  const double kin = kinetic(u);
  const double alpha = (4.0 * N - t * (N - 2.0)) / (2.0 * (N + 2.0));
  const double beta = N * (t - 2.0) / (2.0 * (N + 2.0));
  return std::pow(l1, alpha) * std::pow(kin, beta);
}

}  // namespace

double gn_ratio(const RadialField& u, double s) {
  const double prod = gn_product(u, s);
  const double lhs = power_integral(u, s);
  return prod > 0.0 ? lhs / prod : 0.0;
}

double gn_check(const RadialField& u, double s, double C) {
  return std::pow(C, s) * gn_product(u, s) - power_integral(u, s);
}

double gn_ratio_l1(const RadialField& u, double t) {
  const double prod = gn_product_l1(u, t);
  const double lhs = power_integral(u, 0.5 * t);
  return prod > 0.0 ? lhs / prod : 0.0;
}

double gn_check_l1(const RadialField& u, double t, double C) {
  return std::pow(C, t) * gn_product_l1(u, t) - power_integral(u, 0.5 * t);
}

double tm_integral(const RadialField& u, double beta) {
  const auto& g = u.grid();
  if (g.N != 2) throw DomainError("tm_integral: requires an N = 2 grid");
  if (!(beta > 0.0)) throw DomainError("tm_integral: beta must be positive");
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double e = beta * u[i] * u[i];
    if (e > kExpCap) throw RangeError(fmt::format("tm_integral: beta u^2 = {} exceeds cap", e));
    sum += g.weights[i] * std::expm1(e);
  }
  return sum;
}

}  // namespace dualwave
