#include "descent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dualwave/error.hpp"
#include "dualwave/scalings.hpp"

namespace dualwave::detail {

Metric::Metric(const RadialGrid& g, double sigma) : n_(static_cast<std::size_t>(g.M - 1)), sigma_(sigma) {
  const double inv_h2 = 1.0 / (g.h * g.h);
  std::vector<double> a(n_), b(n_), c(n_);  // sub, main, super diagonals
  for (std::size_t i = 0; i < n_; ++i) {
    const double left = i > 0 ? g.cell_weights[i - 1] : 0.0;
    b[i] = (left + g.cell_weights[i]) * inv_h2 + sigma * g.weights[i];
    if (i + 1 < n_) c[i] = -g.cell_weights[i] * inv_h2;
    if (i > 0) a[i] = -g.cell_weights[i - 1] * inv_h2;
  }
  lower_ = std::move(a);
  upper_.assign(n_, 0.0);
  diag_.assign(n_, 0.0);
  diag_[0] = b[0];
  for (std::size_t i = 0; i < n_; ++i) {
    if (i > 0) {
      lower_[i] /= diag_[i - 1];
      diag_[i] = b[i] - lower_[i] * upper_[i - 1];
    }
    upper_[i] = c[i];
  }
}

std::vector<double> Metric::solve(const std::vector<double>& rhs) const {
  std::vector<double> x(rhs.size(), 0.0);
  for (std::size_t i = 0; i < n_; ++i) x[i] = rhs[i] - (i > 0 ? lower_[i] * x[i - 1] : 0.0);
  for (std::size_t k = n_; k-- > 0;) {
    if (k + 1 < n_) x[k] -= upper_[k] * x[k + 1];
    x[k] /= diag_[k];
  }
  return x;
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

namespace {

RadialField axpy(const RadialField& v, double alpha, const std::vector<double>& d) {
  std::vector<double> out(v.values().begin(), v.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += alpha * d[i];
  return RadialField(v.grid_ptr(), std::move(out));
}

bool pohozaev_ok(const EnergyState& st, double a) {
  return std::abs(st.mass - a) <= 1.0e-13 * a && std::abs(st.G()) <= 1.0e-12 * (1.0 + st.kinetic);
}

}  // namespace

std::optional<RadialField> pohozaev_retract(const RadialField& w0, const Nonlinearity& nl, double a,
                                            const Metric& metric) {
  RadialField w = w0;
  double last = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 30; ++it) {
    const auto st = energy_state(w, nl, true);
    if (!std::isfinite(st.G()) || !std::isfinite(st.mass)) return std::nullopt;
    if (pohozaev_ok(st, a)) break;
    // Roundoff floor: stop once the residual no longer shrinks.
    const double res = std::abs(st.mass - a) / a + std::abs(st.G()) / (1.0 + st.kinetic);
    if (res < 1.0e-10 && res > 0.5 * last) break;
    last = res;
    const auto pm = metric.solve(st.grad_mass);
    const auto pg = metric.solve(st.grad_G);
    const double j11 = dot(st.grad_mass, pm), j12 = dot(st.grad_mass, pg);
    const double j21 = dot(st.grad_G, pm), j22 = dot(st.grad_G, pg);
    const double det = j11 * j22 - j12 * j21;
    if (!(std::abs(det) > 0.0)) return std::nullopt;
    const double r1 = a - st.mass, r2 = -st.G();
    const double d1 = (r1 * j22 - j12 * r2) / det;
    const double d2 = (j11 * r2 - j21 * r1) / det;
    std::vector<double> step(pm.size());
    for (std::size_t i = 0; i < step.size(); ++i) step[i] = d1 * pm[i] + d2 * pg[i];
    w = axpy(w, 1.0, step);
    if (it == 29) return std::nullopt;
  }
  if (!(mass(w) > 0.0)) return std::nullopt;
  w = mass_project(w, a);
  const auto st = energy_state(w, nl);
  if (std::abs(st.G()) > 1.0e-10 * (1.0 + st.kinetic)) return std::nullopt;
  return w;
}

DescentOutcome descend(const RadialField& v0, const DescentSpec& spec, const SolveConfig& cfg) {
  const Nonlinearity& nl = *spec.nl;
  // The constrained Hessian is close to L + |lambda| W; matching the shift
  // keeps the condition number bounded when lambda is small.
  const double inv_h2 = 1.0 / (v0.grid().h * v0.grid().h);
  auto shift_of = [inv_h2](const EnergyState& s) {
    return std::clamp(std::abs(s.kinetic + s.dual_kinetic - s.hf) / s.mass, 1.0e-8 * inv_h2, 1.0e2 * inv_h2);
  };
  std::optional<Metric> metric_store;
  DescentOutcome out{v0, energy_state(v0, nl, true), 0.0, 0, false, false, {}};
  RadialField& v = out.field;
  EnergyState& st = out.state;
  const std::size_t free = static_cast<std::size_t>(v.grid().M - 1);

  struct Trial {
    RadialField field;
    EnergyState state;
  };
  int cap_rejects = 0;
  auto evaluate = [&](const std::vector<double>& dir, double alpha) -> std::optional<Trial> {
    const RadialField raw = axpy(v, alpha, dir);
    std::optional<RadialField> w;
    if (spec.pohozaev) {
      w = pohozaev_retract(raw, nl, spec.a, *metric_store);
    } else if (mass(raw) > 0.0) {
      w = mass_project(raw, spec.a);
    }
    if (!w) return std::nullopt;
    EnergyState ts;
    try {
      ts = energy_state(*w, nl, true);
    } catch (const RangeError&) {
      return std::nullopt;
    }
    if (!std::isfinite(ts.psi())) return std::nullopt;
    if (spec.record_trials) out.trajectory.push_back({ts.kinetic, ts.psi(), false});
    if (ts.kinetic >= spec.kinetic_cap) {
      if (++cap_rejects > cfg.max_inner) throw CapSaturated("descent: kinetic cap rejected every trial step");
      return std::nullopt;
    }
    cap_rejects = 0;
    return Trial{std::move(*w), std::move(ts)};
  };

  std::vector<double> prev_dir, prev_d;
  double prev_slope = 0.0;
  double alpha = cfg.step0;
  for (int it = 0; it < cfg.max_outer; ++it) {
    out.iterations = it;
    const double shift = shift_of(st);
    if (!metric_store || std::abs(std::log(shift / metric_store->sigma())) > 0.2) {
      metric_store.emplace(v.grid(), shift);
      prev_dir.clear();
    }
    const Metric& metric = *metric_store;

    std::vector<std::vector<double>> n{{st.grad_mass.begin(), st.grad_mass.begin() + free}};
    if (spec.pohozaev) n.emplace_back(st.grad_G.begin(), st.grad_G.begin() + free);
    std::vector<std::vector<double>> pn;
    for (const auto& ni : n) pn.push_back(metric.solve(ni));
    double q[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (std::size_t i = 0; i < n.size(); ++i)
      for (std::size_t j = 0; j < n.size(); ++j) q[i][j] = dot(n[i], pn[j]);
    // P-orthogonal projection onto the tangent space of the constraints.
    auto project = [&](std::vector<double>& x) {
      double c1, c2 = 0.0;
      if (n.size() == 1) {
        c1 = dot(n[0], x) / q[0][0];
      } else {
        const double b1 = dot(n[0], x), b2 = dot(n[1], x);
        const double det = q[0][0] * q[1][1] - q[0][1] * q[1][0];
        if (!(det > 0.0)) throw NumericError("descent: degenerate constraint gradients");
        c1 = (b1 * q[1][1] - q[0][1] * b2) / det;
        c2 = (q[0][0] * b2 - q[1][0] * b1) / det;
      }
      for (std::size_t i = 0; i < free; ++i) {
        x[i] -= c1 * pn[0][i];
        if (n.size() == 2) x[i] -= c2 * pn[1][i];
      }
    };

    const std::vector<double> g(st.grad_psi.begin(), st.grad_psi.begin() + free);
    std::vector<double> d = metric.solve(g);
    project(d);
    const double slope = dot(g, d);
    out.grad_norm = std::sqrt(std::max(slope, 0.0) / (1.0 + st.kinetic));
    const bool g_ok = !spec.pohozaev || std::abs(st.G()) <= cfg.tol_G * (1.0 + st.kinetic);
    if (out.grad_norm <= cfg.tol_grad && g_ok) {
      out.converged = true;
      return out;
    }

    std::vector<double> dir(free);
    for (std::size_t i = 0; i < free; ++i) dir[i] = -d[i];
    if (!prev_dir.empty()) {
      double num = 0.0;
      for (std::size_t i = 0; i < free; ++i) num += g[i] * (d[i] - prev_d[i]);
      const double beta = std::max(0.0, num / prev_slope);
      std::vector<double> moved = prev_dir;
      project(moved);
      std::vector<double> cand(free);
      for (std::size_t i = 0; i < free; ++i) cand[i] = dir[i] + beta * moved[i];
      if (dot(g, cand) <= -0.1 * slope) dir = std::move(cand);
    }
    const double dslope = -dot(g, dir);
    dir.push_back(0.0);

    std::optional<Trial> accepted;
    double used = alpha;
    for (int inner = 0; inner < cfg.max_inner; ++inner, alpha *= cfg.shrink) {
      auto trial = evaluate(dir, alpha);
      if (trial && trial->state.psi() < st.psi() && trial->state.psi() <= st.psi() - 1.0e-4 * alpha * dslope) {
        accepted = std::move(trial);
        used = alpha;
        break;
      }
    }
    if (!accepted) {
      out.iterations = it + 1;
      return out;
    }
    // One quadratic-interpolation refinement of the accepted step.
    const double curv = accepted->state.psi() - st.psi() + dslope * used;
    if (curv > 0.0) {
      const double best = 0.5 * dslope * used * used / curv;
      if (best > 0.1 * used && best < 10.0 * used && std::abs(best / used - 1.0) > 0.05) {
        auto refined = evaluate(dir, best);
        if (refined && refined->state.psi() < accepted->state.psi()) {
          accepted = std::move(refined);
          used = best;
        }
      }
    }
    if (spec.record_trials) {
      for (auto p = out.trajectory.rbegin(); p != out.trajectory.rend(); ++p)
        if (p->psi == accepted->state.psi() && p->kinetic == accepted->state.kinetic) {
          p->accepted = true;
          break;
        }
    }
    v = std::move(accepted->field);
    st = std::move(accepted->state);
    if (st.psi() < spec.floor) {
      out.unbounded = true;
      return out;
    }
    dir.pop_back();
    prev_dir = std::move(dir);
    prev_d = std::move(d);
    prev_slope = slope;
    alpha = std::min(2.0 * used, 1.0e6);
  }
  out.iterations = cfg.max_outer;
  return out;
}

}  // namespace dualwave::detail
