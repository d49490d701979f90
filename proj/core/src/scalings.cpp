#include "dualwave/scalings.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "dualwave/dual_map.hpp"
#include "dualwave/error.hpp"
#include "dualwave/functionals.hpp"

namespace dualwave {

RadialField stretch(const RadialField& v, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("stretch: t must be positive");
  if (t == 1.0) return v;
  const auto& map = default_dual_map();
  const RadialField inner = resample(v, t);
  const double scale = std::pow(t, 0.5 * v.grid().N);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = DualMap::inverse(scale * map.eval(inner[i]));
  return RadialField(v.grid_ptr(), std::move(out));
}

RadialField mass_project(const RadialField& v, double a) {
  if (!(a > 0.0)) throw DomainError("mass_project: target mass must be positive");
  const double m = mass(v);
  if (!(m > 0.0)) throw DomainError("mass_project: cannot project the zero field");
  if (m == a) return v;
  const auto& map = default_dual_map();
  const double scale = std::sqrt(a / m);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = DualMap::inverse(scale * map.eval(v[i]));
  return RadialField(v.grid_ptr(), std::move(out));
}

DilationResult dilate(const RadialField& v, double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("dilate: theta must be positive");
  const auto& g = v.grid();
  const double factor = std::pow(theta, 1.0 / g.N);
  const double peak = v.max_abs();
  double support = 0.0;
  for (int i = g.M - 1; i >= 0; --i) {
    if (std::abs(v[i]) > 1.0e-12 * peak) {
      support = g.nodes[i];
      break;
    }
  }
  DilationResult res{resample(v, 1.0 / factor), false};
  res.truncated = peak > 0.0 && factor * support > g.R;
  return res;
}

namespace {

// For exp-critical growth the fiber overflows for large t; that region is
// deep in the decreasing branch, so it counts as a negative derivative.
double safe_dpsi(const FiberProfile& fp, double t) {
  try {
    return fp.dpsi(t);
  } catch (const RangeError&) {
    return -std::numeric_limits<double>::infinity();
  }
}

}  // namespace

FiberRoot find_tv(const RadialField& v, const Nonlinearity& nl, const FiberRootOptions& opts) {
  if (!(opts.bracket_growth > 1.0)) throw ConfigError("find_tv: bracket_growth must exceed 1");
  const FiberProfile fp(v, nl);
  if (fp.kinetic() == 0.0) throw DomainError("find_tv: zero field has no fiber");
  const double scale = 1.0 + fp.kinetic();
  constexpr double kMin = 1.0e-6;
  constexpr double kMax = 1.0e6;

  double lo = 0.5;
  double hi = 2.0;
  double dlo = safe_dpsi(fp, lo);
  double dhi = safe_dpsi(fp, hi);
  while (dlo <= 0.0) {
    if (lo <= kMin) throw NoFiberRoot("find_tv: fiber derivative is not positive near t = 0");
    hi = lo;
    dhi = dlo;
    lo = std::max(lo / opts.bracket_growth, kMin);
    dlo = safe_dpsi(fp, lo);
  }
  while (dhi >= 0.0) {
    if (hi >= kMax) throw NoFiberRoot("find_tv: fiber derivative is not negative for large t");
    lo = hi;
    dlo = dhi;
    hi = std::min(hi * opts.bracket_growth, kMax);
    dhi = safe_dpsi(fp, hi);
  }

  FiberRoot root;
  double mid = std::sqrt(lo * hi);
  double dmid = safe_dpsi(fp, mid);
  for (int it = 0; it < 200; ++it) {
    root.iterations = it + 1;
    if (std::abs(dmid) <= opts.tol * scale) break;
    if (dmid > 0.0)
      lo = mid;
    else
      hi = mid;
    const double next = 0.5 * (lo + hi);
    if (next <= lo || next >= hi) break;
    mid = next;
    dmid = safe_dpsi(fp, mid);
  }
  root.t = mid;
  root.residual = std::abs(dmid) / scale;

  int changes = 0;
  double prev = safe_dpsi(fp, mid / 16.0);
  for (int k = 1; k < opts.scan_points; ++k) {
    const double t = mid / 16.0 * std::pow(256.0, static_cast<double>(k) / (opts.scan_points - 1));
    const double d = safe_dpsi(fp, t);
    if ((prev > 0.0 && d <= 0.0) || (prev < 0.0 && d >= 0.0)) ++changes;
    prev = d;
  }
  root.sign_changes = changes;
  if (changes != 1)
    throw NumericError(fmt::format("find_tv: fiber derivative changes sign {} times near t = {}", changes, mid));
  return root;
}

}  // namespace dualwave
