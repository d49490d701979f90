#pragma once

#include <cmath>
#include <functional>

// Independent reference computations used by the unit tests. Nothing here
// calls into the library.
namespace oracle {

// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& g, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = g(a) + g(b);
  for (int i = 1; i < n; ++i) s += g(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// f^{-1}(s) as the integral of sqrt(1 + 2 tau^2) over [0, s].
inline double f_inverse(double s) {
  const double sign = s < 0 ? -1.0 : 1.0;
  return sign * simpson([](double t) { return std::sqrt(1.0 + 2.0 * t * t); }, 0.0, std::abs(s));
}

// f(t) by plain bisection on the quadrature inverse.
inline double f(double t) {
  const double sign = t < 0 ? -1.0 : 1.0;
  const double target = std::abs(t);
  double lo = 0.0, hi = std::max(1.0, target);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f_inverse(mid) < target ? lo : hi) = mid;
  }
  return sign * 0.5 * (lo + hi);
}

// 2 pi int_0^R g(r) r dr or 4 pi int_0^R g(r) r^2 dr.
inline double radial_integral(int N, const std::function<double(double)>& g, double R, int n = 200000) {
  const double omega = N == 2 ? 2.0 * M_PI : 4.0 * M_PI;
  return omega * simpson([&](double r) { return g(r) * std::pow(r, N - 1); }, 0.0, R, n);
}

}  // namespace oracle
