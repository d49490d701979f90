#pragma once

#include "dualwave/nonlinearity.hpp"
#include "dualwave/radial.hpp"

namespace dualwave {

/// Mass-preserving stretching v_t(r) = f^{-1}(t^{N/2} f(v(t r))).
RadialField stretch(const RadialField& v, double t);

/// w = f^{-1}(sqrt(a / mass(v)) f(v)), so that mass(w) = a.
/// Throws DomainError for a <= 0 or a zero field.
RadialField mass_project(const RadialField& v, double a);

struct DilationResult {
  RadialField field;
  /// The dilated support of v reaches past R; mass and kinetic scalings
  /// are then only approximate.
  bool truncated = false;
};

/// w(x) = v(theta^{-1/N} x): mass scales by theta, kinetic by theta^{1 - 2/N}.
DilationResult dilate(const RadialField& v, double theta);

struct FiberRootOptions {
  double bracket_growth = 2.0;
  double tol = 1.0e-10;
  int scan_points = 64;
};

struct FiberRoot {
  double t = 1.0;
  /// |fiber_dpsi(v, nl, t)| / (1 + kinetic(v)).
  double residual = 0.0;
  int sign_changes = 0;
  int iterations = 0;
};

/// The unique t_v > 0 with d/dt Psi(v_t) = 0. Brackets geometrically from
/// [1/2, 2], bisects, then verifies a single sign change on a log scan of
/// [t_v/16, 16 t_v]. Throws NoFiberRoot when no sign change exists in
/// [1e-6, 1e6], NumericError when the root is not unique.
FiberRoot find_tv(const RadialField& v, const Nonlinearity& nl, const FiberRootOptions& opts = {});

}  // namespace dualwave
