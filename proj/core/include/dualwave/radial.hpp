#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dualwave {

/// Uniform radial grid r_i = i R / (M - 1) on [0, R] for N in {2, 3}.
///
/// Two quadratures live on the grid:
///  - node weights w_i integrate functions sampled at the nodes against
///    omega_{N-1} r^{N-1} dr (trapezoid, plus the h^2/12 origin correction
///    in N = 2 that cancels the leading Euler-Maclaurin term of r g(r));
///  - cell weights c_j = omega_{N-1} r_{j+1/2}^{N-1} h integrate quantities
///    living on the cells [r_j, r_{j+1}], i.e. squared finite differences.
struct RadialGrid {
  int N = 2;
  double R = 1.0;
  int M = 3;
  double h = 0.0;
  double omega = 0.0;  // surface measure of the unit sphere S^{N-1}
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> cell_weights;

  double ball_volume() const;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Throws ConfigError unless N in {2,3}, R > 0 and M >= 3.
GridPtr make_grid(int N, double R, int M);

/// sum_i w_i samples_i. Throws ShapeError on length mismatch.
double integrate(const RadialGrid& grid, std::span<const double> samples);

/// A radial function sampled on a grid. Values are finite and the
/// Dirichlet tail v(R) = 0 is imposed on construction.
class RadialField {
 public:
  RadialField(GridPtr grid, std::vector<double> values);
  static RadialField zeros(GridPtr grid);

  const RadialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  double max_abs() const;

  /// Value at radius r by linear interpolation, 0 beyond R.
  double at(double r) const;

  bool operator==(const RadialField& other) const = default;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// int |v'(r)|^2 dx with forward differences on the cells.
double kinetic(const RadialField& v);

/// c exp(-(r/s)^2), tail forced to zero. Throws ConfigError for s <= 0.
RadialField sample_gaussian(const GridPtr& grid, double amplitude, double width);

/// w(r_i) = v(t r_i) by linear interpolation, 0 where t r_i > R.
RadialField resample(const RadialField& v, double t);

/// Serialization: CSV with columns r,value and JSON {N,R,M,values}.
std::string field_to_csv(const RadialField& v);
nlohmann::json field_to_json(const RadialField& v);
RadialField field_from_json(const nlohmann::json& j);

}  // namespace dualwave
