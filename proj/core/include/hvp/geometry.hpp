#pragma once

#include <Eigen/Dense>
#include <array>

#include "hvp/errors.hpp"

namespace hvp {

/// Axis-aligned interval / rectangle / box with a configurable multiplier
/// centre (the x0 in x - x0). The centre must lie strictly inside.
class Domain {
 public:
  static Domain interval(double lo, double hi);
  static Domain rectangle(std::array<double, 2> x, std::array<double, 2> y);
  static Domain box(std::array<double, 2> x, std::array<double, 2> y,
                    std::array<double, 2> z);
  static Domain unit_square() { return rectangle({0.0, 1.0}, {0.0, 1.0}); }
  static Domain unit_cube() { return box({0, 1}, {0, 1}, {0, 1}); }

  /// Same domain with the multiplier centre moved off the box centre.
  Domain with_origin(const Eigen::VectorXd& origin) const;

  int dim() const { return dim_; }
  double lower(int axis) const { return lo_[axis]; }
  double upper(int axis) const { return hi_[axis]; }
  double extent(int axis) const { return hi_[axis] - lo_[axis]; }

  Eigen::VectorXd center() const;
  const Eigen::VectorXd& origin() const { return origin_; }

  /// Lebesgue measure |Omega|.
  double measure() const;
  /// Surface measure |dOmega| (2 in 1D by the endpoint-counting convention).
  double boundary_measure() const;
  /// diam(Omega): norm of the box diagonal.
  double diameter() const;

  /// L0 = min over the boundary of (x - origin).n; for axis-aligned boxes the
  /// minimum distance from the origin to a face plane.
  /// Throws NonStarShaped when the minimum is <= 0.
  double star_shape_constant() const;

  bool contains(const Eigen::VectorXd& x) const;

 private:
  Domain(int dim, std::array<double, 3> lo, std::array<double, 3> hi);

  int dim_;
  std::array<double, 3> lo_{};
  std::array<double, 3> hi_{};
  Eigen::VectorXd origin_;
};

}  // namespace hvp
