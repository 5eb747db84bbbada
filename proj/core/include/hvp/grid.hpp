#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "hvp/geometry.hpp"

namespace hvp {

/// Complex field sampled on a regular evaluation grid, for export and error
/// measurement. Values are stored row-major: the first axis varies fastest.
struct FieldGrid {
  std::vector<int> shape;                   // nx or {nx, ny}
  std::vector<Eigen::VectorXd> axes;        // coordinates per axis
  Eigen::VectorXcd values;                  // shape product entries

  int dim() const { return static_cast<int>(shape.size()); }
  int size() const;
  Eigen::VectorXd point(int flat_index) const;

  /// CSV with header x,re_u,im_u (1D) or x,y,re_u,im_u (2D), one row per
  /// sample, floats at 17 significant digits.
  void write_csv(const std::string& path) const;
};

/// Uniform sampling grid over the domain, n points per axis (inclusive ends).
FieldGrid make_grid(const Domain& domain, int n_per_axis);

}  // namespace hvp
