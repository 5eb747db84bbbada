#pragma once

#include <Eigen/Dense>

#include "hvp/geometry.hpp"

namespace hvp {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// n-point rule, exact for polynomials of degree 2n-1.
GaussRule gauss_legendre(int n);

/// Tensor-product interior rule; `cells` uniform subdivisions per axis with
/// an `order`-point rule on each cell.
struct InteriorQuadrature {
  Eigen::MatrixXd points;   // N x dim
  Eigen::VectorXd weights;  // N
};

InteriorQuadrature interior_quadrature(const Domain& domain, int order,
                                       int cells = 1);

/// Per-face rule with constant outward normals. In 1D this degenerates to the
/// two endpoint evaluations with weight 1 and normals -1, +1.
struct BoundaryQuadrature {
  Eigen::MatrixXd points;   // N x dim
  Eigen::MatrixXd normals;  // N x dim, unit
  Eigen::VectorXd weights;  // N, sums to the exact boundary measure
};

BoundaryQuadrature boundary_quadrature(const Domain& domain, int order,
                                       int panels = 1);

}  // namespace hvp
