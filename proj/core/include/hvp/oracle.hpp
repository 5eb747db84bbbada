#pragma once

#include "hvp/field.hpp"
#include "hvp/grid.hpp"

namespace hvp {

/// Boundary data field: evaluated at a boundary point with its outward normal.
struct BoundaryField {
  std::function<Complex(const Eigen::VectorXd& x, const Eigen::VectorXd& n)>
      value;
};

/// Data of the generalised impedance problem
///   L w = zeta in Omega,  d_n w - i k w = eta on the boundary.
struct GeneralisedData {
  ClosedFormField zeta;
  BoundaryField eta;
};

/// Unique solution of -u'' - k^2 u = f on (0,1) with d_n u = i k u at both
/// endpoints:  u(x) = (f/k^2) ((e^{ikx} + e^{ik(1-x)})/2 - 1).
ClosedFormField exact_1d_constant_forcing(double k, Complex f_const = 1.0);

/// Manufactured data: zeta = L u*, eta = d_n u* - i k u*. Any solver
/// consuming (zeta, eta) must reproduce u*.
GeneralisedData manufactured_generalised(const ClosedFormField& u_star,
                                         double k);

/// Dense second-order centred finite differences on (0,1) with ghost-point
/// impedance closures; cross-check only, never acceptance ground truth.
FieldGrid fd_reference_1d(double k, const ClosedFormField& f, int n_nodes);

}  // namespace hvp
