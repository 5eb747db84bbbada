#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "hvp/geometry.hpp"

namespace hvp {

using Complex = std::complex<double>;

/// Complex field with analytically known value, gradient and Laplacian —
/// the common currency of identity checks, oracles and model evaluation.
struct ClosedFormField {
  std::function<Complex(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXcd(const Eigen::VectorXd&)> gradient;
  std::function<Complex(const Eigen::VectorXd&)> laplacian;
};

/// L u = -Delta u - k^2 u at x.
Complex helmholtz_op(const ClosedFormField& u, const Eigen::VectorXd& x,
                     double k);

/// d_n u = grad(u) . n at a boundary point.
Complex normal_derivative(const ClosedFormField& u, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& n);

/// d_n u - i k u, the impedance residual trace.
Complex impedance_residual(const ClosedFormField& u, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& n, double k);

/// Worst relative mismatch of the analytic gradient/Laplacian against centred
/// finite differences at `n_points` seeded random interior points.
double derivative_check(const ClosedFormField& u, const Domain& domain,
                        int n_points, unsigned seed, double step_rel = 1e-5);

namespace fields {

ClosedFormField constant(Complex c);

/// u(x) = x[axis]
ClosedFormField coordinate(int axis);

/// One polynomial term: coeff * prod_a x[a]^exps[a].
struct Monomial {
  Complex coeff;
  std::vector<int> exps;
};

ClosedFormField polynomial(std::vector<Monomial> terms);

/// u(x) = exp(i k d.x), |d| = 1.
ClosedFormField plane_wave(double k, Eigen::VectorXd direction);

/// u(x) = amplitude * exp(-|x - center|^2 / eps).
ClosedFormField gaussian_bump(Eigen::VectorXd center, double eps,
                              Complex amplitude = 1.0);

ClosedFormField scale(const ClosedFormField& u, Complex factor);
ClosedFormField sum(const ClosedFormField& a, const ClosedFormField& b);

}  // namespace fields

}  // namespace hvp
