#include "hvp/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "hvp/errors.hpp"

namespace hvp {

ClosedFormField exact_1d_constant_forcing(double k, Complex f_const) {
  if (!(k > 0.0)) throw InvalidParams("k must be positive");
  const Complex amp = f_const / (k * k);
  ClosedFormField u;
  u.value = [amp, k](const Eigen::VectorXd& x) {
    const Complex e1 = std::exp(Complex(0.0, k * x[0]));
    const Complex e2 = std::exp(Complex(0.0, k * (1.0 - x[0])));
    return amp * (0.5 * (e1 + e2) - 1.0);
  };
  u.gradient = [amp, k](const Eigen::VectorXd& x) {
    const Complex e1 = std::exp(Complex(0.0, k * x[0]));
    const Complex e2 = std::exp(Complex(0.0, k * (1.0 - x[0])));
    Eigen::VectorXcd g(1);
    g[0] = amp * Complex(0.0, 0.5 * k) * (e1 - e2);
    return g;
  };
  u.laplacian = [amp, k](const Eigen::VectorXd& x) {
    const Complex e1 = std::exp(Complex(0.0, k * x[0]));
    const Complex e2 = std::exp(Complex(0.0, k * (1.0 - x[0])));
    return amp * (-0.5 * k * k) * (e1 + e2);
  };
  return u;
}

GeneralisedData manufactured_generalised(const ClosedFormField& u_star,
                                         double k) {
  GeneralisedData data;
  data.zeta.value = [u_star, k](const Eigen::VectorXd& x) {
    return helmholtz_op(u_star, x, k);
  };
  data.zeta.gradient = [](const Eigen::VectorXd& x) -> Eigen::VectorXcd {
    throw std::logic_error("zeta gradient not available for manufactured data");
    return Eigen::VectorXcd::Zero(x.size());
  };
  data.zeta.laplacian = [](const Eigen::VectorXd&) -> Complex {
    throw std::logic_error("zeta laplacian not available for manufactured data");
  };
  data.eta.value = [u_star, k](const Eigen::VectorXd& x,
                               const Eigen::VectorXd& n) {
    return impedance_residual(u_star, x, n, k);
  };
  return data;
}

FieldGrid fd_reference_1d(double k, const ClosedFormField& f, int n_nodes) {
  if (n_nodes < 3) throw InvalidParams("fd_reference_1d needs >= 3 nodes");
  const int n = n_nodes;
  const double h = 1.0 / (n - 1);
  // tridiagonal rows: (-u_{j-1} + 2 u_j - u_{j+1})/h^2 - k^2 u_j = f_j,
  // ghost points eliminated through the centred impedance closure.
  Eigen::VectorXcd diag(n), lower(n - 1), upper(n - 1), rhs(n);
  const Complex ik(0.0, k);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd x(1);
    x[0] = j * h;
    rhs[j] = f.value(x);
    diag[j] = 2.0 / (h * h) - k * k;
  }
  for (int j = 0; j + 1 < n; ++j) {
    lower[j] = -1.0 / (h * h);
    upper[j] = -1.0 / (h * h);
  }
  // x = 0: u'(0) = -ik u0 -> ghost u_{-1} = u_1 + 2 i k h u0
  diag[0] = 2.0 / (h * h) - k * k - 2.0 * ik / h;
  upper[0] = -2.0 / (h * h);
  // x = 1: u'(1) = ik u_{n-1} -> ghost u_n = u_{n-2} + 2 i k h u_{n-1}
  diag[n - 1] = 2.0 / (h * h) - k * k - 2.0 * ik / h;
  lower[n - 2] = -2.0 / (h * h);

  // Thomas algorithm
  Eigen::VectorXcd c(n - 1), d(n);
  Complex piv = diag[0];
  if (piv == Complex(0.0)) throw SolveFailure("fd_reference_1d pivot failure");
  c[0] = upper[0] / piv;
  d[0] = rhs[0] / piv;
  for (int j = 1; j < n; ++j) {
    piv = diag[j] - lower[j - 1] * c[j - 1];
    if (piv == Complex(0.0)) throw SolveFailure("fd_reference_1d pivot failure");
    if (j < n - 1) c[j] = upper[j] / piv;
    d[j] = (rhs[j] - lower[j - 1] * d[j - 1]) / piv;
  }
  Eigen::VectorXcd u(n);
  u[n - 1] = d[n - 1];
  for (int j = n - 2; j >= 0; --j) u[j] = d[j] - c[j] * u[j + 1];

  FieldGrid grid = make_grid(Domain::interval(0.0, 1.0), n);
  grid.values = u;
  return grid;
}

}  // namespace hvp
