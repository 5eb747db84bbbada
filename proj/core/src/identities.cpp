#include "hvp/identities.hpp"

#include <cmath>

namespace hvp {

namespace {

void finalize(IdentityReport& r) {
  double total = 0.0, biggest = 0.0;
  for (const auto& [name, v] : r.bulk_terms) {
    total += v;
    biggest = std::max(biggest, std::abs(v));
  }
  for (const auto& [name, v] : r.boundary_terms) {
    total += v;
    biggest = std::max(biggest, std::abs(v));
  }
  r.residual = total;
  r.relative_residual = biggest > 0.0 ? std::abs(total) / biggest : std::abs(total);
}

}  // namespace

IdentityReport rellich_residual(const ClosedFormField& u, double k,
                                const Domain& domain, int quad_order) {
  const InteriorQuadrature iq = interior_quadrature(domain, quad_order);
  const BoundaryQuadrature bq = boundary_quadrature(domain, quad_order);
  const Eigen::VectorXd x0 = domain.origin();
  const double nu = static_cast<double>(domain.dim());

  double mixed = 0.0, bulk = 0.0;
  for (int q = 0; q < iq.weights.size(); ++q) {
    const Eigen::VectorXd x = iq.points.row(q);
    const Eigen::VectorXd y = x - x0;
    const Eigen::VectorXcd g = u.gradient(x);
    const Complex Lu = -u.laplacian(x) - k * k * u.value(x);
    Complex ydotg = 0.0;
    for (int a = 0; a < y.size(); ++a) ydotg += y[a] * g[a];
    mixed += 2.0 * std::real(ydotg * std::conj(Lu)) * iq.weights[q];
    const double g2 = g.squaredNorm();
    const double u2 = std::norm(u.value(x));
    bulk += ((nu - 2.0) * g2 - nu * k * k * u2) * iq.weights[q];
  }

  double boundary = 0.0;
  for (int q = 0; q < bq.weights.size(); ++q) {
    const Eigen::VectorXd x = bq.points.row(q);
    const Eigen::VectorXd n = bq.normals.row(q);
    const Eigen::VectorXd y = x - x0;
    const Eigen::VectorXcd g = u.gradient(x);
    Complex ydotgbar = 0.0, dn = 0.0;
    for (int a = 0; a < y.size(); ++a) {
      ydotgbar += y[a] * std::conj(g[a]);
      dn += g[a] * n[a];
    }
    const double ydotn = y.dot(n);
    const double g2 = g.squaredNorm();
    const double u2 = std::norm(u.value(x));
    boundary += (2.0 * std::real(ydotgbar * dn) - g2 * ydotn +
                 k * k * u2 * ydotn) *
                bq.weights[q];
  }

  IdentityReport r;
  r.bulk_terms["mixed"] = mixed;
  r.bulk_terms["bulk"] = bulk;
  r.boundary_terms["boundary"] = boundary;
  finalize(r);
  return r;
}

IdentityReport low_order_morawetz_residual(const ClosedFormField& u, double k,
                                           double beta, const Domain& domain,
                                           int quad_order) {
  const InteriorQuadrature iq = interior_quadrature(domain, quad_order);
  const BoundaryQuadrature bq = boundary_quadrature(domain, quad_order);

  // M0 u = -i k beta u, so conj(M0 u) = i k beta conj(u)
  double bulk = 0.0;
  for (int q = 0; q < iq.weights.size(); ++q) {
    const Eigen::VectorXd x = iq.points.row(q);
    const Complex Lu = -u.laplacian(x) - k * k * u.value(x);
    const Complex m0bar = Complex(0.0, k * beta) * std::conj(u.value(x));
    bulk += 2.0 * std::real(m0bar * Lu) * iq.weights[q];
  }

  double bmass = 0.0, bflux = 0.0;
  for (int q = 0; q < bq.weights.size(); ++q) {
    const Eigen::VectorXd x = bq.points.row(q);
    const Eigen::VectorXd n = bq.normals.row(q);
    const Complex uv = u.value(x);
    const Eigen::VectorXcd g = u.gradient(x);
    Complex dn = 0.0;
    for (int a = 0; a < n.size(); ++a) dn += g[a] * n[a];
    bmass += -2.0 * k * k * beta * std::norm(uv) * bq.weights[q];
    const Complex imp = dn - Complex(0.0, k) * uv;
    bflux += 2.0 * std::real(Complex(0.0, k * beta) * std::conj(uv) * imp) *
             bq.weights[q];
  }

  IdentityReport r;
  r.bulk_terms["multiplier"] = bulk;
  r.boundary_terms["boundary_mass"] = bmass;
  r.boundary_terms["boundary_flux"] = bflux;
  finalize(r);
  return r;
}

}  // namespace hvp
