#include "hvp/energy.hpp"

#include <cmath>

namespace hvp {

void EnergyParams::validate() const {
  if (!(k > 0.0)) throw InvalidParams("k must be positive");
  if (gamma1 < 0.0 || gamma2 < 0.0) throw InvalidParams("gammas must be >= 0");
  if (!(eps1 > 0.0 && eps2 > 0.0 && eps3 > 0.0)) {
    throw InvalidParams("Young parameters eps1, eps2, eps3 must be positive");
  }
  if (!(L0 > 0.0 && L0 <= L)) throw InvalidParams("requires 0 < L0 <= L");
  if (!(alpha > 0.5)) throw InvalidParams("requires alpha > 1/2");
  if (nu >= 3 && !(alpha < nu / (2.0 * (nu - 2)))) {
    throw InvalidParams("requires alpha < nu/(2(nu-2)) for nu >= 3");
  }
  if (nu < 1 || nu > 3) throw InvalidParams("nu must be 1, 2 or 3");
}

EnergyParams EnergyParams::for_domain(const Domain& domain) {
  return select_parameters(domain.dim(), domain.diameter(),
                           domain.star_shape_constant());
}

bool CoercivityCoefficients::coercive() const {
  const bool core = c_residual > 0.0 && c_grad > 0.0 && c_mass > 0.0 &&
                    c_bgrad > 0.0 && c_bmass > 0.0;
  return has_impedance_term ? (core && c_bimp > 0.0) : core;
}

namespace {

// shared bulk coefficients of nu*E; boundary parts differ per case
void bulk_coefficients(const EnergyParams& p, CoercivityCoefficients& c) {
  const double nu = p.nu;
  c.c_residual = nu * p.gamma1 - p.alpha * p.alpha * p.L * p.L / p.eps1 -
                 2.0 * p.beta * p.beta / ((p.alpha - 0.5) * nu);
  c.c_grad = nu / 2.0 - p.alpha * (nu - 2.0) - p.eps1;
  c.c_mass = 0.5 * (p.alpha - 0.5) * nu;
}

}  // namespace

CoercivityCoefficients coercivity_coefficients_strong(const EnergyParams& p) {
  p.validate();
  CoercivityCoefficients c;
  bulk_coefficients(p, c);
  c.c_bgrad = p.alpha * p.L0 - p.alpha * p.eps2;
  c.c_bmass = 2.0 * p.beta - p.alpha * p.L - p.alpha * p.L * p.L / p.eps2;
  c.c_bimp = 0.0;
  c.has_impedance_term = false;
  const double nu = p.nu;
  c.c_residual /= nu;
  c.c_grad /= nu;
  c.c_mass /= nu;
  c.c_bgrad /= nu;
  c.c_bmass /= nu;
  return c;
}

CoercivityCoefficients coercivity_coefficients_weak(const EnergyParams& p) {
  p.validate();
  CoercivityCoefficients c;
  bulk_coefficients(p, c);
  c.c_bgrad = p.alpha * p.L0 - p.alpha * p.L * p.L * p.eps3 - p.alpha * p.eps2;
  c.c_bmass = 2.0 * p.beta - p.alpha * p.L - p.alpha * p.L * p.L / p.eps2;
  c.c_bimp = p.nu * p.gamma2 - p.alpha / p.eps3;
  c.has_impedance_term = true;
  const double nu = p.nu;
  c.c_residual /= nu;
  c.c_grad /= nu;
  c.c_mass /= nu;
  c.c_bgrad /= nu;
  c.c_bmass /= nu;
  c.c_bimp /= nu;
  return c;
}

double gamma1_threshold(const EnergyParams& p) {
  return (p.alpha * p.alpha * p.L * p.L / p.eps1 +
          2.0 * p.beta * p.beta / ((p.alpha - 0.5) * p.nu)) /
         p.nu;
}

double gamma2_threshold(const EnergyParams& p) {
  return p.alpha / (p.eps3 * p.nu);
}

EnergyParams select_parameters(int nu, double L, double L0,
                               ParameterStrategy strategy) {
  if (nu < 1 || nu > 3) {
    throw NoAdmissibleAlpha("no admissible alpha outside nu in {1,2,3}");
  }
  if (!(L0 > 0.0 && L0 <= L)) throw InvalidParams("requires 0 < L0 <= L");

  EnergyParams p;
  p.nu = nu;
  p.L = L;
  p.L0 = L0;
  p.alpha = 1.0;
  p.eps2 = L0 / 4.0;
  p.eps3 = L0 / (4.0 * L * L);

  if (strategy == ParameterStrategy::paper_defaults) {
    if (nu == 2) {
      p.eps1 = 0.5;
      p.beta = 6.2 * L;
      p.gamma1 = 39.5 * L * L;
      p.gamma2 = 5.7 * L;
    } else if (nu == 3) {
      p.eps1 = 0.25;
      p.beta = 7.5 * L;
      p.gamma1 = 26.5 * L * L;
      p.gamma2 = 5.0 * L;
    } else {
      // 1D: beta a fixed margin above the positivity rule
      // beta > alpha L / 2 + 2 alpha L^2 / L0, gammas above their thresholds.
      p.eps1 = 0.25;
      p.beta = 1.05 * (p.alpha * L / 2.0 + 2.0 * p.alpha * L * L / L0);
      p.gamma1 = 1.05 * gamma1_threshold(p);
      p.gamma2 = 1.05 * gamma2_threshold(p);
    }
  }
  p.validate();
  return p;
}

double physical_energy(const ClosedFormField& u, const ClosedFormField& f,
                       double k, const Domain& domain,
                       const InteriorQuadrature& iq) {
  (void)domain;
  double e = 0.0;
  for (int q = 0; q < iq.weights.size(); ++q) {
    const Eigen::VectorXd x = iq.points.row(q);
    const Complex uv = u.value(x);
    const double g2 = u.gradient(x).squaredNorm();
    e += (0.5 * (g2 - k * k * std::norm(uv)) -
          std::real(f.value(x) * std::conj(uv))) *
         iq.weights[q];
  }
  return e;
}

double regularised_energy(const ClosedFormField& u, const ClosedFormField& f,
                          const EnergyParams& p, const Domain& domain,
                          const InteriorQuadrature& iq) {
  double e = physical_energy(u, f, p.k, domain, iq);
  for (int q = 0; q < iq.weights.size(); ++q) {
    const Eigen::VectorXd x = iq.points.row(q);
    const Complex r = helmholtz_op(u, x, p.k) - f.value(x);
    e += p.gamma1 * std::norm(r) * iq.weights[q];
  }
  return e;
}

double weak_bc_energy(const ClosedFormField& u, const ClosedFormField& f,
                      const EnergyParams& p, const Domain& domain,
                      const InteriorQuadrature& iq,
                      const BoundaryQuadrature& bq) {
  double e = regularised_energy(u, f, p, domain, iq);
  for (int q = 0; q < bq.weights.size(); ++q) {
    const Eigen::VectorXd x = bq.points.row(q);
    const Eigen::VectorXd n = bq.normals.row(q);
    e += p.gamma2 * std::norm(impedance_residual(u, x, n, p.k)) * bq.weights[q];
  }
  return e;
}

Complex form_awbc(const ClosedFormField& u, const ClosedFormField& v,
                  const EnergyParams& p, const Domain& domain,
                  const InteriorQuadrature& iq, const BoundaryQuadrature& bq) {
  (void)domain;
  Complex a = 0.0;
  const double k = p.k;
  for (int q = 0; q < iq.weights.size(); ++q) {
    const Eigen::VectorXd x = iq.points.row(q);
    const Eigen::VectorXcd gu = u.gradient(x);
    const Eigen::VectorXcd gv = v.gradient(x);
    Complex gdot = 0.0;
    for (int d = 0; d < gu.size(); ++d) gdot += gu[d] * std::conj(gv[d]);
    const Complex Lu = -u.laplacian(x) - k * k * u.value(x);
    const Complex Lv = -v.laplacian(x) - k * k * v.value(x);
    a += (gdot - k * k * u.value(x) * std::conj(v.value(x)) +
          2.0 * p.gamma1 * Lu * std::conj(Lv)) *
         iq.weights[q];
  }
  for (int q = 0; q < bq.weights.size(); ++q) {
    const Eigen::VectorXd x = bq.points.row(q);
    const Eigen::VectorXd n = bq.normals.row(q);
    a += 2.0 * p.gamma2 * impedance_residual(u, x, n, k) *
         std::conj(impedance_residual(v, x, n, k)) * bq.weights[q];
  }
  return a;
}

double VNormParts::total(bool rescaled, double L) const {
  if (!rescaled) return grad + mass + residual + bmass + bgrad + bimp;
  return grad + mass + L * L * residual + L * (bmass + bgrad + bimp);
}

VNormParts v_norm_parts(const ClosedFormField& u, double k,
                        const Domain& domain, const InteriorQuadrature& iq,
                        const BoundaryQuadrature& bq) {
  (void)domain;
  VNormParts parts;
  for (int q = 0; q < iq.weights.size(); ++q) {
    const Eigen::VectorXd x = iq.points.row(q);
    const Complex uv = u.value(x);
    parts.grad += u.gradient(x).squaredNorm() * iq.weights[q];
    parts.mass += k * k * std::norm(uv) * iq.weights[q];
    parts.residual += std::norm(helmholtz_op(u, x, k)) * iq.weights[q];
  }
  for (int q = 0; q < bq.weights.size(); ++q) {
    const Eigen::VectorXd x = bq.points.row(q);
    const Eigen::VectorXd n = bq.normals.row(q);
    parts.bmass += k * k * std::norm(u.value(x)) * bq.weights[q];
    parts.bgrad += u.gradient(x).squaredNorm() * bq.weights[q];
    parts.bimp += std::norm(impedance_residual(u, x, n, k)) * bq.weights[q];
  }
  return parts;
}

double v_norm_squared(const ClosedFormField& u, double k, const Domain& domain,
                      const InteriorQuadrature& iq,
                      const BoundaryQuadrature& bq, bool rescaled, double L) {
  return v_norm_parts(u, k, domain, iq, bq).total(rescaled, L);
}

double v_norm(const ClosedFormField& u, double k, const Domain& domain,
              const InteriorQuadrature& iq, const BoundaryQuadrature& bq,
              bool rescaled, double L) {
  return std::sqrt(v_norm_squared(u, k, domain, iq, bq, rescaled, L));
}

}  // namespace hvp
