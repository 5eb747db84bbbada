#pragma once

#include "hvp/field.hpp"
#include "hvp/quadrature.hpp"

namespace hvp {

/// Full parameter pack of the regularised functionals. eps2/eps3 are the
/// Young split parameters of the boundary estimates; the displayed
/// strong-BC bound corresponds to eps2 = L0/2, the weak-BC default to
/// eps2 = L0/4, eps3 = L0/(4 L^2).
struct EnergyParams {
  double k = 1.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double alpha = 1.0;
  double beta = 0.0;
  double eps1 = 0.5;
  double eps2 = 0.25;
  double eps3 = 0.25;
  double L = 1.0;
  double L0 = 0.5;
  int nu = 2;

  /// Throws InvalidParams when an admissibility constraint fails:
  /// k > 0, gammas >= 0, eps* > 0, 0 < L0 <= L, alpha > 1/2 and
  /// alpha < nu/(2(nu-2)) for nu >= 3.
  void validate() const;

  static EnergyParams for_domain(const Domain& domain);
};

/// Coefficients of the coercivity lower bound, normalised by nu so that the
/// bound reads F(u) >= c_residual ||L u||^2 + c_grad ||grad u||^2
/// + c_mass k^2 ||u||^2 + c_bgrad ||grad u||^2_bnd + c_bmass k^2 ||u||^2_bnd
/// + c_bimp ||d_n u - i k u||^2_bnd.
struct CoercivityCoefficients {
  double c_residual = 0.0;
  double c_grad = 0.0;
  double c_mass = 0.0;
  double c_bgrad = 0.0;
  double c_bmass = 0.0;
  double c_bimp = 0.0;
  bool has_impedance_term = false;

  bool coercive() const;
};

/// Strong-BC bound: five coefficients (no impedance-residual term).
CoercivityCoefficients coercivity_coefficients_strong(const EnergyParams& p);

/// Weak-BC bound: all six coefficients.
CoercivityCoefficients coercivity_coefficients_weak(const EnergyParams& p);

/// Smallest gamma1 that zeroes the residual coefficient, the rest of the
/// pack held fixed.
double gamma1_threshold(const EnergyParams& p);
/// Smallest gamma2 that zeroes the impedance coefficient.
double gamma2_threshold(const EnergyParams& p);

enum class ParameterStrategy { paper_defaults, custom };

/// Admissible pack for dimension nu with the square/cube defaults
/// (nu = 2: alpha 1, eps1 1/2, beta 6.2L, gamma1 39.5L^2, gamma2 5.7L;
///  nu = 3: alpha 1, eps1 1/4, beta 7.5L, gamma1 26.5L^2, gamma2 5L;
///  nu = 1: alpha 1, eps1 1/4, beta/gammas a fixed margin above their
///  positivity thresholds). Throws NoAdmissibleAlpha outside nu in {1,2,3}.
EnergyParams select_parameters(int nu, double L, double L0,
                               ParameterStrategy strategy =
                                   ParameterStrategy::paper_defaults);

/// E_P(u) = int 1/2 (|grad u|^2 - k^2 |u|^2) - Re int f conj(u).
double physical_energy(const ClosedFormField& u, const ClosedFormField& f,
                       double k, const Domain& domain,
                       const InteriorQuadrature& iq);

/// E_gamma(u) = E_P(u) + gamma1 ||L u - f||^2.
double regularised_energy(const ClosedFormField& u, const ClosedFormField& f,
                          const EnergyParams& p, const Domain& domain,
                          const InteriorQuadrature& iq);

/// F_gamma(u) = E_gamma1(u) + gamma2 ||d_n u - i k u||^2_bnd.
double weak_bc_energy(const ClosedFormField& u, const ClosedFormField& f,
                      const EnergyParams& p, const Domain& domain,
                      const InteriorQuadrature& iq,
                      const BoundaryQuadrature& bq);

/// A_WBC(u,v): linear in u, antilinear in v, Hermitian.
Complex form_awbc(const ClosedFormField& u, const ClosedFormField& v,
                  const EnergyParams& p, const Domain& domain,
                  const InteriorQuadrature& iq, const BoundaryQuadrature& bq);

/// Squared seminorm components of || . ||_V (and the L-rescaled variant).
struct VNormParts {
  double grad = 0.0;       // ||grad u||^2
  double mass = 0.0;       // k^2 ||u||^2
  double residual = 0.0;   // ||L u||^2
  double bmass = 0.0;      // k^2 ||u||^2_bnd
  double bgrad = 0.0;      // ||grad u||^2_bnd
  double bimp = 0.0;       // ||d_n u - i k u||^2_bnd

  double total(bool rescaled, double L) const;
};

VNormParts v_norm_parts(const ClosedFormField& u, double k,
                        const Domain& domain, const InteriorQuadrature& iq,
                        const BoundaryQuadrature& bq);

/// Sum of the squared seminorms (L-weighted when rescaled).
double v_norm_squared(const ClosedFormField& u, double k, const Domain& domain,
                      const InteriorQuadrature& iq,
                      const BoundaryQuadrature& bq, bool rescaled = false,
                      double L = 1.0);

double v_norm(const ClosedFormField& u, double k, const Domain& domain,
              const InteriorQuadrature& iq, const BoundaryQuadrature& bq,
              bool rescaled = false, double L = 1.0);

}  // namespace hvp
