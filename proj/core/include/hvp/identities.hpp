#pragma once

#include <map>
#include <string>

#include "hvp/field.hpp"
#include "hvp/quadrature.hpp"

namespace hvp {

/// Named terms of an integral identity whose sum must vanish for exact fields.
struct IdentityReport {
  std::map<std::string, double> bulk_terms;
  std::map<std::string, double> boundary_terms;
  double residual = 0.0;
  /// residual / max |term|; scale-free pass/fail quantity.
  double relative_residual = 0.0;
};

/// Rellich identity with multiplier (x - origin) . grad u:
///   int 2 Re((y.grad u) conj(L u))
/// + int ((nu-2)|grad u|^2 - nu k^2 |u|^2)
/// + oint (2 Re((y.conj(grad u))(grad u.n)) - |grad u|^2 (y.n) + k^2|u|^2 (y.n))
/// = 0,  y = x - origin.
IdentityReport rellich_residual(const ClosedFormField& u, double k,
                                const Domain& domain, int quad_order);

/// Low-order Morawetz identity with multiplier M0 u = -i k beta u:
///   int 2 Re(conj(M0 u) L u)
/// - 2 k^2 beta oint |u|^2
/// + 2 Re oint i k beta conj(u) (grad u.n - i k u) = 0.
IdentityReport low_order_morawetz_residual(const ClosedFormField& u, double k,
                                           double beta, const Domain& domain,
                                           int quad_order);

}  // namespace hvp
