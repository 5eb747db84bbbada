#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <functional>

#include "hvp/errors.hpp"
#include "hvp/quadrature.hpp"

// Scalar-templated quintic Hermite kernel on a uniform interval mesh.
// The public fem API instantiates it with double; convergence studies use
// long double because the gamma1 * h^-4 block drives the condition number
// past what double can resolve at the finest meshes.

namespace hvp::fem1d {

template <class Real>
struct Shapes {
  std::array<Real, 6> N, dN, d2N;

  // dofs (value, u', u'') at both ends of [0,1]; derivative dofs scaled by
  // h^d so coefficients are nodal derivative values
  static Shapes at(Real t, Real h) {
    Shapes s;
    const Real t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    s.N = {1 - 10 * t3 + 15 * t4 - 6 * t5,
           h * (t - 6 * t3 + 8 * t4 - 3 * t5),
           h * h * (Real(0.5) * t2 - Real(1.5) * t3 + Real(1.5) * t4 -
                    Real(0.5) * t5),
           10 * t3 - 15 * t4 + 6 * t5,
           h * (-4 * t3 + 7 * t4 - 3 * t5),
           h * h * (Real(0.5) * t3 - t4 + Real(0.5) * t5)};
    s.dN = {(-30 * t2 + 60 * t3 - 30 * t4) / h,
            (1 - 18 * t2 + 32 * t3 - 15 * t4),
            h * (t - Real(4.5) * t2 + 6 * t3 - Real(2.5) * t4),
            (30 * t2 - 60 * t3 + 30 * t4) / h,
            (-12 * t2 + 28 * t3 - 15 * t4),
            h * (Real(1.5) * t2 - 4 * t3 + Real(2.5) * t4)};
    s.d2N = {(-60 * t + 180 * t2 - 120 * t3) / (h * h),
             (-36 * t + 96 * t2 - 60 * t3) / h,
             (1 - 9 * t + 18 * t2 - 10 * t3),
             (60 * t - 180 * t2 + 120 * t3) / (h * h),
             (-24 * t + 84 * t2 - 60 * t3) / h,
             (3 * t - 12 * t2 + 10 * t3)};
    return s;
  }
};

template <class Real>
using ComplexVec = Eigen::Vector<std::complex<Real>, Eigen::Dynamic>;
template <class Real>
using ComplexMat =
    Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <class Real>
struct System {
  ComplexMat<Real> matrix;
  ComplexVec<Real> rhs;
};

/// Pointwise data of a reference field in Real precision.
template <class Real>
struct Reference {
  std::function<std::complex<Real>(Real)> value, d1, d2;
};

/// The 1D analytic impedance solution for constant forcing, Real precision.
template <class Real>
Reference<Real> exact_constant_forcing(Real k, std::complex<Real> f) {
  using C = std::complex<Real>;
  const C amp = f / (k * k);
  const C i(0, 1);
  Reference<Real> r;
  r.value = [amp, k, i](Real x) {
    return amp * (Real(0.5) * (std::exp(i * k * x) + std::exp(i * k * (1 - x))) -
                  Real(1));
  };
  r.d1 = [amp, k, i](Real x) {
    return amp * i * k * Real(0.5) *
           (std::exp(i * k * x) - std::exp(i * k * (1 - x)));
  };
  r.d2 = [amp, k, i](Real x) {
    return amp * (-Real(0.5) * k * k) *
           (std::exp(i * k * x) + std::exp(i * k * (1 - x)));
  };
  return r;
}

/// Assemble the regularised weak-BC system on (lo, hi) with `cells` elements.
/// boundary_weight is the full coefficient of the impedance-residual block
/// (2 gamma2 in energy mode, lambda/h in penalty mode). When `galerkin` the
/// -ik <u, v>_bnd boundary term of the impedance weak form is added, which
/// restores Galerkin consistency at the cost of Hermitian symmetry.
template <class Real>
System<Real> assemble(int cells, Real lo, Real hi, Real k, Real gamma1,
                      Real boundary_weight, bool galerkin,
                      const std::function<std::complex<Real>(Real)>& f,
                      int quad_order = 8) {
  using C = std::complex<Real>;
  const int n = 3 * (cells + 1);
  System<Real> sys;
  sys.matrix = ComplexMat<Real>::Zero(n, n);
  sys.rhs = ComplexVec<Real>::Zero(n);
  const Real h = (hi - lo) / cells;

  const GaussRule g = gauss_legendre(quad_order);
  for (int e = 0; e < cells; ++e) {
    const int base = 3 * e;
    for (int q = 0; q < quad_order; ++q) {
      const Real t = Real(0.5) * (Real(g.nodes[q]) + 1);
      const Real wq = Real(0.5) * Real(g.weights[q]) * h;
      const auto s = Shapes<Real>::at(t, h);
      std::array<Real, 6> Lop;
      for (int a = 0; a < 6; ++a) Lop[a] = -s.d2N[a] - k * k * s.N[a];
      const Real x = lo + (e + t) * h;
      const C fx = f(x);
      for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
          sys.matrix(base + a, base + b) +=
              (s.dN[b] * s.dN[a] - k * k * s.N[b] * s.N[a] +
               2 * gamma1 * Lop[b] * Lop[a]) *
              wq;
        }
        sys.rhs[base + a] += fx * ((s.N[a] + 2 * gamma1 * Lop[a]) * wq);
      }
    }
  }

  // endpoint traces: (value, slope) of dofs (v, d1, d2)
  const std::array<std::array<Real, 2>, 3> tr = {{{1, 0}, {0, 1}, {0, 0}}};
  for (const auto& [node, sgn] :
       std::array<std::pair<int, Real>, 2>{{{0, -1}, {cells, 1}}}) {
    const int base = 3 * node;
    const C ik(0, k);
    for (int a = 0; a < 3; ++a) {
      const C sa = sgn * tr[a][1] - ik * tr[a][0];
      for (int b = 0; b < 3; ++b) {
        const C sb = sgn * tr[b][1] - ik * tr[b][0];
        sys.matrix(base + a, base + b) += boundary_weight * sb * std::conj(sa);
        if (galerkin) {
          sys.matrix(base + a, base + b) += -ik * tr[b][0] * tr[a][0];
        }
      }
    }
  }
  return sys;
}

/// Partial-pivot LU with one refinement pass; residual contract 1e-10.
template <class Real>
ComplexVec<Real> solve(const System<Real>& sys, Real residual_target = 1e-10) {
  using C = std::complex<Real>;
  if (sys.rhs.norm() == Real(0)) return ComplexVec<Real>::Zero(sys.rhs.size());
  Eigen::PartialPivLU<ComplexMat<Real>> lu(sys.matrix);
  ComplexVec<Real> x = lu.solve(sys.rhs);
  for (int pass = 0; pass < 2; ++pass) {
    const ComplexVec<Real> r = sys.rhs - sys.matrix * x;
    x += lu.solve(r);
  }
  const Real res =
      (sys.matrix * x - sys.rhs).norm() / sys.rhs.norm();
  if (!(res < residual_target)) {
    throw SolveFailure("1d solve residual above target");
  }
  (void)residual_target;
  return x;
}

template <class Real>
struct VParts {
  Real grad = 0, mass = 0, residual = 0, bmass = 0, bgrad = 0, bimp = 0;
  Real total(bool rescaled, Real L) const {
    if (!rescaled) return grad + mass + residual + bmass + bgrad + bimp;
    return grad + mass + L * L * residual + L * (bmass + bgrad + bimp);
  }
};

/// Squared V-seminorms of (discrete field - reference).
template <class Real>
VParts<Real> vnorm_error(const ComplexVec<Real>& coeffs,
                         const Reference<Real>& ref, int cells, Real lo,
                         Real hi, Real k, int quad_order = 10) {
  using C = std::complex<Real>;
  VParts<Real> p;
  const Real h = (hi - lo) / cells;
  const GaussRule g = gauss_legendre(quad_order);
  for (int e = 0; e < cells; ++e) {
    const int base = 3 * e;
    for (int q = 0; q < quad_order; ++q) {
      const Real t = Real(0.5) * (Real(g.nodes[q]) + 1);
      const Real wq = Real(0.5) * Real(g.weights[q]) * h;
      const auto s = Shapes<Real>::at(t, h);
      C uh = 0, duh = 0, d2uh = 0;
      for (int a = 0; a < 6; ++a) {
        uh += coeffs[base + a] * s.N[a];
        duh += coeffs[base + a] * s.dN[a];
        d2uh += coeffs[base + a] * s.d2N[a];
      }
      const Real x = lo + (e + t) * h;
      const C ev = uh - ref.value(x);
      const C eg = duh - ref.d1(x);
      const C eL = (-d2uh - k * k * uh) - (-ref.d2(x) - k * k * ref.value(x));
      p.grad += std::norm(eg) * wq;
      p.mass += k * k * std::norm(ev) * wq;
      p.residual += std::norm(eL) * wq;
    }
  }
  const C ik(0, k);
  for (const auto& [node, sgn] :
       std::array<std::pair<int, Real>, 2>{{{0, -1}, {cells, 1}}}) {
    const Real x = node == 0 ? lo : hi;
    const C uh = coeffs[3 * node];
    const C duh = coeffs[3 * node + 1];
    const C ev = uh - ref.value(x);
    const C eg = duh - ref.d1(x);
    const C es = (sgn * duh - ik * uh) - (sgn * ref.d1(x) - ik * ref.value(x));
    p.bmass += k * k * std::norm(ev);
    p.bgrad += std::norm(eg);
    p.bimp += std::norm(es);
  }
  return p;
}

/// Nodal interpolant: value, first and second derivative at every node.
template <class Real>
ComplexVec<Real> interpolate(const Reference<Real>& ref, int cells, Real lo,
                             Real hi) {
  ComplexVec<Real> c(3 * (cells + 1));
  const Real h = (hi - lo) / cells;
  for (int i = 0; i <= cells; ++i) {
    const Real x = lo + i * h;
    c[3 * i] = ref.value(x);
    c[3 * i + 1] = ref.d1(x);
    c[3 * i + 2] = ref.d2(x);
  }
  return c;
}

}  // namespace hvp::fem1d
