#pragma once

#include <Eigen/Sparse>
#include <optional>

#include "hvp/energy.hpp"
#include "hvp/grid.hpp"
#include "hvp/oracle.hpp"

namespace hvp {

enum class Element { quintic_hermite_1d, bogner_fox_schmit_2d };

enum class PenaltyMode { energy, lambda_over_h };

/// `energy`: the Hermitian system of the discrete energy minimiser.
/// `galerkin`: adds the -ik <u,v>_bnd weak-form boundary term, which makes
/// the scheme consistent with the impedance problem (the discrete solution
/// then converges to the PDE solution) at the cost of Hermitian symmetry.
/// The Hermitian part of both matrices is identical, so the coercivity
/// certificates apply to either.
enum class Formulation { energy, galerkin };

/// H^2-conforming space on a uniform interval or rectangle mesh.
/// 1D: quintic Hermite, 3 dofs per node (value, u', u'').
/// 2D: Bogner-Fox-Schmit bicubics, 4 dofs per node (value, dx, dy, dxy).
class FemSpace {
 public:
  const Domain& domain() const { return domain_; }
  Element element() const { return element_; }
  int dim() const { return domain_.dim(); }
  int cells(int axis) const { return axis == 0 ? cx_ : cy_; }
  double h(int axis) const { return axis == 0 ? hx_ : hy_; }
  double min_h() const { return dim() == 1 ? hx_ : std::min(hx_, hy_); }
  int dofs_per_node() const { return dim() == 1 ? 3 : 4; }
  int n_nodes() const {
    return dim() == 1 ? cx_ + 1 : (cx_ + 1) * (cy_ + 1);
  }
  int dofs() const { return dofs_per_node() * n_nodes(); }

  struct Eval {
    Complex value;
    Eigen::VectorXcd gradient;
    Complex laplacian;
  };
  Eval evaluate(const Eigen::VectorXcd& coeffs, const Eigen::VectorXd& x) const;

  /// Discrete field wrapped in the common field interface.
  ClosedFormField as_field(Eigen::VectorXcd coeffs) const;

  /// Nodal interpolant. In 2D the mixed dxy dof is recovered by a centred
  /// finite difference of the analytic gradient.
  Eigen::VectorXcd interpolate(const ClosedFormField& u) const;

  friend FemSpace build_space(const Domain& domain, double h, Element element);

 private:
  Domain domain_ = Domain::interval(0.0, 1.0);
  Element element_ = Element::quintic_hermite_1d;
  int cx_ = 1, cy_ = 0;
  double hx_ = 1.0, hy_ = 0.0;
};

/// Throws IncompatibleMesh unless h divides every extent.
FemSpace build_space(const Domain& domain, double h, Element element);

struct FemSystem {
  Eigen::SparseMatrix<Complex> matrix;
  Eigen::VectorXcd rhs;
  EnergyParams params;
  Formulation formulation = Formulation::energy;
  PenaltyMode penalty_mode = PenaltyMode::energy;
  double lambda = 0.0;
  /// coefficient of the impedance-residual boundary block
  /// (2 gamma2, or lambda/h in penalty mode)
  double boundary_weight = 0.0;
  double h = 0.0;
  int dofs = 0;
  double k = 0.0;
  int dim = 0;
};

struct AssembleOptions {
  PenaltyMode penalty_mode = PenaltyMode::energy;
  double lambda = 50.0;
  Formulation formulation = Formulation::energy;
  int quad_order = 0;  // 0: element exactness order + 2
  /// generalised boundary data eta (d_n u - i k u = eta); adds the boundary
  /// load W_b oint eta conj(d_n v - ikv) (+ oint eta conj(v) when galerkin)
  std::optional<BoundaryField> eta;
};

FemSystem assemble(const FemSpace& space, const EnergyParams& params,
                   const ClosedFormField& f, const AssembleOptions& opts = {});

struct Solved {
  Eigen::VectorXcd x;
  double residual = 0.0;  // |Mx - b| / |b| in the solver's arithmetic
};

/// Direct factorisation with iterative refinement. The penalty block scales
/// like gamma1 h^-4, so 1D systems are factored in extended precision (they
/// are tiny); 2D systems use sparse LU in double. Throws SolveFailure when
/// the relative residual misses `residual_target`. Zero rhs short-circuits
/// to the zero field.
Solved solve_reported(const FemSystem& system, double residual_target = 1e-10);

Eigen::VectorXcd solve(const FemSystem& system, double residual_target = 1e-10);

/// Gram matrices of the V-norm seminorms over the discrete space; k^2 factors
/// are baked into mass and bmass so x* S x matches the VNormParts convention.
struct SeminormMatrices {
  Eigen::SparseMatrix<Complex> grad, mass, residual, bmass, bgrad, bimp;
};

SeminormMatrices assemble_seminorms(const FemSpace& space, double k,
                                    int quad_order = 0);

struct ErrorNorms {
  double v_norm_error = 0.0;
  double l2_error = 0.0;
  double h1_error = 0.0;
  VNormParts parts;  // squared seminorms of the error
};

ErrorNorms error_norms(const Eigen::VectorXcd& coeffs,
                       const ClosedFormField& reference, const FemSpace& space,
                       const EnergyParams& params, int quad_order = 0);

FieldGrid sample_solution(const FemSpace& space, const Eigen::VectorXcd& coeffs,
                          int n_per_axis);

}  // namespace hvp
