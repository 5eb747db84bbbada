#include "hvp/fem.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <vector>

#include "hvp/fem1d.hpp"

namespace hvp {

namespace {

constexpr int kQuad1D = 8;  // quintic products are degree 10, GL6 exact
constexpr int kQuad2D = 6;  // bicubic products are degree 6 per axis, GL4 exact

int default_order(Element e) {
  return e == Element::quintic_hermite_1d ? kQuad1D : kQuad2D;
}

// cubic Hermite on [0,1], index m*2 + d (node m, derivative order d),
// derivative dof scaled by h
void cubic_shapes(double t, double h, double P[4], double dP[4],
                  double d2P[4]) {
  const double t2 = t * t, t3 = t2 * t;
  P[0] = 1 - 3 * t2 + 2 * t3;
  P[1] = h * (t - 2 * t2 + t3);
  P[2] = 3 * t2 - 2 * t3;
  P[3] = h * (-t2 + t3);
  dP[0] = (-6 * t + 6 * t2) / h;
  dP[1] = 1 - 4 * t + 3 * t2;
  dP[2] = (6 * t - 6 * t2) / h;
  dP[3] = -2 * t + 3 * t2;
  d2P[0] = (-6 + 12 * t) / (h * h);
  d2P[1] = (-4 + 6 * t) / h;
  d2P[2] = (6 - 12 * t) / (h * h);
  d2P[3] = (-2 + 6 * t) / h;
}

struct BfsLocal {
  double val[16], gx[16], gy[16], lap[16];
};

// all 16 BFS shape functions at reference (tx, ty)
BfsLocal bfs_shapes(double tx, double ty, double hx, double hy) {
  double X[4], dX[4], d2X[4], Y[4], dY[4], d2Y[4];
  cubic_shapes(tx, hx, X, dX, d2X);
  cubic_shapes(ty, hy, Y, dY, d2Y);
  BfsLocal s;
  for (int my = 0; my < 2; ++my) {
    for (int mx = 0; mx < 2; ++mx) {
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          const int L = (my * 2 + mx) * 4 + (dy * 2 + dx);
          const int ix = mx * 2 + dx, iy = my * 2 + dy;
          s.val[L] = X[ix] * Y[iy];
          s.gx[L] = dX[ix] * Y[iy];
          s.gy[L] = X[ix] * dY[iy];
          s.lap[L] = d2X[ix] * Y[iy] + X[ix] * d2Y[iy];
        }
      }
    }
  }
  return s;
}

// global dofs of cell (i, j)
void bfs_cell_dofs(int i, int j, int ncx, int dofs[16]) {
  for (int my = 0; my < 2; ++my) {
    for (int mx = 0; mx < 2; ++mx) {
      const int node = (j + my) * (ncx + 1) + (i + mx);
      for (int type = 0; type < 4; ++type) {
        dofs[(my * 2 + mx) * 4 + type] = 4 * node + type;
      }
    }
  }
}

double boundary_weight_of(const EnergyParams& p, PenaltyMode mode,
                          double lambda, double h) {
  return mode == PenaltyMode::energy ? 2.0 * p.gamma2 : lambda / h;
}

using Triplets = std::vector<Eigen::Triplet<Complex>>;

// One boundary edge of one 2D cell: face axis pinned at t_pin, integrate
// over the other axis.
struct EdgeQuadPoint {
  BfsLocal shapes;
  Eigen::Vector2d x;
  Eigen::Vector2d n;
  double weight;
};

template <typename Visit>
void for_each_boundary_point(const FemSpace& sp, int order, Visit&& visit) {
  const GaussRule g = gauss_legendre(order);
  const int ncx = sp.cells(0), ncy = sp.cells(1);
  const double hx = sp.h(0), hy = sp.h(1);
  const Domain& dom = sp.domain();
  // four edges: (axis pinned, side)
  for (int axis = 0; axis < 2; ++axis) {
    for (int side = 0; side < 2; ++side) {
      const int nt = axis == 0 ? ncy : ncx;
      const double ht = axis == 0 ? hy : hx;
      Eigen::Vector2d n = Eigen::Vector2d::Zero();
      n[axis] = side == 0 ? -1.0 : 1.0;
      for (int c = 0; c < nt; ++c) {
        const int i = axis == 0 ? (side == 0 ? 0 : ncx - 1) : c;
        const int j = axis == 0 ? c : (side == 0 ? 0 : ncy - 1);
        for (int q = 0; q < order; ++q) {
          const double t = 0.5 * (g.nodes[q] + 1.0);
          const double w = 0.5 * g.weights[q] * ht;
          const double tpin = side == 0 ? 0.0 : 1.0;
          const double tx = axis == 0 ? tpin : t;
          const double ty = axis == 0 ? t : tpin;
          EdgeQuadPoint pt;
          pt.shapes = bfs_shapes(tx, ty, hx, hy);
          pt.x = Eigen::Vector2d(dom.lower(0) + (i + tx) * hx,
                                 dom.lower(1) + (j + ty) * hy);
          pt.n = n;
          pt.weight = w;
          visit(i, j, pt);
        }
      }
    }
  }
}

FemSystem assemble_2d(const FemSpace& sp, const EnergyParams& p,
                      const ClosedFormField& f, const AssembleOptions& opts) {
  const int order = opts.quad_order > 0 ? opts.quad_order : kQuad2D;
  const int ncx = sp.cells(0), ncy = sp.cells(1);
  const double hx = sp.h(0), hy = sp.h(1);
  const Domain& dom = sp.domain();
  const double k = p.k;
  const double wbnd = boundary_weight_of(p, opts.penalty_mode, opts.lambda,
                                         sp.min_h());
  const bool galerkin = opts.formulation == Formulation::galerkin;

  FemSystem sys;
  sys.params = p;
  sys.formulation = opts.formulation;
  sys.penalty_mode = opts.penalty_mode;
  sys.lambda = opts.lambda;
  sys.boundary_weight = wbnd;
  sys.h = sp.min_h();
  sys.dofs = sp.dofs();
  sys.k = k;
  sys.dim = 2;
  sys.rhs = Eigen::VectorXcd::Zero(sp.dofs());

  Triplets trips;
  trips.reserve(static_cast<size_t>(ncx) * ncy * 256);
  const GaussRule g = gauss_legendre(order);

  for (int j = 0; j < ncy; ++j) {
    for (int i = 0; i < ncx; ++i) {
      int dofs[16];
      bfs_cell_dofs(i, j, ncx, dofs);
      double A[16][16] = {};
      Complex rhs_loc[16] = {};
      for (int qy = 0; qy < order; ++qy) {
        for (int qx = 0; qx < order; ++qx) {
          const double tx = 0.5 * (g.nodes[qx] + 1.0);
          const double ty = 0.5 * (g.nodes[qy] + 1.0);
          const double wq =
              0.25 * g.weights[qx] * g.weights[qy] * hx * hy;
          const BfsLocal s = bfs_shapes(tx, ty, hx, hy);
          double Lop[16];
          for (int a = 0; a < 16; ++a) {
            Lop[a] = -s.lap[a] - k * k * s.val[a];
          }
          Eigen::VectorXd x(2);
          x[0] = dom.lower(0) + (i + tx) * hx;
          x[1] = dom.lower(1) + (j + ty) * hy;
          const Complex fx = f.value(x);
          for (int a = 0; a < 16; ++a) {
            for (int b = 0; b < 16; ++b) {
              A[a][b] += (s.gx[b] * s.gx[a] + s.gy[b] * s.gy[a] -
                          k * k * s.val[b] * s.val[a] +
                          2.0 * p.gamma1 * Lop[b] * Lop[a]) *
                         wq;
            }
            rhs_loc[a] += fx * ((s.val[a] + 2.0 * p.gamma1 * Lop[a]) * wq);
          }
        }
      }
      for (int a = 0; a < 16; ++a) {
        sys.rhs[dofs[a]] += rhs_loc[a];
        for (int b = 0; b < 16; ++b) {
          trips.emplace_back(dofs[a], dofs[b], Complex(A[a][b], 0.0));
        }
      }
    }
  }

  const Complex ik(0.0, k);
  for_each_boundary_point(sp, order, [&](int i, int j, const EdgeQuadPoint& pt) {
    int dofs[16];
    bfs_cell_dofs(i, j, ncx, dofs);
    Complex strace[16];
    for (int a = 0; a < 16; ++a) {
      const double dn = pt.shapes.gx[a] * pt.n[0] + pt.shapes.gy[a] * pt.n[1];
      strace[a] = dn - ik * pt.shapes.val[a];
    }
    const Complex eta_val =
        opts.eta ? opts.eta->value(pt.x, pt.n) : Complex(0.0);
    for (int a = 0; a < 16; ++a) {
      for (int b = 0; b < 16; ++b) {
        Complex v = wbnd * strace[b] * std::conj(strace[a]) * pt.weight;
        if (galerkin) {
          v += -ik * pt.shapes.val[b] * pt.shapes.val[a] * pt.weight;
        }
        trips.emplace_back(dofs[a], dofs[b], v);
      }
      if (opts.eta) {
        Complex load = wbnd * eta_val * std::conj(strace[a]) * pt.weight;
        if (galerkin) load += eta_val * pt.shapes.val[a] * pt.weight;
        sys.rhs[dofs[a]] += load;
      }
    }
  });

  sys.matrix.resize(sp.dofs(), sp.dofs());
  sys.matrix.setFromTriplets(trips.begin(), trips.end());
  return sys;
}

FemSystem assemble_1d(const FemSpace& sp, const EnergyParams& p,
                      const ClosedFormField& f, const AssembleOptions& opts) {
  const int order = opts.quad_order > 0 ? opts.quad_order : kQuad1D;
  const double h = sp.h(0);
  const double wbnd = boundary_weight_of(p, opts.penalty_mode, opts.lambda, h);
  const bool galerkin = opts.formulation == Formulation::galerkin;
  const Domain& dom = sp.domain();

  auto f1 = [&f](double x) {
    Eigen::VectorXd p1(1);
    p1[0] = x;
    return f.value(p1);
  };
  fem1d::System<double> sys1 = fem1d::assemble<double>(
      sp.cells(0), dom.lower(0), dom.upper(0), p.k, p.gamma1, wbnd, galerkin,
      f1, order);

  // generalised boundary load
  if (opts.eta) {
    const Complex ik(0.0, p.k);
    const int cells = sp.cells(0);
    for (const auto& [node, sgn] :
         std::array<std::pair<int, double>, 2>{{{0, -1.0}, {cells, 1.0}}}) {
      Eigen::VectorXd x(1), n(1);
      x[0] = node == 0 ? dom.lower(0) : dom.upper(0);
      n[0] = sgn;
      const Complex eta_val = opts.eta->value(x, n);
      const int base = 3 * node;
      // traces of (value, slope, curvature) dofs
      const double tr[3][2] = {{1, 0}, {0, 1}, {0, 0}};
      for (int a = 0; a < 3; ++a) {
        const Complex sa = sgn * tr[a][1] - ik * tr[a][0];
        Complex load = wbnd * eta_val * std::conj(sa);
        if (galerkin) load += eta_val * tr[a][0];
        sys1.rhs[base + a] += load;
      }
    }
  }

  FemSystem sys;
  sys.params = p;
  sys.formulation = opts.formulation;
  sys.penalty_mode = opts.penalty_mode;
  sys.lambda = opts.lambda;
  sys.boundary_weight = wbnd;
  sys.h = h;
  sys.dofs = sp.dofs();
  sys.k = p.k;
  sys.dim = 1;
  sys.matrix = sys1.matrix.sparseView();
  sys.rhs = sys1.rhs;
  return sys;
}

}  // namespace

FemSpace build_space(const Domain& domain, double h, Element element) {
  if (!(h > 0.0)) throw IncompatibleMesh("h must be positive");
  FemSpace sp;
  sp.domain_ = domain;
  sp.element_ = element;
  const int expected_dim = element == Element::quintic_hermite_1d ? 1 : 2;
  if (domain.dim() != expected_dim) {
    throw IncompatibleMesh("element dimensionality does not match the domain");
  }
  auto cells_of = [h](double extent) {
    const double r = extent / h;
    const int c = static_cast<int>(std::lround(r));
    if (c < 1 || std::abs(r - c) > 1e-9 * std::max(1.0, r)) {
      throw IncompatibleMesh("h must divide the domain extents");
    }
    return c;
  };
  sp.cx_ = cells_of(domain.extent(0));
  sp.hx_ = domain.extent(0) / sp.cx_;
  if (expected_dim == 2) {
    sp.cy_ = cells_of(domain.extent(1));
    sp.hy_ = domain.extent(1) / sp.cy_;
  }
  return sp;
}

FemSpace::Eval FemSpace::evaluate(const Eigen::VectorXcd& coeffs,
                                  const Eigen::VectorXd& x) const {
  Eval out;
  out.gradient = Eigen::VectorXcd::Zero(dim());
  if (dim() == 1) {
    int e = static_cast<int>((x[0] - domain_.lower(0)) / hx_);
    e = std::clamp(e, 0, cx_ - 1);
    const double t = (x[0] - domain_.lower(0) - e * hx_) / hx_;
    const auto s = fem1d::Shapes<double>::at(t, hx_);
    Complex v = 0, d1 = 0, d2 = 0;
    for (int a = 0; a < 6; ++a) {
      v += coeffs[3 * e + a] * s.N[a];
      d1 += coeffs[3 * e + a] * s.dN[a];
      d2 += coeffs[3 * e + a] * s.d2N[a];
    }
    out.value = v;
    out.gradient[0] = d1;
    out.laplacian = d2;
    return out;
  }
  int i = static_cast<int>((x[0] - domain_.lower(0)) / hx_);
  int j = static_cast<int>((x[1] - domain_.lower(1)) / hy_);
  i = std::clamp(i, 0, cx_ - 1);
  j = std::clamp(j, 0, cy_ - 1);
  const double tx = (x[0] - domain_.lower(0) - i * hx_) / hx_;
  const double ty = (x[1] - domain_.lower(1) - j * hy_) / hy_;
  const BfsLocal s = bfs_shapes(tx, ty, hx_, hy_);
  int dofs[16];
  bfs_cell_dofs(i, j, cx_, dofs);
  Complex v = 0, gx = 0, gy = 0, lap = 0;
  for (int a = 0; a < 16; ++a) {
    const Complex c = coeffs[dofs[a]];
    v += c * s.val[a];
    gx += c * s.gx[a];
    gy += c * s.gy[a];
    lap += c * s.lap[a];
  }
  out.value = v;
  out.gradient[0] = gx;
  out.gradient[1] = gy;
  out.laplacian = lap;
  return out;
}

ClosedFormField FemSpace::as_field(Eigen::VectorXcd coeffs) const {
  const FemSpace sp = *this;
  ClosedFormField f;
  f.value = [sp, coeffs](const Eigen::VectorXd& x) {
    return sp.evaluate(coeffs, x).value;
  };
  f.gradient = [sp, coeffs](const Eigen::VectorXd& x) {
    return sp.evaluate(coeffs, x).gradient;
  };
  f.laplacian = [sp, coeffs](const Eigen::VectorXd& x) {
    return sp.evaluate(coeffs, x).laplacian;
  };
  return f;
}

Eigen::VectorXcd FemSpace::interpolate(const ClosedFormField& u) const {
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(dofs());
  if (dim() == 1) {
    for (int i = 0; i <= cx_; ++i) {
      Eigen::VectorXd x(1);
      x[0] = domain_.lower(0) + i * hx_;
      c[3 * i] = u.value(x);
      c[3 * i + 1] = u.gradient(x)[0];
      c[3 * i + 2] = u.laplacian(x);  // 1D: u'' == laplacian
    }
    return c;
  }
  const double step = 1e-6 * domain_.diameter();
  for (int j = 0; j <= cy_; ++j) {
    for (int i = 0; i <= cx_; ++i) {
      Eigen::VectorXd x(2);
      x[0] = domain_.lower(0) + i * hx_;
      x[1] = domain_.lower(1) + j * hy_;
      const int node = j * (cx_ + 1) + i;
      const Eigen::VectorXcd g = u.gradient(x);
      c[4 * node] = u.value(x);
      c[4 * node + 1] = g[0];
      c[4 * node + 2] = g[1];
      Eigen::VectorXd xp = x, xm = x;
      xp[0] += step;
      xm[0] -= step;
      c[4 * node + 3] =
          (u.gradient(xp)[1] - u.gradient(xm)[1]) / (2.0 * step);
    }
  }
  return c;
}

FemSystem assemble(const FemSpace& space, const EnergyParams& params,
                   const ClosedFormField& f, const AssembleOptions& opts) {
  params.validate();
  if (space.dim() == 1) return assemble_1d(space, params, f, opts);
  return assemble_2d(space, params, f, opts);
}

Solved solve_reported(const FemSystem& system, double residual_target) {
  Solved out;
  const double bnorm = system.rhs.norm();
  if (bnorm == 0.0) {
    out.x = Eigen::VectorXcd::Zero(system.rhs.size());
    return out;
  }

  if (system.dim == 1) {
    // tiny dense system; extended precision absorbs the gamma1 h^-4 scaling
    using CL = std::complex<long double>;
    using MatL = Eigen::Matrix<CL, Eigen::Dynamic, Eigen::Dynamic>;
    using VecL = Eigen::Vector<CL, Eigen::Dynamic>;
    const int n = system.dofs;
    MatL A = MatL::Zero(n, n);
    for (int col = 0; col < system.matrix.outerSize(); ++col) {
      for (Eigen::SparseMatrix<Complex>::InnerIterator it(system.matrix, col);
           it; ++it) {
        A(it.row(), col) = CL(it.value().real(), it.value().imag());
      }
    }
    VecL b(n);
    for (int i = 0; i < n; ++i) {
      b[i] = CL(system.rhs[i].real(), system.rhs[i].imag());
    }
    Eigen::PartialPivLU<MatL> lu(A);
    VecL x = lu.solve(b);
    x += lu.solve(b - A * x);
    const long double res = (A * x - b).norm() / b.norm();
    if (!(res < (long double)residual_target)) {
      throw SolveFailure("1d solve residual above target");
    }
    out.residual = static_cast<double>(res);
    out.x.resize(n);
    for (int i = 0; i < n; ++i) {
      out.x[i] = Complex(static_cast<double>(x[i].real()),
                         static_cast<double>(x[i].imag()));
    }
    return out;
  }

  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu;
  lu.compute(system.matrix);
  if (lu.info() != Eigen::Success) {
    throw SolveFailure("sparse LU factorisation failed");
  }
  Eigen::VectorXcd x = lu.solve(system.rhs);
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::VectorXcd r = system.rhs - system.matrix * x;
    x += lu.solve(r);
  }
  const double res = (system.matrix * x - system.rhs).norm() / bnorm;
  if (!(res < residual_target)) {
    throw SolveFailure("solve residual " + std::to_string(res) +
                       " above target");
  }
  out.x = std::move(x);
  out.residual = res;
  return out;
}

Eigen::VectorXcd solve(const FemSystem& system, double residual_target) {
  return solve_reported(system, residual_target).x;
}

SeminormMatrices assemble_seminorms(const FemSpace& sp, double k,
                                    int quad_order) {
  const int order =
      quad_order > 0 ? quad_order : default_order(sp.element());
  SeminormMatrices out;
  const int n = sp.dofs();
  for (auto* m : {&out.grad, &out.mass, &out.residual, &out.bmass, &out.bgrad,
                  &out.bimp}) {
    m->resize(n, n);
  }

  if (sp.dim() == 1) {
    const double h = sp.h(0);
    Triplets tg, tm, tr;
    const GaussRule g = gauss_legendre(order);
    for (int e = 0; e < sp.cells(0); ++e) {
      for (int q = 0; q < order; ++q) {
        const double t = 0.5 * (g.nodes[q] + 1.0);
        const double wq = 0.5 * g.weights[q] * h;
        const auto s = fem1d::Shapes<double>::at(t, h);
        for (int a = 0; a < 6; ++a) {
          for (int b = 0; b < 6; ++b) {
            const double lb = -s.d2N[b] - k * k * s.N[b];
            const double la = -s.d2N[a] - k * k * s.N[a];
            tg.emplace_back(3 * e + a, 3 * e + b,
                            Complex(s.dN[b] * s.dN[a] * wq, 0));
            tm.emplace_back(3 * e + a, 3 * e + b,
                            Complex(k * k * s.N[b] * s.N[a] * wq, 0));
            tr.emplace_back(3 * e + a, 3 * e + b, Complex(lb * la * wq, 0));
          }
        }
      }
    }
    out.grad.setFromTriplets(tg.begin(), tg.end());
    out.mass.setFromTriplets(tm.begin(), tm.end());
    out.residual.setFromTriplets(tr.begin(), tr.end());

    Triplets tbm, tbg, tbi;
    const Complex ik(0.0, k);
    const double tr3[3][2] = {{1, 0}, {0, 1}, {0, 0}};
    for (const auto& [node, sgn] :
         std::array<std::pair<int, double>, 2>{{{0, -1.0}, {sp.cells(0), 1.0}}}) {
      const int base = 3 * node;
      for (int a = 0; a < 3; ++a) {
        const Complex sa = sgn * tr3[a][1] - ik * tr3[a][0];
        for (int b = 0; b < 3; ++b) {
          const Complex sb = sgn * tr3[b][1] - ik * tr3[b][0];
          tbm.emplace_back(base + a, base + b,
                           Complex(k * k * tr3[b][0] * tr3[a][0], 0));
          tbg.emplace_back(base + a, base + b,
                           Complex(tr3[b][1] * tr3[a][1], 0));
          tbi.emplace_back(base + a, base + b, sb * std::conj(sa));
        }
      }
    }
    out.bmass.setFromTriplets(tbm.begin(), tbm.end());
    out.bgrad.setFromTriplets(tbg.begin(), tbg.end());
    out.bimp.setFromTriplets(tbi.begin(), tbi.end());
    return out;
  }

  const int ncx = sp.cells(0), ncy = sp.cells(1);
  const double hx = sp.h(0), hy = sp.h(1);
  Triplets tg, tm, tr, tbm, tbg, tbi;
  const GaussRule g = gauss_legendre(order);
  for (int j = 0; j < ncy; ++j) {
    for (int i = 0; i < ncx; ++i) {
      int dofs[16];
      bfs_cell_dofs(i, j, ncx, dofs);
      for (int qy = 0; qy < order; ++qy) {
        for (int qx = 0; qx < order; ++qx) {
          const double tx = 0.5 * (g.nodes[qx] + 1.0);
          const double ty = 0.5 * (g.nodes[qy] + 1.0);
          const double wq = 0.25 * g.weights[qx] * g.weights[qy] * hx * hy;
          const BfsLocal s = bfs_shapes(tx, ty, hx, hy);
          for (int a = 0; a < 16; ++a) {
            const double la = -s.lap[a] - k * k * s.val[a];
            for (int b = 0; b < 16; ++b) {
              const double lb = -s.lap[b] - k * k * s.val[b];
              tg.emplace_back(
                  dofs[a], dofs[b],
                  Complex((s.gx[b] * s.gx[a] + s.gy[b] * s.gy[a]) * wq, 0));
              tm.emplace_back(dofs[a], dofs[b],
                              Complex(k * k * s.val[b] * s.val[a] * wq, 0));
              tr.emplace_back(dofs[a], dofs[b], Complex(lb * la * wq, 0));
            }
          }
        }
      }
    }
  }
  const Complex ik(0.0, k);
  for_each_boundary_point(sp, order, [&](int i, int j, const EdgeQuadPoint& pt) {
    int dofs[16];
    bfs_cell_dofs(i, j, ncx, dofs);
    Complex strace[16];
    for (int a = 0; a < 16; ++a) {
      const double dn = pt.shapes.gx[a] * pt.n[0] + pt.shapes.gy[a] * pt.n[1];
      strace[a] = dn - ik * pt.shapes.val[a];
    }
    for (int a = 0; a < 16; ++a) {
      for (int b = 0; b < 16; ++b) {
        tbm.emplace_back(
            dofs[a], dofs[b],
            Complex(k * k * pt.shapes.val[b] * pt.shapes.val[a] * pt.weight, 0));
        tbg.emplace_back(dofs[a], dofs[b],
                         Complex((pt.shapes.gx[b] * pt.shapes.gx[a] +
                                  pt.shapes.gy[b] * pt.shapes.gy[a]) *
                                     pt.weight,
                                 0));
        tbi.emplace_back(dofs[a], dofs[b],
                         strace[b] * std::conj(strace[a]) * pt.weight);
      }
    }
  });
  out.grad.setFromTriplets(tg.begin(), tg.end());
  out.mass.setFromTriplets(tm.begin(), tm.end());
  out.residual.setFromTriplets(tr.begin(), tr.end());
  out.bmass.setFromTriplets(tbm.begin(), tbm.end());
  out.bgrad.setFromTriplets(tbg.begin(), tbg.end());
  out.bimp.setFromTriplets(tbi.begin(), tbi.end());
  return out;
}

ErrorNorms error_norms(const Eigen::VectorXcd& coeffs,
                       const ClosedFormField& reference, const FemSpace& space,
                       const EnergyParams& params, int quad_order) {
  const int order =
      quad_order > 0 ? quad_order : default_order(space.element()) + 2;
  const double k = params.k;
  ErrorNorms out;
  VNormParts& p = out.parts;
  double l2 = 0.0, h1 = 0.0;

  const Domain& dom = space.domain();
  const GaussRule g = gauss_legendre(order);
  if (space.dim() == 1) {
    const double h = space.h(0);
    for (int e = 0; e < space.cells(0); ++e) {
      for (int q = 0; q < order; ++q) {
        const double t = 0.5 * (g.nodes[q] + 1.0);
        const double wq = 0.5 * g.weights[q] * h;
        Eigen::VectorXd x(1);
        x[0] = dom.lower(0) + (e + t) * h;
        const auto uh = space.evaluate(coeffs, x);
        const Complex ev = uh.value - reference.value(x);
        const Complex eg = uh.gradient[0] - reference.gradient(x)[0];
        const Complex eL = (-uh.laplacian - k * k * uh.value) -
                           helmholtz_op(reference, x, k);
        p.grad += std::norm(eg) * wq;
        p.mass += k * k * std::norm(ev) * wq;
        p.residual += std::norm(eL) * wq;
        l2 += std::norm(ev) * wq;
        h1 += (std::norm(ev) + std::norm(eg)) * wq;
      }
    }
    const Complex ik(0.0, k);
    for (const auto& [node, sgn] :
         std::array<std::pair<int, double>, 2>{{{0, -1.0},
                                                {space.cells(0), 1.0}}}) {
      Eigen::VectorXd x(1), n(1);
      x[0] = node == 0 ? dom.lower(0) : dom.upper(0);
      n[0] = sgn;
      const auto uh = space.evaluate(coeffs, x);
      const Complex ev = uh.value - reference.value(x);
      const Complex eg = uh.gradient[0] - reference.gradient(x)[0];
      const Complex es = (sgn * uh.gradient[0] - ik * uh.value) -
                         impedance_residual(reference, x, n, k);
      p.bmass += k * k * std::norm(ev);
      p.bgrad += std::norm(eg);
      p.bimp += std::norm(es);
    }
  } else {
    const double hx = space.h(0), hy = space.h(1);
    for (int j = 0; j < space.cells(1); ++j) {
      for (int i = 0; i < space.cells(0); ++i) {
        for (int qy = 0; qy < order; ++qy) {
          for (int qx = 0; qx < order; ++qx) {
            const double tx = 0.5 * (g.nodes[qx] + 1.0);
            const double ty = 0.5 * (g.nodes[qy] + 1.0);
            const double wq = 0.25 * g.weights[qx] * g.weights[qy] * hx * hy;
            Eigen::VectorXd x(2);
            x[0] = dom.lower(0) + (i + tx) * hx;
            x[1] = dom.lower(1) + (j + ty) * hy;
            const auto uh = space.evaluate(coeffs, x);
            const Complex ev = uh.value - reference.value(x);
            const Eigen::VectorXcd eg = uh.gradient - reference.gradient(x);
            const Complex eL = (-uh.laplacian - k * k * uh.value) -
                               helmholtz_op(reference, x, k);
            p.grad += eg.squaredNorm() * wq;
            p.mass += k * k * std::norm(ev) * wq;
            p.residual += std::norm(eL) * wq;
            l2 += std::norm(ev) * wq;
            h1 += (std::norm(ev) + eg.squaredNorm()) * wq;
          }
        }
      }
    }
    const Complex ik(0.0, k);
    for_each_boundary_point(space, order,
                            [&](int ci, int cj, const EdgeQuadPoint& pt) {
      (void)ci;
      (void)cj;
      Eigen::VectorXd x(2), n(2);
      x = pt.x;
      n = pt.n;
      const auto uh = space.evaluate(coeffs, x);
      const Complex ev = uh.value - reference.value(x);
      const Eigen::VectorXcd eg = uh.gradient - reference.gradient(x);
      const Complex dn_h = uh.gradient[0] * n[0] + uh.gradient[1] * n[1];
      const Complex es =
          (dn_h - ik * uh.value) - impedance_residual(reference, x, n, k);
      p.bmass += k * k * std::norm(ev) * pt.weight;
      p.bgrad += eg.squaredNorm() * pt.weight;
      p.bimp += std::norm(es) * pt.weight;
    });
  }

  out.v_norm_error = std::sqrt(p.total(false, params.L));
  out.l2_error = std::sqrt(l2);
  out.h1_error = std::sqrt(h1);
  return out;
}

FieldGrid sample_solution(const FemSpace& space, const Eigen::VectorXcd& coeffs,
                          int n_per_axis) {
  FieldGrid grid = make_grid(space.domain(), n_per_axis);
  for (int i = 0; i < grid.size(); ++i) {
    grid.values[i] = space.evaluate(coeffs, grid.point(i)).value;
  }
  return grid;
}

}  // namespace hvp
