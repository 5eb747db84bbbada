#include "hvp/quadrature.hpp"

#include <cmath>
#include <vector>

namespace hvp {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw InvalidParams("gauss_legendre requires order >= 1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Legendre recurrence for P_n(x) and P_n'(x)
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

namespace {

// 1D composite points on [lo, hi]: `cells` panels, `order` points each.
void composite_1d(const GaussRule& g, double lo, double hi, int cells,
                  std::vector<double>& pts, std::vector<double>& wts) {
  const double h = (hi - lo) / cells;
  for (int c = 0; c < cells; ++c) {
    const double a = lo + c * h;
    for (int q = 0; q < g.nodes.size(); ++q) {
      pts.push_back(a + 0.5 * h * (g.nodes[q] + 1.0));
      wts.push_back(0.5 * h * g.weights[q]);
    }
  }
}

}  // namespace

InteriorQuadrature interior_quadrature(const Domain& domain, int order,
                                       int cells) {
  if (order < 1 || cells < 1) {
    throw InvalidParams("interior_quadrature requires order, cells >= 1");
  }
  const GaussRule g = gauss_legendre(order);
  const int dim = domain.dim();
  std::vector<std::vector<double>> pts(dim), wts(dim);
  for (int a = 0; a < dim; ++a) {
    composite_1d(g, domain.lower(a), domain.upper(a), cells, pts[a], wts[a]);
  }
  const int n1 = static_cast<int>(pts[0].size());
  int total = 1;
  for (int a = 0; a < dim; ++a) total *= n1;

  InteriorQuadrature Q;
  Q.points.resize(total, dim);
  Q.weights.resize(total);
  for (int idx = 0; idx < total; ++idx) {
    int rem = idx;
    double w = 1.0;
    for (int a = 0; a < dim; ++a) {
      const int i = rem % n1;
      rem /= n1;
      Q.points(idx, a) = pts[a][i];
      w *= wts[a][i];
    }
    Q.weights[idx] = w;
  }
  return Q;
}

BoundaryQuadrature boundary_quadrature(const Domain& domain, int order,
                                       int panels) {
  if (order < 1 || panels < 1) {
    throw InvalidParams("boundary_quadrature requires order, panels >= 1");
  }
  const int dim = domain.dim();
  BoundaryQuadrature B;

  if (dim == 1) {
    B.points.resize(2, 1);
    B.normals.resize(2, 1);
    B.weights.resize(2);
    B.points(0, 0) = domain.lower(0);
    B.normals(0, 0) = -1.0;
    B.points(1, 0) = domain.upper(0);
    B.normals(1, 0) = 1.0;
    B.weights.setOnes();
    return B;
  }

  const GaussRule g = gauss_legendre(order);
  std::vector<Eigen::VectorXd> rows_p, rows_n;
  std::vector<double> rows_w;

  for (int axis = 0; axis < dim; ++axis) {
    for (int side = 0; side < 2; ++side) {
      const double coord = side == 0 ? domain.lower(axis) : domain.upper(axis);
      const double sign = side == 0 ? -1.0 : 1.0;
      // tangential axes
      std::vector<int> tang;
      for (int a = 0; a < dim; ++a) {
        if (a != axis) tang.push_back(a);
      }
      std::vector<std::vector<double>> pts(tang.size()), wts(tang.size());
      for (size_t t = 0; t < tang.size(); ++t) {
        composite_1d(g, domain.lower(tang[t]), domain.upper(tang[t]), panels,
                     pts[t], wts[t]);
      }
      const int n1 = static_cast<int>(pts[0].size());
      int face_total = 1;
      for (size_t t = 0; t < tang.size(); ++t) face_total *= n1;
      for (int idx = 0; idx < face_total; ++idx) {
        Eigen::VectorXd p(dim), n(dim);
        p[axis] = coord;
        n.setZero();
        n[axis] = sign;
        int rem = idx;
        double w = 1.0;
        for (size_t t = 0; t < tang.size(); ++t) {
          const int i = rem % n1;
          rem /= n1;
          p[tang[t]] = pts[t][i];
          w *= wts[t][i];
        }
        rows_p.push_back(p);
        rows_n.push_back(n);
        rows_w.push_back(w);
      }
    }
  }

  const int total = static_cast<int>(rows_p.size());
  B.points.resize(total, dim);
  B.normals.resize(total, dim);
  B.weights.resize(total);
  for (int i = 0; i < total; ++i) {
    B.points.row(i) = rows_p[i];
    B.normals.row(i) = rows_n[i];
    B.weights[i] = rows_w[i];
  }
  return B;
}

}  // namespace hvp
