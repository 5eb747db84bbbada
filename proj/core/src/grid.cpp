#include "hvp/grid.hpp"

#include <cinttypes>
#include <cstdio>

#include "hvp/errors.hpp"

namespace hvp {

int FieldGrid::size() const {
  int n = 1;
  for (int s : shape) n *= s;
  return n;
}

Eigen::VectorXd FieldGrid::point(int flat_index) const {
  Eigen::VectorXd p(dim());
  int rem = flat_index;
  for (int a = 0; a < dim(); ++a) {
    p[a] = axes[a][rem % shape[a]];
    rem /= shape[a];
  }
  return p;
}

void FieldGrid::write_csv(const std::string& path) const {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot open " + path);
  if (dim() == 1) {
    std::fprintf(fp, "x,re_u,im_u\n");
  } else {
    std::fprintf(fp, "x,y,re_u,im_u\n");
  }
  for (int i = 0; i < size(); ++i) {
    const Eigen::VectorXd p = point(i);
    for (int a = 0; a < dim(); ++a) std::fprintf(fp, "%.17g,", p[a]);
    std::fprintf(fp, "%.17g,%.17g\n", values[i].real(), values[i].imag());
  }
  std::fclose(fp);
}

FieldGrid make_grid(const Domain& domain, int n_per_axis) {
  if (n_per_axis < 2) throw InvalidParams("grid needs >= 2 points per axis");
  FieldGrid g;
  for (int a = 0; a < domain.dim(); ++a) {
    g.shape.push_back(n_per_axis);
    g.axes.push_back(Eigen::VectorXd::LinSpaced(n_per_axis, domain.lower(a),
                                                domain.upper(a)));
  }
  g.values = Eigen::VectorXcd::Zero(g.size());
  return g;
}

}  // namespace hvp
