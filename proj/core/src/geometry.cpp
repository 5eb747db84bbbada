#include "hvp/geometry.hpp"

#include <cmath>

namespace hvp {

Domain::Domain(int dim, std::array<double, 3> lo, std::array<double, 3> hi)
    : dim_(dim), lo_(lo), hi_(hi) {
  for (int a = 0; a < dim_; ++a) {
    if (!(lo_[a] < hi_[a])) {
      throw InvalidParams("Domain requires lo < hi on every axis");
    }
  }
  origin_ = center();
}

Domain Domain::interval(double lo, double hi) {
  return Domain(1, {lo, 0, 0}, {hi, 0, 0});
}

Domain Domain::rectangle(std::array<double, 2> x, std::array<double, 2> y) {
  return Domain(2, {x[0], y[0], 0}, {x[1], y[1], 0});
}

Domain Domain::box(std::array<double, 2> x, std::array<double, 2> y,
                   std::array<double, 2> z) {
  return Domain(3, {x[0], y[0], z[0]}, {x[1], y[1], z[1]});
}

Domain Domain::with_origin(const Eigen::VectorXd& origin) const {
  if (origin.size() != dim_) {
    throw InvalidParams("origin dimension mismatch");
  }
  Domain d = *this;
  for (int a = 0; a < dim_; ++a) {
    if (!(lo_[a] < origin[a] && origin[a] < hi_[a])) {
      throw InvalidParams("origin must lie strictly inside the domain");
    }
  }
  d.origin_ = origin;
  return d;
}

Eigen::VectorXd Domain::center() const {
  Eigen::VectorXd c(dim_);
  for (int a = 0; a < dim_; ++a) c[a] = 0.5 * (lo_[a] + hi_[a]);
  return c;
}

double Domain::measure() const {
  double m = 1.0;
  for (int a = 0; a < dim_; ++a) m *= extent(a);
  return m;
}

double Domain::boundary_measure() const {
  if (dim_ == 1) return 2.0;
  if (dim_ == 2) return 2.0 * (extent(0) + extent(1));
  const double a = extent(0), b = extent(1), c = extent(2);
  return 2.0 * (a * b + b * c + a * c);
}

double Domain::diameter() const {
  double s = 0.0;
  for (int a = 0; a < dim_; ++a) s += extent(a) * extent(a);
  return std::sqrt(s);
}

double Domain::star_shape_constant() const {
  double l0 = std::numeric_limits<double>::infinity();
  for (int a = 0; a < dim_; ++a) {
    l0 = std::min(l0, hi_[a] - origin_[a]);
    l0 = std::min(l0, origin_[a] - lo_[a]);
  }
  if (!(l0 > 0.0)) {
    throw NonStarShaped("multiplier centre is not strictly inside the domain");
  }
  return l0;
}

bool Domain::contains(const Eigen::VectorXd& x) const {
  for (int a = 0; a < dim_; ++a) {
    if (x[a] < lo_[a] || x[a] > hi_[a]) return false;
  }
  return true;
}

}  // namespace hvp
