#include "hvp/field.hpp"

#include <cmath>
#include <random>

namespace hvp {

Complex helmholtz_op(const ClosedFormField& u, const Eigen::VectorXd& x,
                     double k) {
  return -u.laplacian(x) - k * k * u.value(x);
}

Complex normal_derivative(const ClosedFormField& u, const Eigen::VectorXd& x,
                          const Eigen::VectorXd& n) {
  const Eigen::VectorXcd g = u.gradient(x);
  Complex s = 0.0;
  for (int a = 0; a < n.size(); ++a) s += g[a] * n[a];
  return s;
}

Complex impedance_residual(const ClosedFormField& u, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& n, double k) {
  return normal_derivative(u, x, n) - Complex(0.0, k) * u.value(x);
}

double derivative_check(const ClosedFormField& u, const Domain& domain,
                        int n_points, unsigned seed, double step_rel) {
  std::mt19937_64 rng(seed);
  const double h = step_rel * domain.diameter();
  double worst = 0.0;
  const int dim = domain.dim();
  for (int p = 0; p < n_points; ++p) {
    Eigen::VectorXd x(dim);
    for (int a = 0; a < dim; ++a) {
      // keep 2h clear of the boundary so the FD stencil stays inside
      const double u01 = (rng() >> 11) * 0x1.0p-53;
      x[a] = domain.lower(a) + 2 * h +
             u01 * (domain.extent(a) - 4 * h);
    }
    const Eigen::VectorXcd g = u.gradient(x);
    const Complex lap = u.laplacian(x);
    Complex fd_lap = 0.0;
    const Complex ux = u.value(x);
    double scale = std::max(1.0, std::abs(ux));
    for (int a = 0; a < dim; ++a) {
      Eigen::VectorXd xp = x, xm = x;
      xp[a] += h;
      xm[a] -= h;
      const Complex up = u.value(xp), um = u.value(xm);
      const Complex fd_g = (up - um) / (2 * h);
      fd_lap += (up - 2.0 * ux + um) / (h * h);
      scale = std::max(scale, std::abs(g[a]));
      worst = std::max(worst, std::abs(fd_g - g[a]) / scale);
    }
    const double lap_scale = std::max(scale, std::abs(lap));
    worst = std::max(worst, std::abs(fd_lap - lap) / lap_scale);
  }
  return worst;
}

namespace fields {

ClosedFormField constant(Complex c) {
  ClosedFormField f;
  f.value = [c](const Eigen::VectorXd&) { return c; };
  f.gradient = [](const Eigen::VectorXd& x) {
    return Eigen::VectorXcd::Zero(x.size()).eval();
  };
  f.laplacian = [](const Eigen::VectorXd&) { return Complex(0.0); };
  return f;
}

ClosedFormField coordinate(int axis) {
  ClosedFormField f;
  f.value = [axis](const Eigen::VectorXd& x) { return Complex(x[axis]); };
  f.gradient = [axis](const Eigen::VectorXd& x) {
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(x.size());
    g[axis] = 1.0;
    return g;
  };
  f.laplacian = [](const Eigen::VectorXd&) { return Complex(0.0); };
  return f;
}

ClosedFormField polynomial(std::vector<Monomial> terms) {
  auto term_value = [](const Monomial& m, const Eigen::VectorXd& x) {
    Complex v = m.coeff;
    for (size_t a = 0; a < m.exps.size(); ++a) {
      v *= std::pow(x[static_cast<int>(a)], m.exps[a]);
    }
    return v;
  };
  ClosedFormField f;
  f.value = [terms, term_value](const Eigen::VectorXd& x) {
    Complex v = 0.0;
    for (const auto& m : terms) v += term_value(m, x);
    return v;
  };
  f.gradient = [terms](const Eigen::VectorXd& x) {
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(x.size());
    for (const auto& m : terms) {
      for (int a = 0; a < x.size(); ++a) {
        const int e = a < static_cast<int>(m.exps.size()) ? m.exps[a] : 0;
        if (e == 0) continue;
        Complex v = m.coeff * static_cast<double>(e);
        for (int b = 0; b < x.size(); ++b) {
          const int eb = b < static_cast<int>(m.exps.size()) ? m.exps[b] : 0;
          v *= std::pow(x[b], b == a ? eb - 1 : eb);
        }
        g[a] += v;
      }
    }
    return g;
  };
  f.laplacian = [terms](const Eigen::VectorXd& x) {
    Complex lap = 0.0;
    for (const auto& m : terms) {
      for (int a = 0; a < x.size(); ++a) {
        const int e = a < static_cast<int>(m.exps.size()) ? m.exps[a] : 0;
        if (e < 2) continue;
        Complex v = m.coeff * static_cast<double>(e * (e - 1));
        for (int b = 0; b < x.size(); ++b) {
          const int eb = b < static_cast<int>(m.exps.size()) ? m.exps[b] : 0;
          v *= std::pow(x[b], b == a ? eb - 2 : eb);
        }
        lap += v;
      }
    }
    return lap;
  };
  return f;
}

ClosedFormField plane_wave(double k, Eigen::VectorXd direction) {
  const Eigen::VectorXd d = direction.normalized();
  ClosedFormField f;
  f.value = [k, d](const Eigen::VectorXd& x) {
    return std::exp(Complex(0.0, k * d.dot(x)));
  };
  f.gradient = [k, d](const Eigen::VectorXd& x) {
    const Complex v = std::exp(Complex(0.0, k * d.dot(x)));
    Eigen::VectorXcd g(x.size());
    for (int a = 0; a < x.size(); ++a) g[a] = Complex(0.0, k) * d[a] * v;
    return g;
  };
  f.laplacian = [k, d](const Eigen::VectorXd& x) {
    return -k * k * std::exp(Complex(0.0, k * d.dot(x)));
  };
  return f;
}

ClosedFormField gaussian_bump(Eigen::VectorXd center, double eps,
                              Complex amplitude) {
  ClosedFormField f;
  f.value = [center, eps, amplitude](const Eigen::VectorXd& x) {
    return amplitude * std::exp(-(x - center).squaredNorm() / eps);
  };
  f.gradient = [center, eps, amplitude](const Eigen::VectorXd& x) {
    const Complex v = amplitude * std::exp(-(x - center).squaredNorm() / eps);
    Eigen::VectorXcd g(x.size());
    for (int a = 0; a < x.size(); ++a) {
      g[a] = v * (-2.0 * (x[a] - center[a]) / eps);
    }
    return g;
  };
  f.laplacian = [center, eps, amplitude](const Eigen::VectorXd& x) {
    const double r2 = (x - center).squaredNorm();
    const Complex v = amplitude * std::exp(-r2 / eps);
    const double dim = static_cast<double>(x.size());
    return v * (4.0 * r2 / (eps * eps) - 2.0 * dim / eps);
  };
  return f;
}

ClosedFormField scale(const ClosedFormField& u, Complex factor) {
  ClosedFormField f;
  f.value = [u, factor](const Eigen::VectorXd& x) { return factor * u.value(x); };
  f.gradient = [u, factor](const Eigen::VectorXd& x) {
    return (factor * u.gradient(x)).eval();
  };
  f.laplacian = [u, factor](const Eigen::VectorXd& x) {
    return factor * u.laplacian(x);
  };
  return f;
}

ClosedFormField sum(const ClosedFormField& a, const ClosedFormField& b) {
  ClosedFormField f;
  f.value = [a, b](const Eigen::VectorXd& x) { return a.value(x) + b.value(x); };
  f.gradient = [a, b](const Eigen::VectorXd& x) {
    return (a.gradient(x) + b.gradient(x)).eval();
  };
  f.laplacian = [a, b](const Eigen::VectorXd& x) {
    return a.laplacian(x) + b.laplacian(x);
  };
  return f;
}

}  // namespace fields

}  // namespace hvp
