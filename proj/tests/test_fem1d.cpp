#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <hvp/fem.hpp>
#include <hvp/fem1d.hpp>
#include <random>

using namespace hvp;

namespace {

EnergyParams params_1d(double k, double gamma1, double gamma2) {
  EnergyParams p = select_parameters(1, 1.0, 0.5);
  p.k = k;
  p.gamma1 = gamma1;
  p.gamma2 = gamma2;
  return p;
}

Eigen::VectorXcd random_coeffs(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  auto u01 = [&rng] { return (rng() >> 11) * 0x1.0p-53 - 0.5; };
  Eigen::VectorXcd x(n);
  for (int i = 0; i < n; ++i) x[i] = Complex(u01(), u01());
  return x;
}

}  // namespace

TEST_CASE("dof counting: 4 elements, 5 nodes x 3") {
  const auto sp = build_space(Domain::interval(0, 1), 0.25,
                              Element::quintic_hermite_1d);
  CHECK(sp.dofs() == 15);
  CHECK_THROWS_AS(
      build_space(Domain::interval(0, 1), 0.3, Element::quintic_hermite_1d),
      IncompatibleMesh);
}

TEST_CASE("quintic Hermite reproduces a global quintic exactly") {
  // u = x^5 - 2x^4 + 0.5x^2 + 3i x^3
  std::vector<fields::Monomial> terms = {{{1.0, 0.0}, {5}},
                                         {{-2.0, 0.0}, {4}},
                                         {{0.5, 0.0}, {2}},
                                         {{0.0, 3.0}, {3}}};
  const auto u = fields::polynomial(terms);
  const auto sp = build_space(Domain::interval(0, 1), 0.25,
                              Element::quintic_hermite_1d);
  const Eigen::VectorXcd c = sp.interpolate(u);
  for (double xv : {0.01, 0.13, 0.49, 0.77, 0.999}) {
    Eigen::VectorXd x(1);
    x[0] = xv;
    const auto e = sp.evaluate(c, x);
    CHECK(std::abs(e.value - u.value(x)) < 1e-11);
    CHECK(std::abs(e.gradient[0] - u.gradient(x)[0]) < 1e-10);
    CHECK(std::abs(e.laplacian - u.laplacian(x)) < 1e-9);
  }
}

TEST_CASE("partition of unity of the value shapes") {
  const auto sp = build_space(Domain::interval(0, 1), 0.2,
                              Element::quintic_hermite_1d);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(sp.dofs());
  for (int i = 0; i < sp.dofs(); i += 3) c[i] = 1.0;
  for (double xv : {0.05, 0.33, 0.6, 0.94}) {
    Eigen::VectorXd x(1);
    x[0] = xv;
    CHECK(std::abs(sp.evaluate(c, x).value - 1.0) < 1e-13);
  }
}

TEST_CASE("zero forcing gives the zero field") {
  const auto sp = build_space(Domain::interval(0, 1), 0.125,
                              Element::quintic_hermite_1d);
  const auto sys = assemble(sp, params_1d(M_PI, 39.5, 5.7),
                            fields::constant(0.0), {});
  CHECK(sys.rhs.norm() == 0.0);
  CHECK(solve(sys).norm() == 0.0);
}

TEST_CASE("energy-mode matrix is Hermitian to the bit level") {
  const auto sp = build_space(Domain::interval(0, 1), 0.125,
                              Element::quintic_hermite_1d);
  const auto sys =
      assemble(sp, params_1d(10.0, 39.5, 5.7), fields::constant(1.0), {});
  const Eigen::MatrixXcd M = sys.matrix;
  double maxv = M.cwiseAbs().maxCoeff();
  CHECK((M - M.adjoint()).cwiseAbs().maxCoeff() < 1e-12 * maxv);
}

TEST_CASE("rhs entries for f = 1, gamma1 = 0 are shape-function moments") {
  // one element: value-dof moments of the quintic Hermite basis on [0,1]
  const auto sp =
      build_space(Domain::interval(0, 1), 1.0, Element::quintic_hermite_1d);
  EnergyParams p = params_1d(1.0, 0.0, 1.0);
  const auto sys = assemble(sp, p, fields::constant(1.0), {});
  // int_0^1 N dx for dofs (v,d1,d2) at node 0: 1/2, 1/10 h, 1/120 h^2
  CHECK(sys.rhs[0].real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sys.rhs[1].real() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(sys.rhs[2].real() == doctest::Approx(1.0 / 120.0).epsilon(1e-12));
  CHECK(sys.rhs[3].real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sys.rhs[4].real() == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(sys.rhs[5].real() == doctest::Approx(1.0 / 120.0).epsilon(1e-12));
}

TEST_CASE("penalty mode lambda/h = 2 gamma2 gives identical matrices") {
  const auto sp = build_space(Domain::interval(0, 1), 0.125,
                              Element::quintic_hermite_1d);
  EnergyParams p = params_1d(4.0, 10.0, 3.0);
  AssembleOptions energy_mode;
  const auto a = assemble(sp, p, fields::constant(1.0), energy_mode);
  AssembleOptions penalty_mode;
  penalty_mode.penalty_mode = PenaltyMode::lambda_over_h;
  penalty_mode.lambda = 2.0 * p.gamma2 * 0.125;  // lambda/h == 2 gamma2
  const auto b = assemble(sp, p, fields::constant(1.0), penalty_mode);
  const Eigen::MatrixXcd da = Eigen::MatrixXcd(a.matrix) - Eigen::MatrixXcd(b.matrix);
  CHECK(da.cwiseAbs().maxCoeff() <
        1e-13 * Eigen::MatrixXcd(a.matrix).cwiseAbs().maxCoeff());
}

TEST_CASE("galerkin formulation converges to the analytic oracle") {
  const double k = M_PI;
  const auto oracle = exact_1d_constant_forcing(k, 1.0);
  EnergyParams p = params_1d(k, 39.5, 5.7);
  AssembleOptions opts;
  opts.formulation = Formulation::galerkin;
  double prev = 0.0;
  for (int n : {8, 16, 32}) {
    const auto sp = build_space(Domain::interval(0, 1), 1.0 / n,
                                Element::quintic_hermite_1d);
    const auto sys = assemble(sp, p, fields::constant(1.0), opts);
    const auto x = solve(sys);
    const auto err = error_norms(x, oracle, sp, p);
    if (n > 8) CHECK(prev / err.v_norm_error > 12.0);  // order ~4
    prev = err.v_norm_error;
  }
  CHECK(prev < 2e-8);
}

TEST_CASE("energy formulation carries the impedance consistency bias") {
  // The Hermitian energy system's minimiser differs from the PDE solution:
  // its Euler-Lagrange residual at the oracle equals ik u(0) at the boundary
  // value dofs, and the V-error plateaus under refinement.
  const double k = M_PI;
  const auto oracle = exact_1d_constant_forcing(k, 1.0);
  EnergyParams p = params_1d(k, 39.5, 5.7);
  const int n = 64;
  const auto sp = build_space(Domain::interval(0, 1), 1.0 / n,
                              Element::quintic_hermite_1d);
  const auto sys = assemble(sp, p, fields::constant(1.0), {});
  const Eigen::VectorXcd xo = sp.interpolate(oracle);
  const Eigen::VectorXcd res = sys.matrix * xo - sys.rhs;

  Eigen::VectorXd x0(1);
  x0[0] = 0.0;
  const Complex predicted = Complex(0, k) * oracle.value(x0);
  CHECK(std::abs(res[0] - predicted) < 1e-6);
  CHECK(std::abs(res[3 * n] - predicted) < 1e-6);  // same value at both ends

  // biased solve: error does not go below the consistency floor
  const auto err = error_norms(solve(sys), oracle, sp, p);
  CHECK(err.v_norm_error > 1e-4);

  // the galerkin repair removes the bias on the same mesh
  AssembleOptions g;
  g.formulation = Formulation::galerkin;
  const auto err_g =
      error_norms(solve(assemble(sp, p, fields::constant(1.0), g)), oracle, sp, p);
  CHECK(err_g.v_norm_error < 1e-7);
}

TEST_CASE("discrete minimality of the energy-mode solution") {
  const double k = 2.0;
  EnergyParams p = params_1d(k, 20.0, 4.0);
  const auto sp = build_space(Domain::interval(0, 1), 0.125,
                              Element::quintic_hermite_1d);
  const auto sys = assemble(sp, p, fields::constant(1.0), {});
  const Eigen::VectorXcd xstar = solve(sys);
  const Eigen::MatrixXcd A = sys.matrix;
  auto discrete_energy = [&](const Eigen::VectorXcd& x) {
    return 0.5 * (x.adjoint() * A * x)(0).real() -
           (x.adjoint() * sys.rhs)(0).real();
  };
  const double f0 = discrete_energy(xstar);
  for (unsigned seed : {1u, 2u, 3u, 4u}) {
    const Eigen::VectorXcd w = random_coeffs(sp.dofs(), seed);
    for (double t : {1e-3, -1e-3}) {
      CHECK(discrete_energy(xstar + t * w) >= f0 - 1e-12 * std::abs(f0));
    }
  }
}

TEST_CASE("manufactured generalised data reproduces an on-shell wave") {
  // u* = e^{ikx}: zeta = 0, eta nonzero at the left endpoint
  const double k = 3.0;
  const auto ustar = fields::plane_wave(k, Eigen::VectorXd::Ones(1));
  const auto data = manufactured_generalised(ustar, k);
  EnergyParams p = params_1d(k, 39.5, 5.7);
  AssembleOptions opts;
  opts.formulation = Formulation::galerkin;
  opts.eta = data.eta;
  const auto sp = build_space(Domain::interval(0, 1), 1.0 / 32,
                              Element::quintic_hermite_1d);
  const auto sys = assemble(sp, p, fields::constant(0.0), opts);
  const auto x = solve(sys);
  const auto err = error_norms(x, ustar, sp, p);
  CHECK(err.v_norm_error < 1e-6);
  CHECK(err.l2_error < 1e-8);
}

TEST_CASE("galerkin orthogonality against a fine discrete reference") {
  const double k = M_PI;
  EnergyParams p = params_1d(k, 39.5, 5.7);
  AssembleOptions g;
  g.formulation = Formulation::galerkin;
  const auto oracle = exact_1d_constant_forcing(k, 1.0);
  const auto sp = build_space(Domain::interval(0, 1), 1.0 / 16,
                              Element::quintic_hermite_1d);
  const auto sys = assemble(sp, p, fields::constant(1.0), g);
  const auto xh = solve(sys);
  // A_cons(u - u_h, v_h) = 0 discretely: residual of the oracle interpolant
  // equals A (xo - xh) up to interpolation error
  const Eigen::VectorXcd xo = sp.interpolate(oracle);
  const Eigen::VectorXcd r = sys.matrix * (xo - xh);
  // scaled by the matrix norm and solution scale
  const double scale =
      Eigen::MatrixXcd(sys.matrix).cwiseAbs().maxCoeff() * xo.cwiseAbs().maxCoeff();
  CHECK(r.cwiseAbs().maxCoeff() / scale < 1e-8);
}

TEST_CASE("energy monotonicity under nested refinement") {
  const double k = M_PI;
  EnergyParams p = params_1d(k, 39.5, 5.7);
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {4, 8, 16, 32}) {
    const auto sp = build_space(Domain::interval(0, 1), 1.0 / n,
                                Element::quintic_hermite_1d);
    const auto sys = assemble(sp, p, fields::constant(1.0), {});
    const Eigen::VectorXcd x = solve(sys);
    const double F = 0.5 * (x.adjoint() * sys.matrix * x)(0).real() -
                     (x.adjoint() * sys.rhs)(0).real();
    // nestedness gives F_fine <= F_coarse; slack covers the quadratic-form
    // evaluation roundoff on the gamma1 h^-4 scaled matrix
    CHECK(F <= prev + 1e-8 * std::abs(prev));
    prev = F;
  }
}

TEST_CASE("long double kernel matches the double kernel on coarse meshes") {
  const double k = 2.0;
  auto fd = [](double) { return Complex(1.0, 0.0); };
  auto fl = [](long double) { return std::complex<long double>(1.0, 0.0); };
  const auto sd = fem1d::assemble<double>(8, 0, 1, k, 10.0, 6.0, true, fd, 8);
  const auto sl =
      fem1d::assemble<long double>(8, 0, 1, k, 10.0, 6.0, true, fl, 8);
  const auto xd = fem1d::solve<double>(sd);
  const auto xl = fem1d::solve<long double>(sl);
  for (int i = 0; i < xd.size(); ++i) {
    // agreement limited by the double-precision solve accuracy
    CHECK(std::abs(xd[i] - Complex(static_cast<double>(xl[i].real()),
                                   static_cast<double>(xl[i].imag()))) < 1e-9);
  }
}
