#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <hvp/energy.hpp>
#include <hvp/objective.hpp>
#include <random>

using namespace hvp;

namespace {

// flatten every trainable parameter for finite-difference probing
std::vector<double*> param_pointers(PlaneWaveModel& m) {
  std::vector<double*> out;
  auto push = [&out](Eigen::MatrixXd& mat) {
    for (Eigen::Index i = 0; i < mat.size(); ++i) out.push_back(mat.data() + i);
  };
  auto pushv = [&out](Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v.data() + i);
  };
  push(m.W);
  push(m.eta.G1);
  pushv(m.eta.c1);
  push(m.eta.G2);
  pushv(m.eta.c2);
  push(m.eta.M1);
  pushv(m.eta.b1);
  push(m.eta.M2);
  pushv(m.eta.b2);
  return out;
}

std::vector<double> grad_flat(const ParameterGradient& g) {
  std::vector<double> out;
  auto push = [&out](const Eigen::MatrixXd& mat) {
    for (Eigen::Index i = 0; i < mat.size(); ++i) out.push_back(mat.data()[i]);
  };
  auto pushv = [&out](const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  };
  push(g.W);
  push(g.G1);
  pushv(g.c1);
  push(g.G2);
  pushv(g.c2);
  push(g.M1);
  pushv(g.b1);
  push(g.M2);
  pushv(g.b2);
  return out;
}

PlaneWaveModel tiny_model(unsigned seed) {
  const auto f = build_features(2, 2, 3.0, 0.2);
  PlaneWaveModel m = init_model(f, 4, 4, 0.05, seed, /*zero_mixer=*/false);
  std::mt19937_64 rng(seed + 100);
  auto u01 = [&rng] { return (rng() >> 11) * 0x1.0p-53 - 0.5; };
  for (Eigen::Index i = 0; i < m.W.size(); ++i) m.W.data()[i] = 0.4 * u01();
  for (Eigen::Index i = 0; i < m.eta.b1.size(); ++i) m.eta.b1[i] = 0.1 * u01();
  for (Eigen::Index i = 0; i < m.eta.c1.size(); ++i) m.eta.c1[i] = 0.1 * u01();
  return m;
}

}  // namespace

TEST_CASE("zero model: J = gamma1 |Omega| mean |f|^2") {
  const auto feats = build_features(4, 2, 2.0, 0.1);
  PlaneWaveModel m = init_model(feats, 4, 4, 0.05, 3);  // zero W, zero mixer
  const Domain dom = Domain::unit_square();
  std::mt19937_64 rng(1);
  const SampleSet s = draw_samples(dom, 400, 100, rng);
  const auto f = fields::constant({2.0, -1.0});
  const ObjectiveWeights w{3.0, 7.0};
  const auto t = mc_objective(m, f, w, dom, s);
  CHECK(t.interior_residual == doctest::Approx(3.0 * 5.0).epsilon(1e-12));
  CHECK(t.boundary_residual == doctest::Approx(0.0));
  CHECK(t.physical == doctest::Approx(0.0));
  CHECK(t.source == doctest::Approx(0.0));
}

TEST_CASE("on-shell plane wave: interior residual is exactly zero") {
  const double k = 5.0;
  const auto feats = build_features(8, 2, k, 0.1);
  PlaneWaveModel m = init_model(feats, 4, 4, 0.05, 3);
  // u = e^{ik d_0 . x}: cos -> u_R, sin -> u_I on the on-shell ring
  m.W(0, 0) = 1.0;
  m.W(1, 1) = 1.0;
  const Domain dom = Domain::unit_square();
  std::mt19937_64 rng(2);
  const SampleSet s = draw_samples(dom, 500, 200, rng);
  const auto t = mc_objective(m, fields::constant(0.0), {1.0, 1.0}, dom, s);
  CHECK(t.interior_residual < 1e-22);
  CHECK(t.source == doctest::Approx(0.0));
}

TEST_CASE("objective invariant under sample permutation") {
  PlaneWaveModel m = tiny_model(4);
  const Domain dom = Domain::unit_square();
  std::mt19937_64 rng(9);
  SampleSet s = draw_samples(dom, 1000, 300, rng);
  Eigen::VectorXd c(2);
  c << 0.5, 0.5;
  const auto f = fields::gaussian_bump(c, 0.05, 2.0);
  const ObjectiveWeights w{2.0, 50.0};
  const double j1 = mc_objective(m, f, w, dom, s).total();
  // reverse the sample order
  s.interior.rowwise().reverseInPlace();
  s.boundary.rowwise().reverseInPlace();
  s.normals.rowwise().reverseInPlace();
  const double j2 = mc_objective(m, f, w, dom, s).total();
  CHECK(std::abs(j1 - j2) < 1e-12 * std::max(1.0, std::abs(j1)));
}

TEST_CASE("penalty terms are nonnegative with f = 0") {
  PlaneWaveModel m = tiny_model(5);
  const Domain dom = Domain::unit_square();
  std::mt19937_64 rng(11);
  const SampleSet s = draw_samples(dom, 800, 200, rng);
  const auto t =
      mc_objective(m, fields::constant(0.0), {1.5, 2.5}, dom, s);
  CHECK(t.interior_residual >= 0.0);
  CHECK(t.boundary_residual >= 0.0);
  CHECK(t.source == 0.0);
  CHECK(t.total() >= t.physical);
}

TEST_CASE("analytic gradient matches central finite differences") {
  PlaneWaveModel m = tiny_model(6);
  const Domain dom = Domain::unit_square();
  std::mt19937_64 rng(21);
  const SampleSet s = draw_samples(dom, 48, 16, rng);
  Eigen::VectorXd c(2);
  c << 0.4, 0.6;
  const auto f = fields::gaussian_bump(c, 0.08, {1.0, 0.7});
  const ObjectiveWeights w{2.0, 5.0};

  ParameterGradient g = ParameterGradient::zero(m);
  mc_objective_gradient(m, f, w, dom, s, g);
  const std::vector<double> ga = grad_flat(g);

  auto ptrs = param_pointers(m);
  REQUIRE(ga.size() == ptrs.size());
  const double step = 1e-6;
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < ptrs.size(); ++i) {
    const double orig = *ptrs[i];
    *ptrs[i] = orig + step;
    const double jp = mc_objective(m, f, w, dom, s).total();
    *ptrs[i] = orig - step;
    const double jm = mc_objective(m, f, w, dom, s).total();
    *ptrs[i] = orig;
    const double fd = (jp - jm) / (2.0 * step);
    num += (fd - ga[i]) * (fd - ga[i]);
    den += fd * fd;
  }
  CHECK(std::sqrt(num / std::max(den, 1e-300)) < 1e-5);
}

TEST_CASE("threaded evaluation is bit-identical to sequential") {
  PlaneWaveModel m = tiny_model(14);
  const Domain dom = Domain::unit_square();
  std::mt19937_64 rng(15);
  const SampleSet s = draw_samples(dom, 2048, 512, rng);
  Eigen::VectorXd c(2);
  c << 0.5, 0.5;
  const auto f = fields::gaussian_bump(c, 0.05, 2.0);
  const ObjectiveWeights w{2.0, 50.0};
  ParameterGradient g1 = ParameterGradient::zero(m);
  ParameterGradient g4 = ParameterGradient::zero(m);
  const auto t1 = mc_objective_gradient(m, f, w, dom, s, g1, 1);
  const auto t4 = mc_objective_gradient(m, f, w, dom, s, g4, 4);
  CHECK(t1.total() == t4.total());
  CHECK(t1.interior_residual == t4.interior_residual);
  CHECK((g1.W - g4.W).cwiseAbs().maxCoeff() == 0.0);
  CHECK((g1.M1 - g4.M1).cwiseAbs().maxCoeff() == 0.0);
  CHECK((g1.G2 - g4.G2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("monte-carlo estimate approaches the quadrature energy") {
  const double k = 3.0;
  const auto feats = build_features(6, 2, k, 0.2);
  PlaneWaveModel m = init_model(feats, 4, 6, 0.05, 8, false);
  std::mt19937_64 seedr(31);
  for (Eigen::Index i = 0; i < m.W.size(); ++i) {
    m.W.data()[i] = 0.3 * ((seedr() >> 11) * 0x1.0p-53 - 0.5);
  }
  const Domain dom = Domain::unit_square();
  Eigen::VectorXd c(2);
  c << 0.45, 0.55;
  const auto f = fields::gaussian_bump(c, 0.06, 1.0);
  const ObjectiveWeights w{2.0, 11.0};

  // quadrature reference via the energy module
  EnergyParams p = EnergyParams::for_domain(dom);
  p.k = k;
  p.gamma1 = w.gamma1;
  p.gamma2 = w.gamma_bnd;
  const auto iq = interior_quadrature(dom, 24, 2);
  const auto bq = boundary_quadrature(dom, 24, 2);
  const double F = weak_bc_energy(model_field(m), f, p, dom, iq, bq);

  std::mt19937_64 rng(77);
  const SampleSet s = draw_samples(dom, 60000, 20000, rng);
  const double J = mc_objective(m, f, w, dom, s).total();
  const double sigma = mc_standard_error(m, f, w, dom, s);
  CHECK(std::abs(J - F) < 5.0 * sigma);
}
