#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <hvp/identities.hpp>

using namespace hvp;

namespace {

Domain centred_square() {
  return Domain::rectangle({-0.5, 0.5}, {-0.5, 0.5});
}

}  // namespace

TEST_CASE("rellich: constant field term values") {
  // u = c: mixed 0, bulk -nu k^2 |c|^2 |Omega|, boundary cancels it exactly
  const auto u = fields::constant(Complex(2.0, -1.0));
  const double k = 3.0;
  const auto r = rellich_residual(u, k, Domain::unit_square(), 8);
  const double c2 = 5.0;
  CHECK(r.bulk_terms.at("mixed") == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(r.bulk_terms.at("bulk") == doctest::Approx(-2 * k * k * c2));
  CHECK(r.boundary_terms.at("boundary") == doctest::Approx(2 * k * k * c2));
  CHECK(r.relative_residual < 1e-13);
}

TEST_CASE("rellich: u = x1 on the centred unit square, k = 1") {
  // frozen by hand: mixed -1/6, bulk -1/6, boundary +1/3
  const auto u = fields::coordinate(0);
  const auto r = rellich_residual(u, 1.0, centred_square(), 10);
  CHECK(r.bulk_terms.at("mixed") == doctest::Approx(-1.0 / 6.0).epsilon(1e-12));
  CHECK(r.bulk_terms.at("bulk") == doctest::Approx(-1.0 / 6.0).epsilon(1e-12));
  CHECK(r.boundary_terms.at("boundary") ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(r.relative_residual < 1e-12);
}

TEST_CASE("rellich: plane waves up to k = 10 at order >= 20") {
  for (double k : {1.0, 5.0, 10.0}) {
    for (double angle : {0.0, 0.3, 2.1}) {
      Eigen::VectorXd d(2);
      d << std::cos(angle), std::sin(angle);
      const auto u = fields::plane_wave(k, d);
      const auto r = rellich_residual(u, k, Domain::unit_square(), 24);
      INFO("k=" << k << " angle=" << angle);
      CHECK(std::abs(r.bulk_terms.at("mixed")) < 1e-10);
      CHECK(r.relative_residual < 1e-10);
    }
  }
}

TEST_CASE("morawetz M0: trivial and constant cases") {
  const auto zero = fields::constant(0.0);
  auto r = low_order_morawetz_residual(zero, 1.0, 1.0, Domain::unit_square(), 6);
  CHECK(r.residual == doctest::Approx(0.0));

  // u = 1, k = 1, beta = 1 on the unit square:
  // bulk 0 (purely imaginary), boundary mass -8, boundary flux +8
  const auto one = fields::constant(1.0);
  r = low_order_morawetz_residual(one, 1.0, 1.0, Domain::unit_square(), 6);
  CHECK(r.bulk_terms.at("multiplier") == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(r.boundary_terms.at("boundary_mass") == doctest::Approx(-8.0));
  CHECK(r.boundary_terms.at("boundary_flux") == doctest::Approx(8.0));
  CHECK(r.relative_residual < 1e-14);
}

TEST_CASE("morawetz M0: plane wave k=5 beta=2 at order 24") {
  Eigen::VectorXd d(2);
  d << std::cos(0.7), std::sin(0.7);
  const auto u = fields::plane_wave(5.0, d);
  const auto r =
      low_order_morawetz_residual(u, 5.0, 2.0, Domain::unit_square(), 24);
  CHECK(r.relative_residual < 1e-10);
}

TEST_CASE("beta linearity of the M0 identity terms") {
  Eigen::VectorXd d(2);
  d << 0.6, 0.8;
  const auto u = fields::plane_wave(2.0, d);
  const auto r1 =
      low_order_morawetz_residual(u, 2.0, 1.0, Domain::unit_square(), 16);
  const auto r3 =
      low_order_morawetz_residual(u, 2.0, 3.0, Domain::unit_square(), 16);
  CHECK(r3.bulk_terms.at("multiplier") ==
        doctest::Approx(3.0 * r1.bulk_terms.at("multiplier")));
  CHECK(r3.boundary_terms.at("boundary_mass") ==
        doctest::Approx(3.0 * r1.boundary_terms.at("boundary_mass")));
  CHECK(r3.relative_residual < 1e-12);
}

TEST_CASE("rellich residual invariant under unimodular scaling") {
  Eigen::VectorXd c(2);
  c << 0.35, 0.6;
  const auto u = fields::gaussian_bump(c, 0.09, {1.0, 0.25});
  const auto v = fields::scale(u, std::exp(Complex(0.0, 1.234)));
  const auto ru = rellich_residual(u, 4.0, Domain::unit_square(), 20);
  const auto rv = rellich_residual(v, 4.0, Domain::unit_square(), 20);
  CHECK(ru.bulk_terms.at("mixed") ==
        doctest::Approx(rv.bulk_terms.at("mixed")).epsilon(1e-12));
  CHECK(ru.boundary_terms.at("boundary") ==
        doctest::Approx(rv.boundary_terms.at("boundary")).epsilon(1e-12));
}

TEST_CASE("identities hold in 1D (endpoint boundary convention)") {
  const auto u = fields::plane_wave(3.0, Eigen::VectorXd::Ones(1));
  const auto r = rellich_residual(u, 3.0, Domain::interval(0, 1), 20);
  CHECK(r.relative_residual < 1e-12);
  const auto m =
      low_order_morawetz_residual(u, 3.0, 1.5, Domain::interval(0, 1), 20);
  CHECK(m.relative_residual < 1e-12);
}

TEST_CASE("residuals shrink as the quadrature order grows") {
  Eigen::VectorXd c(2);
  c << 0.42, 0.58;
  const auto u = fields::gaussian_bump(c, 0.04, {1.0, 0.5});
  double prev = std::numeric_limits<double>::infinity();
  for (int order : {6, 12, 24}) {
    const auto r = rellich_residual(u, 5.0, Domain::unit_square(), order);
    CHECK(r.relative_residual < prev);
    prev = r.relative_residual;
  }
  CHECK(prev < 1e-10);
}

TEST_CASE("off-centre multiplier origin still closes the identity") {
  Eigen::VectorXd o(2);
  o << 0.3, 0.6;
  const Domain dom = Domain::unit_square().with_origin(o);
  Eigen::VectorXd d(2);
  d << 1.0, 0.0;
  const auto u = fields::plane_wave(4.0, d);
  const auto r = rellich_residual(u, 4.0, dom, 24);
  CHECK(r.relative_residual < 1e-10);
}
