#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <hvp/config.hpp>
#include <hvp/study.hpp>
#include <nlohmann/json.hpp>

using namespace hvp;

TEST_CASE("fem-solve config round-trips identically") {
  const Json doc = Json::parse(R"({
    "domain": {"kind": "rectangle", "bounds": [[0,1],[0,1]], "origin": "center"},
    "h": 0.125, "k": 3.5, "gamma1": 2.0, "lambda": 50.0,
    "f": {"kind": "gaussian", "center": [0.5, 0.5], "epsilon": 1e-4},
    "export": "out.csv", "seed": 7, "deterministic": true, "quad_order": 8
  })");
  const FemSolveConfig cfg = parse_fem_solve(doc);
  const Json ser = to_json(cfg);
  const FemSolveConfig cfg2 = parse_fem_solve(ser);
  CHECK(ser == to_json(cfg2));
  CHECK(cfg2.h == 0.125);
  CHECK(cfg2.lambda.has_value());
  CHECK_FALSE(cfg2.gamma2.has_value());
  CHECK(cfg2.common.seed == 7);
}

TEST_CASE("unknown keys are rejected") {
  const Json doc = Json::parse(R"({"h": 0.1, "k": 2.0, "typo_key": 1})");
  CHECK_THROWS_AS(parse_fem_solve(doc), ConfigError);
  const Json doc2 =
      Json::parse(R"({"domain": {"kind": "interval", "bound": []}})");
  CHECK_THROWS_AS(parse_fem_solve(doc2), ConfigError);
  const Json doc3 = Json::parse(R"({"features": {"P": 8, "Q": 1}})");
  CHECK_THROWS_AS(parse_nn_train(doc3), ConfigError);
}

TEST_CASE("gamma2 and lambda are mutually exclusive") {
  const Json doc = Json::parse(R"({"gamma2": 5.7, "lambda": 50.0})");
  CHECK_THROWS_AS(parse_fem_solve(doc), ConfigError);
}

TEST_CASE("nn-train config defaults and round-trip") {
  const Json doc = Json::parse(R"({
    "k": 20.0,
    "features": {"P": 16, "R": 2, "spread": 0.1},
    "schedule": {"iterations": 500},
    "seed": 3
  })");
  const NnTrainConfig cfg = parse_nn_train(doc);
  CHECK(cfg.k == 20.0);
  CHECK(cfg.features.P == 16);
  CHECK(cfg.net.h_g == 32);
  CHECK(cfg.weights.gamma_bnd == 50.0);
  CHECK(cfg.f.kind == "two-gaussian");
  const Json ser = to_json(cfg);
  CHECK(ser == to_json(parse_nn_train(ser)));
}

TEST_CASE("convergence-study config round-trip") {
  const Json doc = Json::parse(R"({
    "mode": "k-sweep", "kh": 0.39269908169872414,
    "ks": [3.141592653589793, 6.283185307179586],
    "gamma1": 39.5, "gamma2": 5.7, "formulation": "galerkin"
  })");
  const auto cfg = parse_convergence_study(doc);
  const Json ser = to_json(cfg);
  CHECK(ser == to_json(parse_convergence_study(ser)));
  CHECK(cfg.ks.size() == 2);
}

TEST_CASE("domain config builds the right domains") {
  DomainConfig d;
  d.kind = "interval";
  d.bounds = {{0.0, 2.0}};
  const Domain dom = make_domain(d);
  CHECK(dom.dim() == 1);
  CHECK(dom.diameter() == doctest::Approx(2.0));

  d.kind = "rectangle";
  d.bounds = {{0.0, 1.0}, {0.0, 1.0}};
  d.origin = std::vector<double>{0.25, 0.5};
  const Domain dom2 = make_domain(d);
  CHECK(dom2.origin()[0] == doctest::Approx(0.25));
  CHECK(dom2.star_shape_constant() == doctest::Approx(0.25));
}

TEST_CASE("single-row study leaves the rate empty without error") {
  ConvergenceStudyConfig cfg;
  cfg.hs = {0.25};
  cfg.gamma1 = 10.0;
  cfg.gamma2 = 4.0;
  cfg.precision = "double";
  const StudyTable t = convergence_study(cfg);
  REQUIRE(t.rows.size() == 1);
  CHECK(std::isnan(t.rows[0].rate));
  CHECK(t.rows[0].v_error > 0.0);
  const Json j = t.to_json();
  CHECK_FALSE(j["rows"][0].contains("rate"));
}

TEST_CASE("two-gaussian preset carries the k^2 amplitude") {
  ForcingConfig fc;
  fc.kind = "two-gaussian";
  fc.epsilon = 1e-2;
  const double k = 10.0;
  const auto f = make_forcing(fc, k, 2);
  Eigen::VectorXd c1(2), c2(2);
  c1 << 0.5, 0.5;
  c2 << 0.75, 0.25;
  // the other source leaks ~exp(-12.5) of its amplitude across
  CHECK(std::abs(f.value(c1)) == doctest::Approx(k * k).epsilon(1e-4));
  CHECK(std::abs(f.value(c2)) == doctest::Approx(0.8 * k * k).epsilon(1e-4));
}
