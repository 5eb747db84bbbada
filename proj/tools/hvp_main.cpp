// hvp: regularised variational principles for the Helmholtz impedance
// problem. Subcommands: verify-identities, coercivity-report, fem-solve,
// nn-train, oracle, convergence-study.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include <hvp/config.hpp>
#include <hvp/fem.hpp>
#include <hvp/identities.hpp>
#include <hvp/objective.hpp>
#include <hvp/study.hpp>
#include <hvp/train.hpp>

namespace {

using hvp::Json;

int thread_count(bool deterministic) {
  if (deterministic) return 1;
  const char* env = std::getenv("HVP_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n > 0 ? n : 1;
}

hvp::Domain named_domain(const std::string& name) {
  if (name == "square") return hvp::Domain::unit_square();
  if (name == "cube") return hvp::Domain::unit_cube();
  if (name == "interval") return hvp::Domain::interval(0.0, 1.0);
  if (name == "centred-square") {
    return hvp::Domain::rectangle({-0.5, 0.5}, {-0.5, 0.5});
  }
  throw hvp::ConfigError("unknown domain name " + name);
}

Json report_json(const hvp::IdentityReport& r) {
  Json j;
  j["bulk_terms"] = r.bulk_terms;
  j["boundary_terms"] = r.boundary_terms;
  j["residual"] = r.residual;
  j["relative_residual"] = r.relative_residual;
  return j;
}

Json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hvp::ConfigError("cannot open config " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw hvp::ConfigError(std::string("config parse error: ") + e.what());
  }
  return j;
}

struct IdentityCase {
  std::string name;
  hvp::ClosedFormField field;
};

std::vector<IdentityCase> identity_cases(const std::string& which, double k,
                                         const hvp::Domain& dom) {
  using namespace hvp::fields;
  std::vector<IdentityCase> cases;
  const int dim = dom.dim();
  auto dir = [dim](double angle) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
    d[0] = std::cos(angle);
    if (dim > 1) d[1] = std::sin(angle);
    return d;
  };
  auto centre = [&dom]() {
    Eigen::VectorXd c = dom.center();
    c[0] += 0.07 * dom.extent(0);
    return c;
  };
  if (which == "constant" || which == "battery") {
    cases.push_back({"constant", constant({1.0, 2.0})});
  }
  if (which == "linear" || which == "battery") {
    cases.push_back({"linear", coordinate(0)});
  }
  if (which == "polynomial" || which == "battery") {
    std::vector<Monomial> t2 = {{{1.0, 0.0}, {2}}};
    std::vector<Monomial> t3 = {{{0.0, 1.0}, {3}}};
    std::vector<Monomial> t4 = {{{1.0, -0.5}, {4}}};
    if (dim >= 2) {
      t2.push_back({{0.0, 2.0}, {1, 1}});
      t3.push_back({{1.0, 0.0}, {1, 2}});
      t4.push_back({{0.5, 0.5}, {2, 2}});
    }
    cases.push_back({"quadratic", polynomial(t2)});
    cases.push_back({"cubic", polynomial(t3)});
    cases.push_back({"quartic", polynomial(t4)});
  }
  if (which == "plane-wave" || which == "battery") {
    cases.push_back({"plane_wave_0", plane_wave(k, dir(0.0))});
    cases.push_back({"plane_wave_1", plane_wave(k, dir(0.9))});
    cases.push_back({"plane_wave_2", plane_wave(std::min(10.0, k), dir(2.2))});
  }
  if (which == "gaussian" || which == "battery") {
    cases.push_back(
        {"gaussian", gaussian_bump(centre(), 0.09, {1.0, 0.0})});
    cases.push_back(
        {"gaussian_complex", gaussian_bump(dom.center(), 0.13, {0.5, 1.0})});
  }
  if (cases.empty()) throw hvp::ConfigError("unknown identity case " + which);
  return cases;
}

int cmd_verify_identities(const std::string& domain_name, const std::string& c,
                          double k, double beta, int order, double threshold) {
  const hvp::Domain dom = named_domain(domain_name);
  Json out = Json::array();
  bool pass = true;
  for (const auto& cs : identity_cases(c, k, dom)) {
    const auto rell = hvp::rellich_residual(cs.field, k, dom, order);
    const auto mora =
        hvp::low_order_morawetz_residual(cs.field, k, beta, dom, order);
    Json j;
    j["case"] = cs.name;
    j["rellich"] = report_json(rell);
    j["low_order_morawetz"] = report_json(mora);
    out.push_back(j);
    pass = pass && rell.relative_residual < threshold &&
           mora.relative_residual < threshold;
  }
  Json doc;
  doc["reports"] = out;
  doc["threshold"] = threshold;
  doc["pass"] = pass;
  std::cout << doc.dump(2) << "\n";
  return pass ? 0 : 1;
}

int cmd_coercivity_report(int dim, const std::string& domain_name, double k) {
  const hvp::Domain dom =
      domain_name.empty()
          ? (dim == 1 ? named_domain("interval")
                      : (dim == 2 ? named_domain("square")
                                  : named_domain("cube")))
          : named_domain(domain_name);
  hvp::EnergyParams p = hvp::EnergyParams::for_domain(dom);
  p.k = k;
  const auto weak = hvp::coercivity_coefficients_weak(p);
  const auto strong = hvp::coercivity_coefficients_strong(p);
  const double nu = p.nu;

  Json jp;
  jp["k"] = p.k;
  jp["gamma1"] = p.gamma1;
  jp["gamma2"] = p.gamma2;
  jp["alpha"] = p.alpha;
  jp["beta"] = p.beta;
  jp["eps1"] = p.eps1;
  jp["eps2"] = p.eps2;
  jp["eps3"] = p.eps3;
  jp["L"] = p.L;
  jp["L0"] = p.L0;
  jp["nu"] = p.nu;

  auto coeffs_json = [nu](const hvp::CoercivityCoefficients& c) {
    Json j;
    j["c_residual"] = c.c_residual;
    j["c_grad"] = c.c_grad;
    j["c_mass"] = c.c_mass;
    j["c_bgrad"] = c.c_bgrad;
    j["c_bmass"] = c.c_bmass;
    if (c.has_impedance_term) j["c_bimp"] = c.c_bimp;
    // the coefficients of the nu-scaled bound, as displayed in the source
    Json s;
    s["residual"] = nu * c.c_residual;
    s["grad"] = nu * c.c_grad;
    s["mass"] = nu * c.c_mass;
    s["bgrad"] = nu * c.c_bgrad;
    s["bmass"] = nu * c.c_bmass;
    if (c.has_impedance_term) s["bimp"] = nu * c.c_bimp;
    j["nu_scaled"] = s;
    j["coercive"] = c.coercive();
    return j;
  };

  Json doc;
  doc["params"] = jp;
  doc["weak_bc"] = coeffs_json(weak);
  doc["strong_bc"] = coeffs_json(strong);
  doc["gamma1_threshold"] = hvp::gamma1_threshold(p);
  doc["gamma2_threshold"] = hvp::gamma2_threshold(p);
  doc["pass"] = weak.coercive() && strong.coercive();
  std::cout << doc.dump(2) << "\n";
  return doc["pass"].get<bool>() ? 0 : 1;
}

int cmd_fem_solve(const std::string& config_path) {
  const hvp::FemSolveConfig cfg = hvp::parse_fem_solve(load_config(config_path));
  const hvp::Domain dom = hvp::make_domain(cfg.domain);
  const hvp::Element elem = dom.dim() == 1
                                ? hvp::Element::quintic_hermite_1d
                                : hvp::Element::bogner_fox_schmit_2d;
  const hvp::FemSpace space = hvp::build_space(dom, cfg.h, elem);

  hvp::EnergyParams p = hvp::EnergyParams::for_domain(dom);
  p.k = cfg.k;
  p.gamma1 = cfg.gamma1;
  if (cfg.gamma2) p.gamma2 = *cfg.gamma2;

  hvp::AssembleOptions opts;
  opts.penalty_mode = cfg.gamma2 ? hvp::PenaltyMode::energy
                                 : hvp::PenaltyMode::lambda_over_h;
  if (cfg.lambda) opts.lambda = *cfg.lambda;
  opts.formulation = cfg.formulation == "galerkin" ? hvp::Formulation::galerkin
                                                   : hvp::Formulation::energy;
  opts.quad_order = cfg.common.quad_order;

  const auto f = hvp::make_forcing(cfg.f, cfg.k, dom.dim());
  const hvp::FemSystem sys = hvp::assemble(space, p, f, opts);
  const Eigen::VectorXcd x = hvp::solve(sys);

  Json doc;
  doc["dofs"] = sys.dofs;
  doc["h"] = sys.h;
  doc["k"] = cfg.k;
  doc["formulation"] = cfg.formulation;
  doc["boundary_weight"] = sys.boundary_weight;
  const double res = sys.rhs.norm() == 0.0
                         ? 0.0
                         : (sys.matrix * x - sys.rhs).norm() / sys.rhs.norm();
  doc["solve_residual"] = res;
  doc["solution_norm_inf"] = x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
  if (!cfg.export_path.empty()) {
    const hvp::FieldGrid grid =
        hvp::sample_solution(space, x, cfg.export_points);
    grid.write_csv(cfg.export_path);
    doc["export"] = cfg.export_path;
  }
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_nn_train(const std::string& config_path) {
  const hvp::NnTrainConfig cfg = hvp::parse_nn_train(load_config(config_path));
  const hvp::Domain dom = hvp::make_domain(cfg.domain);
  const int threads = thread_count(cfg.common.deterministic);

  const auto features = hvp::build_features(cfg.features.P, cfg.features.R,
                                            cfg.k, cfg.features.spread);
  hvp::PlaneWaveModel model = hvp::init_model(
      features, cfg.net.h_g, cfg.net.h_m, cfg.net.alpha_g, cfg.common.seed);

  const auto f = hvp::make_forcing(cfg.f, cfg.k, dom.dim());
  const double bweight = cfg.weights.boundary_weight > 0.0
                             ? cfg.weights.boundary_weight
                             : 50.0 * cfg.k / (2.0 * M_PI);

  // streamed least-squares init of the linear coefficients
  std::mt19937_64 rng(cfg.common.seed ^ 0x9e3779b97f4a7c15ULL);
  const hvp::SampleSet ls_samples = hvp::draw_samples(
      dom, cfg.schedule.ls_interior, cfg.schedule.ls_boundary, rng);
  const double fscale =
      std::max(1.0, std::abs(f.value(dom.center())));
  model.W = hvp::ls_init(features, f, bweight,
                         cfg.weights.ridge * fscale, ls_samples);

  hvp::TrainSchedule sched;
  sched.iterations = cfg.schedule.iterations;
  sched.batch_interior = cfg.schedule.batch_interior;
  sched.batch_boundary = cfg.schedule.batch_boundary;
  sched.lr = cfg.schedule.lr;
  sched.lr_min = cfg.schedule.lr_min;
  sched.lbfgs_iterations = cfg.schedule.lbfgs_iterations;

  hvp::ObjectiveWeights weights{cfg.weights.gamma1, cfg.weights.gamma_bnd};

  std::function<void(int, const hvp::PlaneWaveModel&)> snapshot;
  if (cfg.export_every > 0 && !cfg.export_path.empty()) {
    snapshot = [&cfg, &dom](int iter, const hvp::PlaneWaveModel& m) {
      if (iter % static_cast<int>(cfg.export_every) != 0) return;
      hvp::FieldGrid grid = hvp::make_grid(dom, cfg.export_points);
      const auto field = hvp::model_field(m);
      for (int i = 0; i < grid.size(); ++i) {
        grid.values[i] = field.value(grid.point(i));
      }
      grid.write_csv(cfg.export_path + ".iter" + std::to_string(iter) + ".csv");
    };
  }

  const hvp::TrainState state = hvp::train(std::move(model), f, weights, dom,
                                           sched, cfg.common.seed, threads,
                                           snapshot);

  Json doc;
  doc["iterations"] = state.iterations_run;
  doc["loss_first"] = state.loss_history.empty() ? 0.0 : state.loss_history.front();
  doc["loss_last"] = state.loss_history.empty() ? 0.0 : state.loss_history.back();
  doc["interior_first"] =
      state.interior_history.empty() ? 0.0 : state.interior_history.front();
  doc["interior_last"] =
      state.interior_history.empty() ? 0.0 : state.interior_history.back();
  if (!cfg.export_path.empty()) {
    hvp::FieldGrid grid = hvp::make_grid(dom, cfg.export_points);
    const auto field = hvp::model_field(state.model);
    for (int i = 0; i < grid.size(); ++i) {
      grid.values[i] = field.value(grid.point(i));
    }
    grid.write_csv(cfg.export_path);
    doc["export"] = cfg.export_path;
  }
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_oracle(const std::string& what, double k, int n,
               const std::string& export_path) {
  hvp::FieldGrid grid = hvp::make_grid(hvp::Domain::interval(0, 1), n);
  if (what == "1d-constant") {
    const auto u = hvp::exact_1d_constant_forcing(k, 1.0);
    for (int i = 0; i < grid.size(); ++i) {
      grid.values[i] = u.value(grid.point(i));
    }
  } else if (what == "fd-reference") {
    grid = hvp::fd_reference_1d(k, hvp::fields::constant(1.0), n);
  } else {
    throw hvp::ConfigError("unknown oracle case " + what);
  }
  if (!export_path.empty()) grid.write_csv(export_path);
  Json doc;
  doc["case"] = what;
  doc["k"] = k;
  doc["n"] = n;
  if (!export_path.empty()) doc["export"] = export_path;
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_convergence_study(const std::string& config_path) {
  const auto cfg = hvp::parse_convergence_study(load_config(config_path));
  const hvp::StudyTable table = hvp::convergence_study(cfg);
  if (!cfg.export_csv.empty()) table.write_csv(cfg.export_csv);
  if (!cfg.export_json.empty()) {
    std::ofstream out(cfg.export_json);
    out << table.to_json().dump(2) << "\n";
  }
  std::cout << table.to_json().dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regularised Helmholtz variational principles"};
  app.require_subcommand(1);

  // verify-identities
  std::string vi_case = "battery", vi_domain = "square";
  double vi_k = 5.0, vi_beta = 1.0, vi_threshold = 1e-9;
  int vi_order = 24;
  auto* vi = app.add_subcommand("verify-identities",
                                "evaluate the Rellich and low-order Morawetz "
                                "identity residuals");
  vi->add_option("--case", vi_case,
                 "constant|linear|polynomial|plane-wave|gaussian|battery");
  vi->add_option("--domain", vi_domain, "square|interval|cube|centred-square");
  vi->add_option("--k", vi_k, "wavenumber");
  vi->add_option("--beta", vi_beta, "M0 multiplier strength");
  vi->add_option("--order", vi_order, "quadrature order");
  vi->add_option("--threshold", vi_threshold, "relative residual gate");

  // coercivity-report
  int cr_dim = 2;
  std::string cr_domain;
  double cr_k = 1.0;
  auto* cr = app.add_subcommand(
      "coercivity-report", "parameter pack, lower-bound coefficients, pass/fail");
  cr->add_option("--dim", cr_dim, "1, 2 or 3");
  cr->add_option("--domain", cr_domain, "square|cube|interval (default by dim)");
  cr->add_option("--k", cr_k, "wavenumber (reported only)");

  // fem-solve
  std::string fs_config;
  auto* fs = app.add_subcommand("fem-solve",
                                "assemble and solve the H2-conforming system");
  fs->add_option("--config", fs_config, "JSON run configuration")->required();

  // nn-train
  std::string nn_config;
  auto* nn = app.add_subcommand("nn-train", "train the plane-wave network");
  nn->add_option("--config", nn_config, "JSON run configuration")->required();

  // oracle
  std::string or_case = "1d-constant", or_export;
  double or_k = 3.141592653589793;
  int or_n = 1001;
  auto* orc = app.add_subcommand("oracle", "reference solutions");
  orc->add_option("--case", or_case, "1d-constant|fd-reference");
  orc->add_option("--k", or_k, "wavenumber");
  orc->add_option("--n", or_n, "sample count");
  orc->add_option("--export", or_export, "CSV path");

  // convergence-study
  std::string cs_config;
  auto* cs = app.add_subcommand("convergence-study",
                                "1D refinement / wavenumber robustness table");
  cs->add_option("--config", cs_config, "JSON run configuration")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 64;
  }

  try {
    if (vi->parsed()) {
      return cmd_verify_identities(vi_domain, vi_case, vi_k, vi_beta, vi_order,
                                   vi_threshold);
    }
    if (cr->parsed()) return cmd_coercivity_report(cr_dim, cr_domain, cr_k);
    if (fs->parsed()) return cmd_fem_solve(fs_config);
    if (nn->parsed()) return cmd_nn_train(nn_config);
    if (orc->parsed()) return cmd_oracle(or_case, or_k, or_n, or_export);
    if (cs->parsed()) return cmd_convergence_study(cs_config);
  } catch (const hvp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 64;
  } catch (const hvp::SolveFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const hvp::SingularSystem& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const hvp::Diverged& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
