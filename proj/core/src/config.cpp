#include "hvp/config.hpp"

#include <nlohmann/json.hpp>

#include "hvp/errors.hpp"

namespace hvp {

namespace {

void require_keys(const Json& j, std::initializer_list<const char*> allowed,
                  const std::string& ctx) {
  if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError(ctx + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

CommonConfig parse_common(const Json& j) {
  CommonConfig c;
  c.seed = get_or<unsigned>(j, "seed", 0);
  c.deterministic = get_or<bool>(j, "deterministic", true);
  c.quad_order = get_or<int>(j, "quad_order", 0);
  return c;
}

void common_to_json(Json& j, const CommonConfig& c) {
  j["seed"] = c.seed;
  j["deterministic"] = c.deterministic;
  j["quad_order"] = c.quad_order;
}

DomainConfig parse_domain_cfg(const Json& j) {
  require_keys(j, {"kind", "bounds", "origin"}, "domain");
  DomainConfig d;
  d.kind = get_or<std::string>(j, "kind", "rectangle");
  if (j.contains("bounds")) {
    d.bounds.clear();
    for (const auto& b : j.at("bounds")) {
      if (!b.is_array() || b.size() != 2) {
        throw ConfigError("domain.bounds entries must be [lo, hi]");
      }
      d.bounds.push_back({b[0].get<double>(), b[1].get<double>()});
    }
  }
  if (j.contains("origin") && j.at("origin").is_array()) {
    d.origin = j.at("origin").get<std::vector<double>>();
  } else if (j.contains("origin") && j.at("origin") != "center") {
    throw ConfigError("domain.origin must be \"center\" or a coordinate list");
  }
  return d;
}

Json domain_to_json(const DomainConfig& d) {
  Json j;
  j["kind"] = d.kind;
  Json b = Json::array();
  for (const auto& bb : d.bounds) b.push_back({bb[0], bb[1]});
  j["bounds"] = b;
  if (d.origin) {
    j["origin"] = *d.origin;
  } else {
    j["origin"] = "center";
  }
  return j;
}

ForcingConfig parse_forcing(const Json& j) {
  require_keys(j, {"kind", "value", "center", "epsilon", "amplitude"}, "f");
  ForcingConfig f;
  f.kind = get_or<std::string>(j, "kind", "constant");
  if (f.kind != "constant" && f.kind != "gaussian" && f.kind != "two-gaussian") {
    throw ConfigError("f.kind must be constant, gaussian or two-gaussian");
  }
  if (j.contains("value")) {
    const auto& v = j.at("value");
    if (v.is_number()) {
      f.value = Complex(v.get<double>(), 0.0);
    } else if (v.is_array() && v.size() == 2) {
      f.value = Complex(v[0].get<double>(), v[1].get<double>());
    } else {
      throw ConfigError("f.value must be a number or [re, im]");
    }
  }
  f.center = get_or<std::vector<double>>(j, "center", f.center);
  f.epsilon = get_or<double>(j, "epsilon", f.epsilon);
  f.amplitude = get_or<double>(j, "amplitude", f.amplitude);
  return f;
}

Json forcing_to_json(const ForcingConfig& f) {
  Json j;
  j["kind"] = f.kind;
  j["value"] = {f.value.real(), f.value.imag()};
  j["center"] = f.center;
  j["epsilon"] = f.epsilon;
  j["amplitude"] = f.amplitude;
  return j;
}

}  // namespace

Domain make_domain(const DomainConfig& cfg) {
  Domain d = [&cfg]() {
    if (cfg.kind == "interval") {
      if (cfg.bounds.size() != 1) throw ConfigError("interval needs 1 bound");
      return Domain::interval(cfg.bounds[0][0], cfg.bounds[0][1]);
    }
    if (cfg.kind == "rectangle") {
      if (cfg.bounds.size() != 2) throw ConfigError("rectangle needs 2 bounds");
      return Domain::rectangle(cfg.bounds[0], cfg.bounds[1]);
    }
    if (cfg.kind == "box") {
      if (cfg.bounds.size() != 3) throw ConfigError("box needs 3 bounds");
      return Domain::box(cfg.bounds[0], cfg.bounds[1], cfg.bounds[2]);
    }
    throw ConfigError("domain.kind must be interval, rectangle or box");
  }();
  if (cfg.origin) {
    Eigen::VectorXd o(cfg.origin->size());
    for (size_t i = 0; i < cfg.origin->size(); ++i) o[i] = (*cfg.origin)[i];
    d = d.with_origin(o);
  }
  return d;
}

ClosedFormField make_forcing(const ForcingConfig& cfg, double k, int dim) {
  if (cfg.kind == "constant") {
    return fields::constant(cfg.value);
  }
  if (cfg.kind == "gaussian") {
    Eigen::VectorXd c(dim);
    for (int a = 0; a < dim; ++a) {
      c[a] = a < static_cast<int>(cfg.center.size()) ? cfg.center[a] : 0.5;
    }
    return fields::gaussian_bump(c, cfg.epsilon, cfg.amplitude);
  }
  if (cfg.kind == "two-gaussian") {
    if (dim != 2) throw ConfigError("two-gaussian forcing is 2D");
    Eigen::VectorXd c1(2), c2(2);
    c1 << 0.5, 0.5;
    c2 << 0.75, 0.25;
    const double a = k * k * cfg.amplitude;
    return fields::sum(fields::gaussian_bump(c1, cfg.epsilon, a),
                       fields::gaussian_bump(c2, cfg.epsilon, 0.8 * a));
  }
  throw ConfigError("unknown forcing kind " + cfg.kind);
}

FemSolveConfig parse_fem_solve(const Json& j) {
  require_keys(j,
               {"domain", "h", "k", "gamma1", "gamma2", "lambda", "f",
                "formulation", "export", "export_points", "seed",
                "deterministic", "quad_order"},
               "fem-solve");
  FemSolveConfig c;
  if (j.contains("domain")) c.domain = parse_domain_cfg(j.at("domain"));
  c.h = get_or<double>(j, "h", c.h);
  c.k = get_or<double>(j, "k", c.k);
  c.gamma1 = get_or<double>(j, "gamma1", c.gamma1);
  if (j.contains("gamma2")) c.gamma2 = j.at("gamma2").get<double>();
  if (j.contains("lambda")) c.lambda = j.at("lambda").get<double>();
  if (c.gamma2 && c.lambda) {
    throw ConfigError("specify exactly one of gamma2 / lambda");
  }
  if (!c.gamma2 && !c.lambda) c.lambda = 50.0;
  if (j.contains("f")) c.f = parse_forcing(j.at("f"));
  c.formulation = get_or<std::string>(j, "formulation", c.formulation);
  if (c.formulation != "energy" && c.formulation != "galerkin") {
    throw ConfigError("formulation must be energy or galerkin");
  }
  c.export_path = get_or<std::string>(j, "export", "");
  c.export_points = get_or<int>(j, "export_points", c.export_points);
  c.common = parse_common(j);
  return c;
}

Json to_json(const FemSolveConfig& c) {
  Json j;
  j["domain"] = domain_to_json(c.domain);
  j["h"] = c.h;
  j["k"] = c.k;
  j["gamma1"] = c.gamma1;
  if (c.gamma2) j["gamma2"] = *c.gamma2;
  if (c.lambda) j["lambda"] = *c.lambda;
  j["f"] = forcing_to_json(c.f);
  j["formulation"] = c.formulation;
  j["export"] = c.export_path;
  j["export_points"] = c.export_points;
  common_to_json(j, c.common);
  return j;
}

NnTrainConfig parse_nn_train(const Json& j) {
  require_keys(j,
               {"domain", "k", "features", "net", "weights", "schedule", "f",
                "export-every", "export", "export_points", "seed",
                "deterministic", "quad_order"},
               "nn-train");
  NnTrainConfig c;
  if (j.contains("domain")) c.domain = parse_domain_cfg(j.at("domain"));
  c.k = get_or<double>(j, "k", c.k);
  if (j.contains("features")) {
    const Json& jf = j.at("features");
    require_keys(jf, {"P", "R", "spread"}, "features");
    c.features.P = get_or<int>(jf, "P", c.features.P);
    c.features.R = get_or<int>(jf, "R", c.features.R);
    c.features.spread = get_or<double>(jf, "spread", c.features.spread);
  }
  if (j.contains("net")) {
    const Json& jn = j.at("net");
    require_keys(jn, {"h_g", "h_m", "alpha_g"}, "net");
    c.net.h_g = get_or<int>(jn, "h_g", c.net.h_g);
    c.net.h_m = get_or<int>(jn, "h_m", c.net.h_m);
    c.net.alpha_g = get_or<double>(jn, "alpha_g", c.net.alpha_g);
  }
  if (j.contains("weights")) {
    const Json& jw = j.at("weights");
    require_keys(jw, {"gamma1", "gamma_bnd", "ridge", "boundary_weight"},
                 "weights");
    c.weights.gamma1 = get_or<double>(jw, "gamma1", c.weights.gamma1);
    c.weights.gamma_bnd = get_or<double>(jw, "gamma_bnd", c.weights.gamma_bnd);
    c.weights.ridge = get_or<double>(jw, "ridge", c.weights.ridge);
    c.weights.boundary_weight =
        get_or<double>(jw, "boundary_weight", c.weights.boundary_weight);
  }
  if (j.contains("schedule")) {
    const Json& js = j.at("schedule");
    require_keys(js,
                 {"iterations", "batch_interior", "batch_boundary", "lr",
                  "lr_min", "lbfgs_iterations", "ls_interior", "ls_boundary"},
                 "schedule");
    c.schedule.iterations = get_or<int>(js, "iterations", c.schedule.iterations);
    c.schedule.batch_interior =
        get_or<int>(js, "batch_interior", c.schedule.batch_interior);
    c.schedule.batch_boundary =
        get_or<int>(js, "batch_boundary", c.schedule.batch_boundary);
    c.schedule.lr = get_or<double>(js, "lr", c.schedule.lr);
    c.schedule.lr_min = get_or<double>(js, "lr_min", c.schedule.lr_min);
    c.schedule.lbfgs_iterations =
        get_or<int>(js, "lbfgs_iterations", c.schedule.lbfgs_iterations);
    c.schedule.ls_interior =
        get_or<int>(js, "ls_interior", c.schedule.ls_interior);
    c.schedule.ls_boundary =
        get_or<int>(js, "ls_boundary", c.schedule.ls_boundary);
  }
  if (j.contains("f")) c.f = parse_forcing(j.at("f"));
  c.export_every = get_or<unsigned>(j, "export-every", 0);
  c.export_path = get_or<std::string>(j, "export", "");
  c.export_points = get_or<int>(j, "export_points", c.export_points);
  c.common = parse_common(j);
  return c;
}

Json to_json(const NnTrainConfig& c) {
  Json j;
  j["domain"] = domain_to_json(c.domain);
  j["k"] = c.k;
  j["features"] = {{"P", c.features.P},
                   {"R", c.features.R},
                   {"spread", c.features.spread}};
  j["net"] = {{"h_g", c.net.h_g},
              {"h_m", c.net.h_m},
              {"alpha_g", c.net.alpha_g}};
  j["weights"] = {{"gamma1", c.weights.gamma1},
                  {"gamma_bnd", c.weights.gamma_bnd},
                  {"ridge", c.weights.ridge},
                  {"boundary_weight", c.weights.boundary_weight}};
  j["schedule"] = {{"iterations", c.schedule.iterations},
                   {"batch_interior", c.schedule.batch_interior},
                   {"batch_boundary", c.schedule.batch_boundary},
                   {"lr", c.schedule.lr},
                   {"lr_min", c.schedule.lr_min},
                   {"lbfgs_iterations", c.schedule.lbfgs_iterations},
                   {"ls_interior", c.schedule.ls_interior},
                   {"ls_boundary", c.schedule.ls_boundary}};
  j["f"] = forcing_to_json(c.f);
  j["export-every"] = c.export_every;
  j["export"] = c.export_path;
  j["export_points"] = c.export_points;
  common_to_json(j, c.common);
  return j;
}

ConvergenceStudyConfig parse_convergence_study(const Json& j) {
  require_keys(j,
               {"mode", "k", "hs", "kh", "ks", "gamma1", "gamma2", "lambda",
                "formulation", "precision", "export_csv", "export_json",
                "seed", "deterministic", "quad_order"},
               "convergence-study");
  ConvergenceStudyConfig c;
  c.mode = get_or<std::string>(j, "mode", c.mode);
  if (c.mode != "h-refinement" && c.mode != "k-sweep") {
    throw ConfigError("mode must be h-refinement or k-sweep");
  }
  c.k = get_or<double>(j, "k", c.k);
  c.hs = get_or<std::vector<double>>(j, "hs", c.hs);
  c.kh = get_or<double>(j, "kh", c.kh);
  c.ks = get_or<std::vector<double>>(j, "ks", c.ks);
  c.gamma1 = get_or<double>(j, "gamma1", c.gamma1);
  if (j.contains("gamma2")) c.gamma2 = j.at("gamma2").get<double>();
  if (j.contains("lambda")) c.lambda = j.at("lambda").get<double>();
  if (c.gamma2 && c.lambda) {
    throw ConfigError("specify exactly one of gamma2 / lambda");
  }
  if (!c.gamma2 && !c.lambda) c.gamma2 = 5.7;
  c.formulation = get_or<std::string>(j, "formulation", c.formulation);
  if (c.formulation != "energy" && c.formulation != "galerkin") {
    throw ConfigError("formulation must be energy or galerkin");
  }
  c.precision = get_or<std::string>(j, "precision", c.precision);
  if (c.precision != "longdouble" && c.precision != "double") {
    throw ConfigError("precision must be longdouble or double");
  }
  c.export_csv = get_or<std::string>(j, "export_csv", "");
  c.export_json = get_or<std::string>(j, "export_json", "");
  c.common = parse_common(j);
  return c;
}

Json to_json(const ConvergenceStudyConfig& c) {
  Json j;
  j["mode"] = c.mode;
  j["k"] = c.k;
  j["hs"] = c.hs;
  j["kh"] = c.kh;
  j["ks"] = c.ks;
  j["gamma1"] = c.gamma1;
  if (c.gamma2) j["gamma2"] = *c.gamma2;
  if (c.lambda) j["lambda"] = *c.lambda;
  j["formulation"] = c.formulation;
  j["precision"] = c.precision;
  j["export_csv"] = c.export_csv;
  j["export_json"] = c.export_json;
  common_to_json(j, c.common);
  return j;
}

}  // namespace hvp
