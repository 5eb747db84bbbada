#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "hvp/field.hpp"
#include "hvp/geometry.hpp"

// Run configurations: strict JSON documents (unknown keys rejected) that
// round-trip identically through serialise -> parse.

namespace hvp {

using Json = nlohmann::json;

struct CommonConfig {
  unsigned seed = 0;
  bool deterministic = true;
  int quad_order = 0;  // 0 = module default
};

struct DomainConfig {
  std::string kind = "rectangle";  // interval | rectangle | box
  std::vector<std::array<double, 2>> bounds = {{0.0, 1.0}, {0.0, 1.0}};
  std::optional<std::vector<double>> origin;  // absent = "center"
};

Domain make_domain(const DomainConfig& cfg);

struct ForcingConfig {
  std::string kind = "constant";  // constant | gaussian | two-gaussian
  Complex value = 1.0;            // constant
  std::vector<double> center = {0.5, 0.5};
  double epsilon = 1e-4;
  double amplitude = 1.0;
};

/// two-gaussian is the two-source preset with the k^2 amplitude factor;
/// gaussian is the unit-amplitude single source.
ClosedFormField make_forcing(const ForcingConfig& cfg, double k, int dim);

struct FemSolveConfig {
  DomainConfig domain;
  double h = 0.0625;
  double k = 10.0;
  double gamma1 = 2.0;
  std::optional<double> gamma2;  // exactly one of gamma2 / lambda
  std::optional<double> lambda;
  ForcingConfig f;
  std::string formulation = "energy";  // energy | galerkin
  std::string export_path;
  int export_points = 65;
  CommonConfig common;
};

struct NnFeaturesConfig {
  int P = 32;
  int R = 4;
  double spread = 0.1;
};

struct NnNetConfig {
  int h_g = 32;
  int h_m = 64;
  double alpha_g = 0.05;
};

struct NnWeightsConfig {
  double gamma1 = 2.0;
  double gamma_bnd = 50.0;
  double ridge = 1e-8;
  double boundary_weight = 0.0;  // 0 = default 50 k / (2 pi)
};

struct NnScheduleConfig {
  int iterations = 2000;
  int batch_interior = 4096;
  int batch_boundary = 1024;
  double lr = 1e-3;
  double lr_min = 1e-5;
  int lbfgs_iterations = 30;
  int ls_interior = 20000;
  int ls_boundary = 5000;
};

struct NnTrainConfig {
  DomainConfig domain;
  double k = 100.0;
  NnFeaturesConfig features;
  NnNetConfig net;
  NnWeightsConfig weights;
  NnScheduleConfig schedule;
  ForcingConfig f{.kind = "two-gaussian"};
  unsigned export_every = 0;
  std::string export_path;
  int export_points = 129;
  CommonConfig common;
};

struct ConvergenceStudyConfig {
  std::string mode = "h-refinement";  // h-refinement | k-sweep
  double k = 3.141592653589793;
  std::vector<double> hs = {0.125, 0.0625, 0.03125, 0.015625, 0.0078125};
  double kh = 0.39269908169872414;  // pi/8, used by k-sweep
  std::vector<double> ks;           // k-sweep list
  double gamma1 = 39.5;
  std::optional<double> gamma2;
  std::optional<double> lambda;
  std::string formulation = "galerkin";
  std::string precision = "longdouble";  // longdouble | double
  std::string export_csv;
  std::string export_json;
  CommonConfig common;
};

FemSolveConfig parse_fem_solve(const Json& j);
Json to_json(const FemSolveConfig& cfg);

NnTrainConfig parse_nn_train(const Json& j);
Json to_json(const NnTrainConfig& cfg);

ConvergenceStudyConfig parse_convergence_study(const Json& j);
Json to_json(const ConvergenceStudyConfig& cfg);

}  // namespace hvp
