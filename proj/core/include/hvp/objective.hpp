#pragma once

#include <random>

#include "hvp/planewave.hpp"

namespace hvp {

/// Weights of the Monte-Carlo objective: gamma1 on the interior residual,
/// gamma_bnd on the impedance residual (it plays the role of gamma2).
struct ObjectiveWeights {
  double gamma1 = 2.0;
  double gamma_bnd = 50.0;
};

/// Interior points, boundary points and their outward normals.
struct SampleSet {
  Eigen::Matrix2Xd interior;  // 2 x N
  Eigen::Matrix2Xd boundary;  // 2 x M
  Eigen::Matrix2Xd normals;   // 2 x M
};

/// Uniform interior draw; boundary uniform per face proportional to face
/// measure. Deterministic given the RNG state.
SampleSet draw_samples(const Domain& domain, int n_interior, int n_boundary,
                       std::mt19937_64& rng);

/// Terms of J-hat. Sample means carry the |Omega| and |dOmega| measure
/// factors so the estimate converges to the weak-BC energy F_gamma.
struct ObjectiveTerms {
  double interior_residual = 0.0;  // gamma1 |Omega| mean |L u - f|^2
  double boundary_residual = 0.0;  // gamma_bnd |dOmega| mean |d_n u - iku|^2
  double physical = 0.0;           // |Omega| mean (|grad u|^2 - k^2|u|^2)/2
  double source = 0.0;             // -|Omega| Re mean f conj(u)
  double total() const {
    return interior_residual + boundary_residual + physical + source;
  }
};

ObjectiveTerms mc_objective(const PlaneWaveModel& model,
                            const ClosedFormField& f,
                            const ObjectiveWeights& weights,
                            const Domain& domain, const SampleSet& samples,
                            int threads = 1);

/// Objective and its exact gradient at the given samples.
ObjectiveTerms mc_objective_gradient(const PlaneWaveModel& model,
                                     const ClosedFormField& f,
                                     const ObjectiveWeights& weights,
                                     const Domain& domain,
                                     const SampleSet& samples,
                                     ParameterGradient& grad, int threads = 1);

/// Per-sample standard error of the J-hat estimator (for error bars).
double mc_standard_error(const PlaneWaveModel& model, const ClosedFormField& f,
                         const ObjectiveWeights& weights, const Domain& domain,
                         const SampleSet& samples);

}  // namespace hvp
