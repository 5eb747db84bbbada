#pragma once

#include "hvp/objective.hpp"

namespace hvp {

/// Streamed ridge least-squares init of the linear coefficients W:
/// interior rows fit the off-shell residual L(Phi W) to f, boundary rows fit
/// the impedance condition in real/imaginary block form (the normal
/// derivative / trace cross-coupling is inherent in the blocks), weighted by
/// `boundary_weight`. Normal equations are accumulated chunk by chunk; the
/// full sample matrix is never materialised. Throws SingularSystem.
Eigen::MatrixXd ls_init(const PlaneWaveFeatures& features,
                        const ClosedFormField& f, double boundary_weight,
                        double ridge, const SampleSet& samples);

struct TrainSchedule {
  int iterations = 2000;
  int batch_interior = 4096;
  int batch_boundary = 1024;
  double lr = 1e-3;
  double lr_min = 1e-5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  /// quasi-Newton refinement over mixer parameters on a frozen batch
  int lbfgs_iterations = 0;
  int lbfgs_batch_interior = 8192;
  int lbfgs_batch_boundary = 2048;
  bool train_linear_only = false;  // freeze eta; Adam on W alone
};

struct TrainState {
  PlaneWaveModel model;
  std::vector<double> loss_history;      // exact sampled objective, per iter
  std::vector<double> interior_history;  // interior-residual term, per iter
  int iterations_run = 0;
  unsigned seed = 0;
};

using SnapshotCallback = std::function<void(int, const PlaneWaveModel&)>;

/// Fresh samples each iteration from the seeded RNG; Adam with cosine
/// annealing from lr to lr_min; optional L-BFGS pass on the mixer.
/// Deterministic given the seed. Throws Diverged when the loss exceeds
/// 1e3 x its initial magnitude.
TrainState train(PlaneWaveModel model, const ClosedFormField& f,
                 const ObjectiveWeights& weights, const Domain& domain,
                 const TrainSchedule& schedule, unsigned seed, int threads = 1,
                 const SnapshotCallback& snapshot = {});

}  // namespace hvp
