#pragma once

#include <Eigen/Dense>

#include "hvp/field.hpp"

namespace hvp {

/// Plane-wave feature bank: P unit directions x R ring wavenumbers, cos and
/// sin per pair, D = 2PR features. kappa_0 = k exactly (on-shell ring);
/// kappa_r = k (1 + spread r / R) for r >= 1 (off-shell rings carrying the
/// particular solution).
struct PlaneWaveFeatures {
  int P = 0;
  int R = 0;
  double k = 0.0;
  double spread = 0.0;
  Eigen::Matrix2Xd directions;       // 2 x P, unit columns
  Eigen::VectorXd ring_wavenumbers;  // R

  int count() const { return 2 * P * R; }

  /// Wave vectors a_d = kappa_r d_p per feature, 2 x D (cos/sin share a_d).
  Eigen::Matrix2Xd wave_vectors() const;
  Eigen::VectorXd kappa_per_feature() const;  // D

  /// Batch evaluation: Phi, dPhi/dx, dPhi/dy, Delta Phi, each D x B.
  void eval(const Eigen::Matrix2Xd& X, Eigen::MatrixXd& phi,
            Eigen::MatrixXd& dphix, Eigen::MatrixXd& dphiy,
            Eigen::MatrixXd& lapphi) const;
};

PlaneWaveFeatures build_features(int P, int R, double k, double ring_spread);

/// Gain and mixer networks (the eta parameters). alpha_g is a fixed scale,
/// not trained; everything else is.
struct GainMixerParams {
  Eigen::MatrixXd G1;  // hg x 2
  Eigen::VectorXd c1;  // hg
  Eigen::MatrixXd G2;  // D x hg
  Eigen::VectorXd c2;  // D
  Eigen::MatrixXd M1;  // hm x D
  Eigen::VectorXd b1;  // hm
  Eigen::MatrixXd M2;  // 2 x hm
  Eigen::VectorXd b2;  // 2
  double alpha_g = 0.05;
};

/// u_{W,eta}(x) = Phi(x) W + M_eta(Phi(x) . g_eta(x)), output (u_R, u_I).
struct PlaneWaveModel {
  PlaneWaveFeatures features;
  Eigen::MatrixXd W;  // D x 2
  GainMixerParams eta;

  int hg() const { return static_cast<int>(eta.G1.rows()); }
  int hm() const { return static_cast<int>(eta.M1.rows()); }
};

/// Seeded Gaussian init (He-style scales); the mixer output layer starts at
/// zero unless zero_mixer is false, so the model initially equals Phi W.
PlaneWaveModel init_model(const PlaneWaveFeatures& features, int hg, int hm,
                          double alpha_g, unsigned seed,
                          bool zero_mixer = true);

/// Gradient of a scalar objective with respect to every trainable parameter.
struct ParameterGradient {
  Eigen::MatrixXd W, G1, G2, M1, M2;
  Eigen::VectorXd c1, c2, b1, b2;

  static ParameterGradient zero(const PlaneWaveModel& m);
  void add_scaled(const ParameterGradient& other, double s);
  double squared_norm() const;
};

/// Forward values of the model and its spatial derivatives over a batch,
/// plus the intermediates needed to backpropagate adjoints of
/// (u, grad u, Delta u) to parameter space.
class ModelEvaluator {
 public:
  explicit ModelEvaluator(const PlaneWaveModel& model) : m_(&model) {}

  /// Fills u, ux, uy, lap (each 2 x B).
  void forward(const Eigen::Matrix2Xd& X);

  /// Accumulates into `grad` the parameter gradient of sum_b of the scalar
  /// whose adjoints w.r.t. (u, du/dx, du/dy, Delta u) are given (each 2 x B).
  void backward(const Eigen::Matrix2Xd& ubar, const Eigen::Matrix2Xd& gxbar,
                const Eigen::Matrix2Xd& gybar, const Eigen::Matrix2Xd& lapbar,
                ParameterGradient& grad) const;

  Eigen::Matrix2Xd u, ux, uy, lap;

 private:
  const PlaneWaveModel* m_;
  Eigen::Matrix2Xd X_;
  Eigen::MatrixXd phi_, dphix_, dphiy_, lapphi_;            // D x B
  Eigen::MatrixXd s1_, s1p_, s1pp_, s1ppp_;                 // hg x B
  Eigen::MatrixXd t_, T_, Tp_, dtx_, dty_, lapt_, p2_;      // D x B
  Eigen::MatrixXd g_, dgx_, dgy_, lapg_;                    // D x B
  Eigen::MatrixXd z_, dzx_, dzy_, lapz_;                    // D x B
  Eigen::MatrixXd q_, qp_, qpp_, qppp_, dax_, day_, lapa_;  // hm x B
  Eigen::MatrixXd dqx_, dqy_, lapq_;                        // hm x B
};

/// The model as a closed-form field (single-point evaluation).
ClosedFormField model_field(const PlaneWaveModel& model);

}  // namespace hvp
