#include "hvp/planewave.hpp"

#include <cmath>
#include <memory>
#include <random>

#include "hvp/errors.hpp"

namespace hvp {

namespace {

// SiLU and its first three derivatives; the Laplacian backprop needs d3.
struct Act {
  double v, d1, d2, d3;
};

inline Act silu(double x) {
  const double s = 1.0 / (1.0 + std::exp(-x));
  const double sp = s * (1.0 - s);
  Act a;
  a.v = x * s;
  a.d1 = s + x * sp;
  a.d2 = sp * (2.0 + x * (1.0 - 2.0 * s));
  a.d3 = sp * ((1.0 - 2.0 * s) * (3.0 + x * (1.0 - 2.0 * s)) - 2.0 * x * sp);
  return a;
}

void silu_batch(const Eigen::MatrixXd& x, Eigen::MatrixXd& v,
                Eigen::MatrixXd& d1, Eigen::MatrixXd& d2,
                Eigen::MatrixXd& d3) {
  v.resizeLike(x);
  d1.resizeLike(x);
  d2.resizeLike(x);
  d3.resizeLike(x);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const Act a = silu(x(i, j));
      v(i, j) = a.v;
      d1(i, j) = a.d1;
      d2(i, j) = a.d2;
      d3(i, j) = a.d3;
    }
  }
}

double gaussian(std::mt19937_64& rng) {
  // Box-Muller on uniform doubles drawn from the top 53 bits
  double u1 = ((rng() >> 11) + 1.0) * 0x1.0p-53;
  double u2 = (rng() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                                double scale, std::mt19937_64& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = scale * gaussian(rng);
  }
  return m;
}

}  // namespace

PlaneWaveFeatures build_features(int P, int R, double k, double ring_spread) {
  if (P < 1 || R < 1) throw InvalidParams("build_features requires P, R >= 1");
  if (!(k > 0.0)) throw InvalidParams("k must be positive");
  PlaneWaveFeatures f;
  f.P = P;
  f.R = R;
  f.k = k;
  f.spread = ring_spread;
  f.directions.resize(2, P);
  for (int p = 0; p < P; ++p) {
    const double phi = 2.0 * M_PI * p / P;
    f.directions(0, p) = std::cos(phi);
    f.directions(1, p) = std::sin(phi);
  }
  f.ring_wavenumbers.resize(R);
  f.ring_wavenumbers[0] = k;
  for (int r = 1; r < R; ++r) {
    f.ring_wavenumbers[r] = k * (1.0 + ring_spread * r / R);
  }
  return f;
}

Eigen::Matrix2Xd PlaneWaveFeatures::wave_vectors() const {
  Eigen::Matrix2Xd a(2, count());
  for (int r = 0; r < R; ++r) {
    for (int p = 0; p < P; ++p) {
      const Eigen::Vector2d v = ring_wavenumbers[r] * directions.col(p);
      a.col(2 * (r * P + p)) = v;
      a.col(2 * (r * P + p) + 1) = v;
    }
  }
  return a;
}

Eigen::VectorXd PlaneWaveFeatures::kappa_per_feature() const {
  Eigen::VectorXd kap(count());
  for (int r = 0; r < R; ++r) {
    for (int p = 0; p < P; ++p) {
      kap[2 * (r * P + p)] = ring_wavenumbers[r];
      kap[2 * (r * P + p) + 1] = ring_wavenumbers[r];
    }
  }
  return kap;
}

void PlaneWaveFeatures::eval(const Eigen::Matrix2Xd& X, Eigen::MatrixXd& phi,
                             Eigen::MatrixXd& dphix, Eigen::MatrixXd& dphiy,
                             Eigen::MatrixXd& lapphi) const {
  const int D = count();
  const Eigen::Index B = X.cols();
  phi.resize(D, B);
  dphix.resize(D, B);
  dphiy.resize(D, B);
  lapphi.resize(D, B);
  for (int r = 0; r < R; ++r) {
    const double kap = ring_wavenumbers[r];
    for (int p = 0; p < P; ++p) {
      const Eigen::Vector2d a = kap * directions.col(p);
      const Eigen::RowVectorXd xi = a.transpose() * X;
      const int dc = 2 * (r * P + p), ds = dc + 1;
      for (Eigen::Index b = 0; b < B; ++b) {
        const double c = std::cos(xi[b]), s = std::sin(xi[b]);
        phi(dc, b) = c;
        phi(ds, b) = s;
        dphix(dc, b) = -a[0] * s;
        dphiy(dc, b) = -a[1] * s;
        dphix(ds, b) = a[0] * c;
        dphiy(ds, b) = a[1] * c;
        lapphi(dc, b) = -kap * kap * c;
        lapphi(ds, b) = -kap * kap * s;
      }
    }
  }
}

PlaneWaveModel init_model(const PlaneWaveFeatures& features, int hg, int hm,
                          double alpha_g, unsigned seed, bool zero_mixer) {
  PlaneWaveModel m;
  m.features = features;
  const int D = features.count();
  m.W = Eigen::MatrixXd::Zero(D, 2);
  std::mt19937_64 rng(seed);
  m.eta.G1 = gaussian_matrix(hg, 2, 1.0 / std::sqrt(2.0), rng);
  m.eta.c1 = Eigen::VectorXd::Zero(hg);
  m.eta.G2 = gaussian_matrix(D, hg, 1.0 / std::sqrt(double(hg)), rng);
  m.eta.c2 = Eigen::VectorXd::Zero(D);
  m.eta.M1 = gaussian_matrix(hm, D, 1.0 / std::sqrt(double(D)), rng);
  m.eta.b1 = Eigen::VectorXd::Zero(hm);
  if (zero_mixer) {
    m.eta.M2 = Eigen::MatrixXd::Zero(2, hm);
  } else {
    m.eta.M2 = gaussian_matrix(2, hm, 1.0 / std::sqrt(double(hm)), rng);
  }
  m.eta.b2 = Eigen::VectorXd::Zero(2);
  m.eta.alpha_g = alpha_g;
  return m;
}

ParameterGradient ParameterGradient::zero(const PlaneWaveModel& m) {
  ParameterGradient g;
  g.W = Eigen::MatrixXd::Zero(m.W.rows(), 2);
  g.G1 = Eigen::MatrixXd::Zero(m.eta.G1.rows(), 2);
  g.G2 = Eigen::MatrixXd::Zero(m.eta.G2.rows(), m.eta.G2.cols());
  g.M1 = Eigen::MatrixXd::Zero(m.eta.M1.rows(), m.eta.M1.cols());
  g.M2 = Eigen::MatrixXd::Zero(2, m.eta.M2.cols());
  g.c1 = Eigen::VectorXd::Zero(m.eta.c1.size());
  g.c2 = Eigen::VectorXd::Zero(m.eta.c2.size());
  g.b1 = Eigen::VectorXd::Zero(m.eta.b1.size());
  g.b2 = Eigen::VectorXd::Zero(2);
  return g;
}

void ParameterGradient::add_scaled(const ParameterGradient& o, double s) {
  W += s * o.W;
  G1 += s * o.G1;
  G2 += s * o.G2;
  M1 += s * o.M1;
  M2 += s * o.M2;
  c1 += s * o.c1;
  c2 += s * o.c2;
  b1 += s * o.b1;
  b2 += s * o.b2;
}

double ParameterGradient::squared_norm() const {
  return W.squaredNorm() + G1.squaredNorm() + G2.squaredNorm() +
         M1.squaredNorm() + M2.squaredNorm() + c1.squaredNorm() +
         c2.squaredNorm() + b1.squaredNorm() + b2.squaredNorm();
}

void ModelEvaluator::forward(const Eigen::Matrix2Xd& X) {
  const auto& f = m_->features;
  const auto& e = m_->eta;
  const Eigen::Index B = X.cols();
  X_ = X;

  f.eval(X, phi_, dphix_, dphiy_, lapphi_);

  // gain net
  Eigen::MatrixXd z1 = (e.G1 * X).colwise() + e.c1;
  silu_batch(z1, s1_, s1p_, s1pp_, s1ppp_);
  t_ = (e.G2 * s1_).colwise() + e.c2;
  const Eigen::VectorXd g1x = e.G1.col(0), g1y = e.G1.col(1);
  const Eigen::VectorXd rho1 = g1x.array().square() + g1y.array().square();
  dtx_ = e.G2 * (s1p_.array().colwise() * g1x.array()).matrix();
  dty_ = e.G2 * (s1p_.array().colwise() * g1y.array()).matrix();
  lapt_ = e.G2 * (s1pp_.array().colwise() * rho1.array()).matrix();
  T_ = t_.array().tanh();
  Tp_ = 1.0 - T_.array().square();
  g_ = 1.0 + e.alpha_g * T_.array();
  dgx_ = e.alpha_g * (Tp_.array() * dtx_.array());
  dgy_ = e.alpha_g * (Tp_.array() * dty_.array());
  p2_ = dtx_.array().square() + dty_.array().square();
  lapg_ = e.alpha_g * (-2.0 * T_.array() * Tp_.array() * p2_.array() +
                       Tp_.array() * lapt_.array());

  // modulated features
  z_ = phi_.array() * g_.array();
  dzx_ = dphix_.array() * g_.array() + phi_.array() * dgx_.array();
  dzy_ = dphiy_.array() * g_.array() + phi_.array() * dgy_.array();
  lapz_ = lapphi_.array() * g_.array() +
          2.0 * (dphix_.array() * dgx_.array() + dphiy_.array() * dgy_.array()) +
          phi_.array() * lapg_.array();

  // mixer
  Eigen::MatrixXd a = (e.M1 * z_).colwise() + e.b1;
  silu_batch(a, q_, qp_, qpp_, qppp_);
  dax_ = e.M1 * dzx_;
  day_ = e.M1 * dzy_;
  lapa_ = e.M1 * lapz_;
  dqx_ = qp_.array() * dax_.array();
  dqy_ = qp_.array() * day_.array();
  lapq_ = qpp_.array() * (dax_.array().square() + day_.array().square()) +
          qp_.array() * lapa_.array();

  u = ((m_->W.transpose() * phi_) + (e.M2 * q_)).colwise() + e.b2;
  ux = m_->W.transpose() * dphix_ + e.M2 * dqx_;
  uy = m_->W.transpose() * dphiy_ + e.M2 * dqy_;
  lap = m_->W.transpose() * lapphi_ + e.M2 * lapq_;
  (void)B;
}

void ModelEvaluator::backward(const Eigen::Matrix2Xd& ubar,
                              const Eigen::Matrix2Xd& gxbar,
                              const Eigen::Matrix2Xd& gybar,
                              const Eigen::Matrix2Xd& lapbar,
                              ParameterGradient& grad) const {
  const auto& e = m_->eta;

  grad.W += phi_ * ubar.transpose() + dphix_ * gxbar.transpose() +
            dphiy_ * gybar.transpose() + lapphi_ * lapbar.transpose();
  grad.b2 += ubar.rowwise().sum();
  grad.M2 += ubar * q_.transpose() + gxbar * dqx_.transpose() +
             gybar * dqy_.transpose() + lapbar * lapq_.transpose();

  const Eigen::MatrixXd qbar = e.M2.transpose() * ubar;
  const Eigen::MatrixXd dqxbar = e.M2.transpose() * gxbar;
  const Eigen::MatrixXd dqybar = e.M2.transpose() * gybar;
  const Eigen::MatrixXd lapqbar = e.M2.transpose() * lapbar;

  const Eigen::MatrixXd da2 = dax_.array().square() + day_.array().square();
  const Eigen::MatrixXd abar =
      (qp_.array() * qbar.array() + qpp_.array() * dax_.array() * dqxbar.array() +
       qpp_.array() * day_.array() * dqybar.array() +
       (qppp_.array() * da2.array() + qpp_.array() * lapa_.array()) *
           lapqbar.array())
          .matrix();
  const Eigen::MatrixXd daxbar =
      (qp_.array() * dqxbar.array() +
       2.0 * qpp_.array() * dax_.array() * lapqbar.array())
          .matrix();
  const Eigen::MatrixXd daybar =
      (qp_.array() * dqybar.array() +
       2.0 * qpp_.array() * day_.array() * lapqbar.array())
          .matrix();
  const Eigen::MatrixXd lapabar = (qp_.array() * lapqbar.array()).matrix();

  grad.b1 += abar.rowwise().sum();
  grad.M1 += abar * z_.transpose() + daxbar * dzx_.transpose() +
             daybar * dzy_.transpose() + lapabar * lapz_.transpose();

  const Eigen::MatrixXd zbar = e.M1.transpose() * abar;
  const Eigen::MatrixXd dzxbar = e.M1.transpose() * daxbar;
  const Eigen::MatrixXd dzybar = e.M1.transpose() * daybar;
  const Eigen::MatrixXd lapzbar = e.M1.transpose() * lapabar;

  // z = phi . g and its derivatives; phi carries no parameters
  const Eigen::MatrixXd gbar =
      (phi_.array() * zbar.array() + dphix_.array() * dzxbar.array() +
       dphiy_.array() * dzybar.array() + lapphi_.array() * lapzbar.array())
          .matrix();
  const Eigen::MatrixXd dgxbar =
      (phi_.array() * dzxbar.array() + 2.0 * dphix_.array() * lapzbar.array())
          .matrix();
  const Eigen::MatrixXd dgybar =
      (phi_.array() * dzybar.array() + 2.0 * dphiy_.array() * lapzbar.array())
          .matrix();
  const Eigen::MatrixXd lapgbar = (phi_.array() * lapzbar.array()).matrix();

  // g = 1 + ag tanh(t); dg = ag Tp dt; lapg = ag(-2 T Tp p2 + Tp lapt)
  const double ag = e.alpha_g;
  const Eigen::ArrayXXd T = T_.array(), Tp = Tp_.array();
  const Eigen::MatrixXd tbar =
      (ag * Tp * gbar.array() +
       ag * (-2.0) * T * Tp *
           (dtx_.array() * dgxbar.array() + dty_.array() * dgybar.array()) +
       ag *
           ((-2.0) * (1.0 - 3.0 * T.square()) * Tp * p2_.array() +
            (-2.0) * T * Tp * lapt_.array()) *
           lapgbar.array())
          .matrix();
  const Eigen::MatrixXd dtxbar =
      (ag * Tp * dgxbar.array() +
       ag * (-2.0) * T * Tp * 2.0 * dtx_.array() * lapgbar.array())
          .matrix();
  const Eigen::MatrixXd dtybar =
      (ag * Tp * dgybar.array() +
       ag * (-2.0) * T * Tp * 2.0 * dty_.array() * lapgbar.array())
          .matrix();
  const Eigen::MatrixXd laptbar = (ag * Tp * lapgbar.array()).matrix();

  // t = G2 s1 + c2; dt = G2 (s1' . G1col); lapt = G2 (s1'' . rho1)
  const Eigen::VectorXd g1x = e.G1.col(0), g1y = e.G1.col(1);
  const Eigen::VectorXd rho1 = g1x.array().square() + g1y.array().square();
  const Eigen::MatrixXd sx = (s1p_.array().colwise() * g1x.array()).matrix();
  const Eigen::MatrixXd sy = (s1p_.array().colwise() * g1y.array()).matrix();
  const Eigen::MatrixXd sr = (s1pp_.array().colwise() * rho1.array()).matrix();

  grad.c2 += tbar.rowwise().sum();
  grad.G2 += tbar * s1_.transpose() + dtxbar * sx.transpose() +
             dtybar * sy.transpose() + laptbar * sr.transpose();

  const Eigen::MatrixXd s1bar = e.G2.transpose() * tbar;
  const Eigen::MatrixXd wx = e.G2.transpose() * dtxbar;
  const Eigen::MatrixXd wy = e.G2.transpose() * dtybar;
  const Eigen::MatrixXd vv = e.G2.transpose() * laptbar;

  const Eigen::MatrixXd z1bar =
      (s1p_.array() * s1bar.array() +
       (s1pp_.array().colwise() * g1x.array()) * wx.array() +
       (s1pp_.array().colwise() * g1y.array()) * wy.array() +
       (s1ppp_.array().colwise() * rho1.array()) * vv.array())
          .matrix();

  grad.c1 += z1bar.rowwise().sum();
  grad.G1 += z1bar * X_.transpose();
  grad.G1.col(0) += (s1p_.array() * wx.array()).rowwise().sum().matrix() +
                    (2.0 * g1x.array() *
                     (s1pp_.array() * vv.array()).rowwise().sum())
                        .matrix();
  grad.G1.col(1) += (s1p_.array() * wy.array()).rowwise().sum().matrix() +
                    (2.0 * g1y.array() *
                     (s1pp_.array() * vv.array()).rowwise().sum())
                        .matrix();
}

ClosedFormField model_field(const PlaneWaveModel& model) {
  // copy so the field owns its model
  auto m = std::make_shared<PlaneWaveModel>(model);
  auto eval_at = [m](const Eigen::VectorXd& x) {
    ModelEvaluator ev(*m);
    Eigen::Matrix2Xd X(2, 1);
    X(0, 0) = x[0];
    X(1, 0) = x[1];
    ev.forward(X);
    return ev;
  };
  ClosedFormField f;
  f.value = [eval_at](const Eigen::VectorXd& x) {
    const auto ev = eval_at(x);
    return Complex(ev.u(0, 0), ev.u(1, 0));
  };
  f.gradient = [eval_at](const Eigen::VectorXd& x) {
    const auto ev = eval_at(x);
    Eigen::VectorXcd g(2);
    g[0] = Complex(ev.ux(0, 0), ev.ux(1, 0));
    g[1] = Complex(ev.uy(0, 0), ev.uy(1, 0));
    return g;
  };
  f.laplacian = [eval_at](const Eigen::VectorXd& x) {
    const auto ev = eval_at(x);
    return Complex(ev.lap(0, 0), ev.lap(1, 0));
  };
  return f;
}

}  // namespace hvp
