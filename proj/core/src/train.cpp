#include "hvp/train.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <deque>

#include "hvp/errors.hpp"

namespace hvp {

namespace {

constexpr int kChunk = 512;

}  // namespace

Eigen::MatrixXd ls_init(const PlaneWaveFeatures& features,
                        const ClosedFormField& f, double boundary_weight,
                        double ridge, const SampleSet& samples) {
  if (!(ridge > 0.0)) throw InvalidParams("ls_init requires ridge > 0");
  const int D = features.count();
  const int n2 = 2 * D;
  const double k = features.k;
  // extended-precision accumulation: the normal equations square the sample
  // matrix conditioning, which double cannot carry to the 1e-10 contract
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using VecL = Eigen::Vector<long double, Eigen::Dynamic>;
  MatL N = MatL::Zero(n2, n2);
  VecL y = VecL::Zero(n2);

  const int NI = static_cast<int>(samples.interior.cols());
  const int NB = static_cast<int>(samples.boundary.cols());

  // interior rows: [L Phi, 0] -> Re f and [0, L Phi] -> Im f.
  // The two blocks never mix, so accumulate the D x D block once.
  Eigen::MatrixXd phi, dpx, dpy, lap;
  for (int b0 = 0; b0 < NI; b0 += kChunk) {
    const int nb = std::min(kChunk, NI - b0);
    features.eval(samples.interior.middleCols(b0, nb), phi, dpx, dpy, lap);
    MatL lphi(D, nb);
    for (int b = 0; b < nb; ++b) {
      lphi.col(b) =
          (-lap.col(b) - k * k * phi.col(b)).cast<long double>();
    }
    const MatL blk = lphi * lphi.transpose();
    N.topLeftCorner(D, D) += blk;
    N.bottomRightCorner(D, D) += blk;
    for (int b = 0; b < nb; ++b) {
      Eigen::VectorXd x(2);
      x[0] = samples.interior(0, b0 + b);
      x[1] = samples.interior(1, b0 + b);
      const Complex fx = f.value(x);
      y.head(D) += (long double)fx.real() * lphi.col(b);
      y.tail(D) += (long double)fx.imag() * lphi.col(b);
    }
  }

  // boundary rows (weight w): [dnPhi, k Phi] -> 0 and [-k Phi, dnPhi] -> 0
  const long double w = boundary_weight;
  for (int b0 = 0; b0 < NB; b0 += kChunk) {
    const int nb = std::min(kChunk, NB - b0);
    features.eval(samples.boundary.middleCols(b0, nb), phi, dpx, dpy, lap);
    MatL dn(D, nb);
    for (int b = 0; b < nb; ++b) {
      dn.col(b) = (samples.normals(0, b0 + b) * dpx.col(b) +
                   samples.normals(1, b0 + b) * dpy.col(b))
                      .cast<long double>();
    }
    const MatL phil = phi.cast<long double>();
    const MatL gg = dn * dn.transpose();
    const MatL pp = phil * phil.transpose();
    const MatL gp = dn * phil.transpose();
    // [g, kp] block and [-kp, g] block stacked
    N.topLeftCorner(D, D) += w * (gg + (long double)(k * k) * pp);
    N.bottomRightCorner(D, D) += w * (gg + (long double)(k * k) * pp);
    N.topRightCorner(D, D) += w * (long double)k * (gp - gp.transpose());
    N.bottomLeftCorner(D, D) += w * (long double)k * (gp.transpose() - gp);
    // targets are zero; nothing to add to y
  }

  N.diagonal().array() += (long double)ridge;
  Eigen::LDLT<MatL> ldlt(N);
  if (ldlt.info() != Eigen::Success) {
    throw SingularSystem("ls_init normal matrix not factorisable");
  }
  const VecL wv = ldlt.solve(y);
  if (!wv.allFinite()) {
    throw SingularSystem("ls_init produced non-finite coefficients");
  }
  Eigen::MatrixXd W(D, 2);
  for (int d = 0; d < D; ++d) {
    W(d, 0) = static_cast<double>(wv[d]);
    W(d, 1) = static_cast<double>(wv[D + d]);
  }
  return W;
}

namespace {

// flattened view over the trainable parameters, honoring freeze masks
struct ParamView {
  std::vector<Eigen::Map<Eigen::VectorXd>> blocks;

  static ParamView of_model(PlaneWaveModel& m, bool linear_only,
                            bool mixer_only) {
    ParamView v;
    auto add = [&v](Eigen::MatrixXd& mat) {
      v.blocks.emplace_back(mat.data(), mat.size());
    };
    auto addv = [&v](Eigen::VectorXd& vec) {
      v.blocks.emplace_back(vec.data(), vec.size());
    };
    if (!mixer_only) add(m.W);
    if (!linear_only) {
      if (!mixer_only) {
        add(m.eta.G1);
        addv(m.eta.c1);
        add(m.eta.G2);
        addv(m.eta.c2);
      }
      add(m.eta.M1);
      addv(m.eta.b1);
      add(m.eta.M2);
      addv(m.eta.b2);
    }
    return v;
  }

  static ParamView of_grad(ParameterGradient& g, bool linear_only,
                           bool mixer_only) {
    ParamView v;
    auto add = [&v](Eigen::MatrixXd& mat) {
      v.blocks.emplace_back(mat.data(), mat.size());
    };
    auto addv = [&v](Eigen::VectorXd& vec) {
      v.blocks.emplace_back(vec.data(), vec.size());
    };
    if (!mixer_only) add(g.W);
    if (!linear_only) {
      if (!mixer_only) {
        add(g.G1);
        addv(g.c1);
        add(g.G2);
        addv(g.c2);
      }
      add(g.M1);
      addv(g.b1);
      add(g.M2);
      addv(g.b2);
    }
    return v;
  }

  Eigen::Index size() const {
    Eigen::Index n = 0;
    for (const auto& b : blocks) n += b.size();
    return n;
  }
  Eigen::VectorXd to_vector() const {
    Eigen::VectorXd out(size());
    Eigen::Index at = 0;
    for (const auto& b : blocks) {
      out.segment(at, b.size()) = b;
      at += b.size();
    }
    return out;
  }
  void from_vector(const Eigen::VectorXd& v) {
    Eigen::Index at = 0;
    for (auto& b : blocks) {
      b = v.segment(at, b.size());
      at += b.size();
    }
  }
};

// limited-memory BFGS with Armijo backtracking on a frozen deterministic batch
void lbfgs_mixer(PlaneWaveModel& model, const ClosedFormField& f,
                 const ObjectiveWeights& weights, const Domain& domain,
                 const SampleSet& frozen, int iterations, int threads) {
  auto eval = [&](Eigen::VectorXd* grad_out) {
    ParameterGradient g = ParameterGradient::zero(model);
    const ObjectiveTerms t =
        mc_objective_gradient(model, f, weights, domain, frozen, g, threads);
    if (grad_out) {
      ParamView gv = ParamView::of_grad(g, false, true);
      *grad_out = gv.to_vector();
    }
    return t.total();
  };

  ParamView pv = ParamView::of_model(model, false, true);
  Eigen::VectorXd x = pv.to_vector();
  Eigen::VectorXd grad(x.size());
  double fx = eval(&grad);

  const int mem = 10;
  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;

  for (int it = 0; it < iterations; ++it) {
    // two-loop recursion
    Eigen::VectorXd q = grad;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      const double gamma = s_hist.back().dot(y_hist.back()) /
                           y_hist.back().squaredNorm();
      q *= gamma;
    }
    for (size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    Eigen::VectorXd dir = -q;
    double gd = grad.dot(dir);
    if (gd >= 0.0) {  // not a descent direction; restart from steepest
      dir = -grad;
      gd = -grad.squaredNorm();
    }

    double step = 1.0;
    const double c1 = 1e-4;
    Eigen::VectorXd x_new;
    double f_new = fx;
    bool ok = false;
    for (int ls = 0; ls < 30; ++ls) {
      x_new = x + step * dir;
      pv.from_vector(x_new);
      f_new = eval(nullptr);
      if (f_new <= fx + c1 * step * gd) {
        ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!ok) {
      pv.from_vector(x);
      break;
    }
    Eigen::VectorXd grad_new(x.size());
    pv.from_vector(x_new);
    f_new = eval(&grad_new);

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd yv = grad_new - grad;
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(yv);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > mem) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    x = x_new;
    grad = grad_new;
    fx = f_new;
    if (grad.norm() < 1e-12) break;
  }
  pv.from_vector(x);
}

}  // namespace

TrainState train(PlaneWaveModel model, const ClosedFormField& f,
                 const ObjectiveWeights& weights, const Domain& domain,
                 const TrainSchedule& sched, unsigned seed, int threads,
                 const SnapshotCallback& snapshot) {
  TrainState state;
  state.seed = seed;
  std::mt19937_64 rng(seed);

  const bool linear_only = sched.train_linear_only;
  ParamView pv = ParamView::of_model(model, linear_only, false);
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(pv.size());
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(pv.size());

  double initial_scale = 0.0;
  for (int it = 0; it < sched.iterations; ++it) {
    if (snapshot) snapshot(it, model);
    const SampleSet samples = draw_samples(domain, sched.batch_interior,
                                           sched.batch_boundary, rng);
    ParameterGradient g = ParameterGradient::zero(model);
    const ObjectiveTerms terms =
        mc_objective_gradient(model, f, weights, domain, samples, g, threads);
    const double loss = terms.total();
    state.loss_history.push_back(loss);
    state.interior_history.push_back(terms.interior_residual);
    if (it == 0) {
      initial_scale = 1e3 * (std::abs(loss) + 1e-9);
    } else if (std::abs(loss) > initial_scale) {
      throw Diverged("training loss exceeded 1e3 x its initial value");
    }

    // cosine-annealed step
    const double frac =
        sched.iterations > 1 ? double(it) / double(sched.iterations - 1) : 0.0;
    const double lr = sched.lr_min + 0.5 * (sched.lr - sched.lr_min) *
                                         (1.0 + std::cos(M_PI * frac));

    ParamView gv = ParamView::of_grad(g, linear_only, false);
    const Eigen::VectorXd gvec = gv.to_vector();
    Eigen::VectorXd x = pv.to_vector();
    const double b1 = sched.adam_beta1, b2 = sched.adam_beta2;
    m1 = b1 * m1 + (1.0 - b1) * gvec;
    m2 = b2 * m2 + (1.0 - b2) * gvec.cwiseProduct(gvec);
    const double bc1 = 1.0 - std::pow(b1, it + 1);
    const double bc2 = 1.0 - std::pow(b2, it + 1);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double mhat = m1[i] / bc1;
      const double vhat = m2[i] / bc2;
      x[i] -= lr * mhat / (std::sqrt(vhat) + sched.adam_eps);
    }
    pv.from_vector(x);
    state.iterations_run = it + 1;
  }

  if (sched.lbfgs_iterations > 0 && !linear_only) {
    const SampleSet frozen =
        draw_samples(domain, sched.lbfgs_batch_interior,
                     sched.lbfgs_batch_boundary, rng);
    lbfgs_mixer(model, f, weights, domain, frozen, sched.lbfgs_iterations,
                threads);
  }

  state.model = std::move(model);
  return state;
}

}  // namespace hvp
