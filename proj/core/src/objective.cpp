#include "hvp/objective.hpp"

#include <cmath>
#include <thread>
#include <vector>

#include "hvp/errors.hpp"

namespace hvp {

namespace {

constexpr int kChunk = 512;

double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

struct ChunkResult {
  long double j_int = 0, j_bnd = 0, j_phys = 0, j_src = 0;
  ParameterGradient grad;
  bool with_grad = false;
};

// interior chunk: residual + physical + source terms and (optionally) their
// parameter gradient
void interior_chunk(const PlaneWaveModel& model, const ClosedFormField& f,
                    double k, double gamma1, double w_meas,
                    const Eigen::Matrix2Xd& X, ChunkResult& out) {
  const Eigen::Index B = X.cols();
  ModelEvaluator ev(model);
  ev.forward(X);

  Eigen::Matrix2Xd ubar = Eigen::Matrix2Xd::Zero(2, B);
  Eigen::Matrix2Xd gxbar = Eigen::Matrix2Xd::Zero(2, B);
  Eigen::Matrix2Xd gybar = Eigen::Matrix2Xd::Zero(2, B);
  Eigen::Matrix2Xd lapbar = Eigen::Matrix2Xd::Zero(2, B);

  for (Eigen::Index b = 0; b < B; ++b) {
    Eigen::VectorXd x(2);
    x[0] = X(0, b);
    x[1] = X(1, b);
    const Complex fx = f.value(x);
    const double uR = ev.u(0, b), uI = ev.u(1, b);
    const double rR = (-ev.lap(0, b) - k * k * uR) - fx.real();
    const double rI = (-ev.lap(1, b) - k * k * uI) - fx.imag();
    const double grad2 = ev.ux(0, b) * ev.ux(0, b) + ev.ux(1, b) * ev.ux(1, b) +
                         ev.uy(0, b) * ev.uy(0, b) + ev.uy(1, b) * ev.uy(1, b);
    out.j_int += (long double)(gamma1 * w_meas * (rR * rR + rI * rI));
    out.j_phys +=
        (long double)(0.5 * w_meas * (grad2 - k * k * (uR * uR + uI * uI)));
    out.j_src += (long double)(-w_meas * (fx.real() * uR + fx.imag() * uI));

    if (out.with_grad) {
      ubar(0, b) = -2.0 * gamma1 * w_meas * k * k * rR -
                   w_meas * k * k * uR - w_meas * fx.real();
      ubar(1, b) = -2.0 * gamma1 * w_meas * k * k * rI -
                   w_meas * k * k * uI - w_meas * fx.imag();
      gxbar(0, b) = w_meas * ev.ux(0, b);
      gxbar(1, b) = w_meas * ev.ux(1, b);
      gybar(0, b) = w_meas * ev.uy(0, b);
      gybar(1, b) = w_meas * ev.uy(1, b);
      lapbar(0, b) = -2.0 * gamma1 * w_meas * rR;
      lapbar(1, b) = -2.0 * gamma1 * w_meas * rI;
    }
  }
  if (out.with_grad) ev.backward(ubar, gxbar, gybar, lapbar, out.grad);
}

void boundary_chunk(const PlaneWaveModel& model, double k, double gamma_bnd,
                    double w_meas, const Eigen::Matrix2Xd& Y,
                    const Eigen::Matrix2Xd& N, ChunkResult& out) {
  const Eigen::Index B = Y.cols();
  ModelEvaluator ev(model);
  ev.forward(Y);

  Eigen::Matrix2Xd ubar = Eigen::Matrix2Xd::Zero(2, B);
  Eigen::Matrix2Xd gxbar = Eigen::Matrix2Xd::Zero(2, B);
  Eigen::Matrix2Xd gybar = Eigen::Matrix2Xd::Zero(2, B);
  const Eigen::Matrix2Xd lapbar = Eigen::Matrix2Xd::Zero(2, B);

  for (Eigen::Index b = 0; b < B; ++b) {
    const double nx = N(0, b), ny = N(1, b);
    const double dnR = ev.ux(0, b) * nx + ev.uy(0, b) * ny;
    const double dnI = ev.ux(1, b) * nx + ev.uy(1, b) * ny;
    const double sR = dnR + k * ev.u(1, b);
    const double sI = dnI - k * ev.u(0, b);
    out.j_bnd += (long double)(gamma_bnd * w_meas * (sR * sR + sI * sI));
    if (out.with_grad) {
      const double c = 2.0 * gamma_bnd * w_meas;
      ubar(0, b) = -c * sI * k;
      ubar(1, b) = c * sR * k;
      gxbar(0, b) = c * sR * nx;
      gybar(0, b) = c * sR * ny;
      gxbar(1, b) = c * sI * nx;
      gybar(1, b) = c * sI * ny;
    }
  }
  if (out.with_grad) ev.backward(ubar, gxbar, gybar, lapbar, out.grad);
}

ObjectiveTerms run_objective(const PlaneWaveModel& model,
                             const ClosedFormField& f,
                             const ObjectiveWeights& weights,
                             const Domain& domain, const SampleSet& samples,
                             ParameterGradient* grad, int threads) {
  const double k = model.features.k;
  const int N = static_cast<int>(samples.interior.cols());
  const int M = static_cast<int>(samples.boundary.cols());
  if (N == 0 || M == 0) throw InvalidParams("sample sets must be nonempty");
  const double w_int = domain.measure() / N;
  const double w_bnd = domain.boundary_measure() / M;

  struct Task {
    bool boundary;
    int begin, count;
  };
  std::vector<Task> tasks;
  for (int b = 0; b < N; b += kChunk) {
    tasks.push_back({false, b, std::min(kChunk, N - b)});
  }
  for (int b = 0; b < M; b += kChunk) {
    tasks.push_back({true, b, std::min(kChunk, M - b)});
  }

  std::vector<ChunkResult> results(tasks.size());
  auto run_task = [&](size_t ti) {
    ChunkResult& r = results[ti];
    r.with_grad = grad != nullptr;
    if (r.with_grad) r.grad = ParameterGradient::zero(model);
    const Task& t = tasks[ti];
    if (!t.boundary) {
      interior_chunk(model, f, k, weights.gamma1, w_int,
                     samples.interior.middleCols(t.begin, t.count), r);
    } else {
      boundary_chunk(model, k, weights.gamma_bnd, w_bnd,
                     samples.boundary.middleCols(t.begin, t.count),
                     samples.normals.middleCols(t.begin, t.count), r);
    }
  };

  if (threads <= 1 || tasks.size() <= 1) {
    for (size_t ti = 0; ti < tasks.size(); ++ti) run_task(ti);
  } else {
    const int nw = std::min<int>(threads, static_cast<int>(tasks.size()));
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int w = 0; w < nw; ++w) {
      pool.emplace_back([&] {
        for (size_t ti = next.fetch_add(1); ti < tasks.size();
             ti = next.fetch_add(1)) {
          run_task(ti);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // fixed-order reduction over chunks keeps results bit-stable
  long double j_int = 0, j_bnd = 0, j_phys = 0, j_src = 0;
  for (size_t ti = 0; ti < results.size(); ++ti) {
    j_int += results[ti].j_int;
    j_bnd += results[ti].j_bnd;
    j_phys += results[ti].j_phys;
    j_src += results[ti].j_src;
    if (grad) grad->add_scaled(results[ti].grad, 1.0);
  }

  ObjectiveTerms terms;
  terms.interior_residual = static_cast<double>(j_int);
  terms.boundary_residual = static_cast<double>(j_bnd);
  terms.physical = static_cast<double>(j_phys);
  terms.source = static_cast<double>(j_src);
  return terms;
}

}  // namespace

SampleSet draw_samples(const Domain& domain, int n_interior, int n_boundary,
                       std::mt19937_64& rng) {
  if (domain.dim() != 2) throw InvalidParams("sampling supports 2D domains");
  SampleSet s;
  s.interior.resize(2, n_interior);
  for (int i = 0; i < n_interior; ++i) {
    s.interior(0, i) =
        domain.lower(0) + uniform01(rng) * domain.extent(0);
    s.interior(1, i) =
        domain.lower(1) + uniform01(rng) * domain.extent(1);
  }
  s.boundary.resize(2, n_boundary);
  s.normals.resize(2, n_boundary);
  const double wx = domain.extent(0), wy = domain.extent(1);
  const double per = 2.0 * (wx + wy);
  for (int i = 0; i < n_boundary; ++i) {
    double t = uniform01(rng) * per;
    double x, y, nx, ny;
    if (t < wx) {  // bottom
      x = domain.lower(0) + t;
      y = domain.lower(1);
      nx = 0;
      ny = -1;
    } else if (t < wx + wy) {  // right
      x = domain.upper(0);
      y = domain.lower(1) + (t - wx);
      nx = 1;
      ny = 0;
    } else if (t < 2 * wx + wy) {  // top
      x = domain.lower(0) + (t - wx - wy);
      y = domain.upper(1);
      nx = 0;
      ny = 1;
    } else {  // left
      x = domain.lower(0);
      y = domain.lower(1) + (t - 2 * wx - wy);
      nx = -1;
      ny = 0;
    }
    s.boundary(0, i) = x;
    s.boundary(1, i) = y;
    s.normals(0, i) = nx;
    s.normals(1, i) = ny;
  }
  return s;
}

ObjectiveTerms mc_objective(const PlaneWaveModel& model,
                            const ClosedFormField& f,
                            const ObjectiveWeights& weights,
                            const Domain& domain, const SampleSet& samples,
                            int threads) {
  return run_objective(model, f, weights, domain, samples, nullptr, threads);
}

ObjectiveTerms mc_objective_gradient(const PlaneWaveModel& model,
                                     const ClosedFormField& f,
                                     const ObjectiveWeights& weights,
                                     const Domain& domain,
                                     const SampleSet& samples,
                                     ParameterGradient& grad, int threads) {
  return run_objective(model, f, weights, domain, samples, &grad, threads);
}

double mc_standard_error(const PlaneWaveModel& model, const ClosedFormField& f,
                         const ObjectiveWeights& weights, const Domain& domain,
                         const SampleSet& samples) {
  const double k = model.features.k;
  const int N = static_cast<int>(samples.interior.cols());
  const int M = static_cast<int>(samples.boundary.cols());
  const double measure = domain.measure();
  const double bmeasure = domain.boundary_measure();

  ModelEvaluator ev(model);
  ev.forward(samples.interior);
  long double sum = 0, sum2 = 0;
  for (int b = 0; b < N; ++b) {
    Eigen::VectorXd x(2);
    x[0] = samples.interior(0, b);
    x[1] = samples.interior(1, b);
    const Complex fx = f.value(x);
    const double uR = ev.u(0, b), uI = ev.u(1, b);
    const double rR = (-ev.lap(0, b) - k * k * uR) - fx.real();
    const double rI = (-ev.lap(1, b) - k * k * uI) - fx.imag();
    const double grad2 = ev.ux(0, b) * ev.ux(0, b) + ev.ux(1, b) * ev.ux(1, b) +
                         ev.uy(0, b) * ev.uy(0, b) + ev.uy(1, b) * ev.uy(1, b);
    const double v = weights.gamma1 * (rR * rR + rI * rI) +
                     0.5 * (grad2 - k * k * (uR * uR + uI * uI)) -
                     (fx.real() * uR + fx.imag() * uI);
    sum += v;
    sum2 += (long double)v * v;
  }
  const double mean_i = static_cast<double>(sum / N);
  const double var_i =
      std::max(0.0, static_cast<double>(sum2 / N) - mean_i * mean_i);

  ModelEvaluator evb(model);
  evb.forward(samples.boundary);
  long double bsum = 0, bsum2 = 0;
  for (int b = 0; b < M; ++b) {
    const double nx = samples.normals(0, b), ny = samples.normals(1, b);
    const double sR = evb.ux(0, b) * nx + evb.uy(0, b) * ny + k * evb.u(1, b);
    const double sI = evb.ux(1, b) * nx + evb.uy(1, b) * ny - k * evb.u(0, b);
    const double v = weights.gamma_bnd * (sR * sR + sI * sI);
    bsum += v;
    bsum2 += (long double)v * v;
  }
  const double mean_b = static_cast<double>(bsum / M);
  const double var_b =
      std::max(0.0, static_cast<double>(bsum2 / M) - mean_b * mean_b);

  return std::sqrt(measure * measure * var_i / N +
                   bmeasure * bmeasure * var_b / M);
}

}  // namespace hvp
