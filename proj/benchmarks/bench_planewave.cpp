#include <benchmark/benchmark.h>

#include <hvp/objective.hpp>
#include <random>

using namespace hvp;

namespace {

PlaneWaveModel bench_model(int P, int R, double k) {
  const auto feats = build_features(P, R, k, 0.1);
  PlaneWaveModel m = init_model(feats, 32, 64, 0.05, 1, false);
  std::mt19937_64 rng(2);
  for (Eigen::Index i = 0; i < m.W.size(); ++i) {
    m.W.data()[i] = 0.1 * ((rng() >> 11) * 0x1.0p-53 - 0.5);
  }
  return m;
}

}  // namespace

static void BM_ObjectiveForward(benchmark::State& state) {
  const PlaneWaveModel m = bench_model(16, 2, 20.0);
  const Domain dom = Domain::unit_square();
  Eigen::VectorXd c(2);
  c << 0.5, 0.5;
  const auto f = fields::gaussian_bump(c, 1e-4, 400.0);
  std::mt19937_64 rng(3);
  const SampleSet s =
      draw_samples(dom, static_cast<int>(state.range(0)), 256, rng);
  for (auto _ : state) {
    auto t = mc_objective(m, f, {2.0, 50.0}, dom, s);
    benchmark::DoNotOptimize(t);
  }
}
BENCHMARK(BM_ObjectiveForward)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

static void BM_ObjectiveGradient(benchmark::State& state) {
  const PlaneWaveModel m = bench_model(16, 2, 20.0);
  const Domain dom = Domain::unit_square();
  Eigen::VectorXd c(2);
  c << 0.5, 0.5;
  const auto f = fields::gaussian_bump(c, 1e-4, 400.0);
  std::mt19937_64 rng(3);
  const SampleSet s =
      draw_samples(dom, static_cast<int>(state.range(0)), 256, rng);
  for (auto _ : state) {
    ParameterGradient g = ParameterGradient::zero(m);
    auto t = mc_objective_gradient(m, f, {2.0, 50.0}, dom, s, g);
    benchmark::DoNotOptimize(g);
    benchmark::DoNotOptimize(t);
  }
}
BENCHMARK(BM_ObjectiveGradient)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
