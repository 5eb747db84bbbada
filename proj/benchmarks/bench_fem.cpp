#include <benchmark/benchmark.h>

#include <hvp/fem.hpp>

using namespace hvp;

static void BM_AssembleBfs(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto sp =
      build_space(Domain::unit_square(), 1.0 / n, Element::bogner_fox_schmit_2d);
  EnergyParams p = EnergyParams::for_domain(sp.domain());
  p.k = 10.0;
  const auto f = fields::constant(1.0);
  for (auto _ : state) {
    auto sys = assemble(sp, p, f, {});
    benchmark::DoNotOptimize(sys.rhs);
  }
  state.SetLabel(std::to_string(sp.dofs()) + " dofs");
}
BENCHMARK(BM_AssembleBfs)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_SolveBfs(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto sp =
      build_space(Domain::unit_square(), 1.0 / n, Element::bogner_fox_schmit_2d);
  EnergyParams p = EnergyParams::for_domain(sp.domain());
  p.k = 10.0;
  const auto sys = assemble(sp, p, fields::constant(1.0), {});
  for (auto _ : state) {
    auto x = solve(sys);
    benchmark::DoNotOptimize(x);
  }
  state.SetLabel(std::to_string(sp.dofs()) + " dofs");
}
BENCHMARK(BM_SolveBfs)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_Assemble1d(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto sp = build_space(Domain::interval(0, 1), 1.0 / n,
                              Element::quintic_hermite_1d);
  EnergyParams p = select_parameters(1, 1.0, 0.5);
  p.k = M_PI;
  const auto f = fields::constant(1.0);
  for (auto _ : state) {
    auto sys = assemble(sp, p, f, {});
    benchmark::DoNotOptimize(sys.rhs);
  }
}
BENCHMARK(BM_Assemble1d)->Arg(32)->Arg(128)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
