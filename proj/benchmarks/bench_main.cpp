#include <benchmark/benchmark.h>

#include "critwave/conformal.hpp"
#include "critwave/evolution.hpp"
#include "critwave/modulation.hpp"
#include "critwave/spectrum.hpp"
#include "critwave/stationary.hpp"

using namespace critwave;

static void BM_NegativeSpectrum(benchmark::State& state) {
  const auto W = sample_W(make_radial_grid(3, static_cast<std::size_t>(state.range(0)), 100.0));
  const auto op = assemble(W);
  for (auto _ : state) benchmark::DoNotOptimize(negative_spectrum(op));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NegativeSpectrum)->RangeMultiplier(4)->Range(4096, 131072)->Complexity()->Unit(benchmark::kMillisecond);

static void BM_Pushforward(benchmark::State& state) {
  const auto W = sample_W(make_radial_grid(3, 8000, 40.0));
  const auto box = make_cartesian_grid(3, 6.0, 12.0 / static_cast<double>(state.range(0)));
  auto A = GroupParams::identity(3);
  A.s = 0.05;
  A.a[0] = 0.02;
  A.b[1] = 0.1;
  A.c[2] = 0.03;
  for (auto _ : state) benchmark::DoNotOptimize(pushforward(A, W, box));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(box->size()));
}
BENCHMARK(BM_Pushforward)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_LeapfrogSteps(benchmark::State& state) {
  const auto g = make_radial_grid(3, static_cast<std::size_t>(state.range(0)), 40.0);
  const auto Wh = discrete_ground_state(g);
  const RadialField zero(g, std::vector<double>(g->size()));
  EvolutionOptions o;
  o.T = 100.0 * 0.5 * g->spacing();  // 100 steps
  o.stride = 100;
  for (auto _ : state) benchmark::DoNotOptimize(evolve_nonlinear(Wh, zero, o));
  state.SetItemsProcessed(state.iterations() * 100 * state.range(0));
}
BENCHMARK(BM_LeapfrogSteps)->Arg(1000)->Arg(8000)->Unit(benchmark::kMillisecond);

static void BM_ModeSystemRun(benchmark::State& state) {
  const std::vector<double> f{1.0, 1.4, 2.0};
  ModeSimOptions o;
  o.kind = ModeRunKind::bounded_decay;
  o.init = {1.0, 0.0, 0.0, -1.0, 0.0, 0.0};
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(ode_simulate(f, 0.05, seed++, o));
}
BENCHMARK(BM_ModeSystemRun)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
