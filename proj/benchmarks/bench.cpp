#include <cmath>

#include <benchmark/benchmark.h>

#include "rotflow/flow_checks.hpp"
#include "rotflow/flow_spec.hpp"
#include "rotflow/rigidity.hpp"
#include "rotflow/spectral.hpp"

using namespace rotflow;

namespace {

FlowSpec two_bump() {
  FlowSpec s;
  s.omega = 1.0;
  s.glue_radius = 3.0;
  s.bumps = {{{-1.5, 0.0}, RadialProfile::bump(0.1, 1.0, 10)},
             {{1.5, 0.0}, RadialProfile::bump(0.05, 1.0, 12)}};
  return s;
}

void BM_SpectralRhs(benchmark::State &st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const SpectralGrid g = SpectralGrid::make(n, 7.0);
  SpectralSolver solver(g);
  const VorticityState s = initial_state(ComposedFlow(two_bump()), g);
  for (auto _ : st) benchmark::DoNotOptimize(solver.rhs(s));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_SpectralRhs)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_SpectralStep(benchmark::State &st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const SpectralGrid g = SpectralGrid::make(n, 7.0);
  SpectralSolver solver(g);
  VorticityState s = initial_state(ComposedFlow(two_bump()), g);
  const double dt = solver.stable_dt(s, 1.0);
  for (auto _ : st) s = solver.step(s, dt);
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_SpectralStep)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_FieldSample(benchmark::State &st) {
  const ComposedFlow flow(two_bump());
  double t = 0.0;
  for (auto _ : st) {
    t += 0.618;
    benchmark::DoNotOptimize(flow.sample({2.5 * std::cos(t), 2.5 * std::sin(t)}));
  }
}
BENCHMARK(BM_FieldSample);

void BM_Residual(benchmark::State &st) {
  const ComposedFlow flow(two_bump());
  const GridSpec g = GridSpec::square(static_cast<std::size_t>(st.range(0)), 7.0);
  for (auto _ : st) benchmark::DoNotOptimize(residual_rotating(flow, g).normalized_max);
}
BENCHMARK(BM_Residual)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_SymmetrySet(benchmark::State &st) {
  const ComposedFlow flow(two_bump());
  SymmetrySetOptions o;
  o.r_max = 6.0;
  o.dr = 0.05;
  for (auto _ : st) benchmark::DoNotOptimize(estimate_symmetry_set(flow, o).intervals.size());
}
BENCHMARK(BM_SymmetrySet)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
