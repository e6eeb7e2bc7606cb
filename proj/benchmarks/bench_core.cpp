#include "bhd/delocalization.hpp"
#include "bhd/floquet.hpp"
#include "bhd/scrambling.hpp"
#include "bhd/semiclassical.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

using namespace bhd;

namespace {

DriveProtocol drive(int n, double omega) { return DriveProtocol::from_nu(n, -1.0, 1.0, 1.5, omega); }

void BM_ExpmApply(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto h = hamiltonian_at(drive(n, 0.5), 0.0, SpinOperators(n));
  Matrix block = Matrix::Random(n + 1, 4);
  for (auto _ : state) {
    expm_apply(h, 0.01, block);
    benchmark::DoNotOptimize(block.data());
  }
  state.SetItemsProcessed(state.iterations() * 4);
}
BENCHMARK(BM_ExpmApply)->Arg(100)->Arg(300)->Arg(1000);

void BM_CoherentState(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(coherent_state(n, {1.1, 0.4}));
}
BENCHMARK(BM_CoherentState)->Arg(300)->Arg(1000);

void BM_OnePeriodSectors(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SpinOperators ops(n);
  Parity parity(n);
  const auto d = drive(n, 7.0);
  for (auto _ : state) benchmark::DoNotOptimize(one_period_propagator_sectors(d, ops, parity));
}
BENCHMARK(BM_OnePeriodSectors)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_FloquetDecompose(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SpinOperators ops(n);
  Parity parity(n);
  const auto u = one_period_propagator_sectors(drive(n, 7.0), ops, parity);
  for (auto _ : state) benchmark::DoNotOptimize(floquet_decompose(u, 7.0));
}
BENCHMARK(BM_FloquetDecompose)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_FotocVariance(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const BlochAngles a{0.5 * std::numbers::pi, 0.0};
  SpinOperators ops(n);
  const auto psi = coherent_state(n, a);
  const auto w = local_generator(a, ops);
  const auto times = uniform_times(5.0, 0.1);
  FotocOptions o;
  o.steps_per_period = 256;
  for (auto _ : state) benchmark::DoNotOptimize(fotoc_variance(psi, w, drive(n, 0.5), 1e-2, times, o));
}
BENCHMARK(BM_FotocVariance)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_ClassicalPeriod(benchmark::State& state) {
  const auto d = drive(1, 0.5);
  ClassicalState s{0.2, 0.7};
  for (auto _ : state) {
    s = flow_with_tangent(s, d, 0.0, d.period()).state;
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_ClassicalPeriod);

void BM_CoherentEntropyMap(benchmark::State& state) {
  const int n = 300;
  SpinOperators ops(n);
  Parity parity(n);
  const auto decomp = floquet_decompose(one_period_propagator_sectors(drive(n, 7.0), ops, parity), 7.0);
  const auto pts = PhaseSpaceGrid{21, 20}.points();
  for (auto _ : state) benchmark::DoNotOptimize(coherent_entropy_map(pts, decomp));
}
BENCHMARK(BM_CoherentEntropyMap)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
