#include <benchmark/benchmark.h>

#include "geoanneal/bench.hpp"
#include "geoanneal/exactsim.hpp"
#include "geoanneal/fluctuations.hpp"
#include "geoanneal/meanfield.hpp"
#include "geoanneal/schedule.hpp"

using namespace geoanneal;

namespace {

void BM_TrotterLinear(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto inst = generate_sk(n, 1);
  const auto lin = linear_schedule();
  for (auto _ : state) {
    auto psi = trotter_evolve(inst, lin, 128.0, 1024, 2);
    benchmark::DoNotOptimize(psi.amplitudes().data());
  }
  state.SetItemsProcessed(state.iterations() * 1024 * (std::int64_t{1} << n));
}
BENCHMARK(BM_TrotterLinear)->DenseRange(8, 14, 2)->Unit(benchmark::kMillisecond);

void BM_MeanField(benchmark::State& state) {
  const auto inst = generate_sk(static_cast<std::size_t>(state.range(0)), 1);
  const auto lin = linear_schedule();
  for (auto _ : state) {
    auto traj = integrate_meanfield(inst, lin, 128.0);
    benchmark::DoNotOptimize(traj.final_spins().data());
  }
}
BENCHMARK(BM_MeanField)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_Fluctuations(benchmark::State& state) {
  const auto inst = generate_sk(static_cast<std::size_t>(state.range(0)), 1);
  const auto traj = integrate_meanfield(inst, linear_schedule(), 128.0);
  for (auto _ : state) {
    auto rec = evolve_statistical_function(inst, traj);
    benchmark::DoNotOptimize(rec.chi.data());
  }
}
BENCHMARK(BM_Fluctuations)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond)->Iterations(3);

void BM_SpectralGap(benchmark::State& state) {
  const auto inst = generate_sk(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_gap(inst, 0.5));
}
BENCHMARK(BM_SpectralGap)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);

void BM_Geodesic(benchmark::State& state) {
  GeodesicParams p;
  p.center = 0.62;
  for (auto _ : state) {
    auto g = solve_geodesic(p);
    benchmark::DoNotOptimize(g.samples().data());
  }
}
BENCHMARK(BM_Geodesic)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
