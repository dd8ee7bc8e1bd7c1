#include <benchmark/benchmark.h>

#include "pairstat/metrics.hpp"
#include "pairstat/oracle.hpp"
#include "pairstat/polarization_rates.hpp"
#include "pairstat/tomography.hpp"

using namespace pairstat;

namespace {

// Series cost grows with the truncation index, i.e. with μ.
void BM_CoincidenceSeries(benchmark::State& state) {
  const double mu = state.range(0) / 100.0;
  const DetectorModel det{0.1, 1e-4};
  const PairSource src(SourceKind::IndisEntangled, mu);
  for (auto _ : state) {
    benchmark::DoNotOptimize(coincidence_rate(src, Setting::Hplus, det, det).value);
  }
}
BENCHMARK(BM_CoincidenceSeries)->Arg(1)->Arg(10)->Arg(100)->Arg(500);

void BM_ExactVisibility(benchmark::State& state) {
  const DetectorModel det{0.1, 0.0};
  const PairSource src(SourceKind::DisEntangled, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(visibility_exact(src, det, det).visibility);
}
BENCHMARK(BM_ExactVisibility);

void BM_Tomography(benchmark::State& state) {
  const DetectorModel det{0.1, 0.0};
  const auto r = assemble_r(PairSource(SourceKind::IndisEntangled, 0.3), det, det, {}, RateMethod::ExactSeries);
  for (auto _ : state) benchmark::DoNotOptimize(concurrence(reconstruct(r)));
}
BENCHMARK(BM_Tomography);

void BM_OptimizeMu(benchmark::State& state) {
  const DetectorModel det{0.01, 1e-5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize_mu(SourceKind::IndisEntangled, det, det, Objective::MaxVisibility, {}).mu);
  }
}
BENCHMARK(BM_OptimizeMu);

void BM_Enumeration(benchmark::State& state) {
  const DetectorModel det{0.5, 1e-3};
  const PairSource src(SourceKind::IndisEntangled, 0.2);
  const int depth = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle::enumerate_rate(src, oracle::Quantity::Hplus, det, det, depth).value);
  }
}
BENCHMARK(BM_Enumeration)->Arg(6)->Arg(10)->Arg(14);

void BM_MonteCarlo(benchmark::State& state) {
  const DetectorModel det{0.5, 1e-3};
  const PairSource src(SourceKind::IndisEntangled, 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        oracle::mc_rate(src, oracle::Quantity::Hplus, det, det, 1 << 20, 1, HplusModel::Coherent, 1).mean);
  }
  state.SetItemsProcessed(state.iterations() * (1 << 20));
}
BENCHMARK(BM_MonteCarlo)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
