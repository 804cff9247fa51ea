#include <benchmark/benchmark.h>

#include "emcredit/default_curve.hpp"
#include "emcredit/rng.hpp"
#include "emcredit/simulate.hpp"

namespace {

using namespace emcredit;

void BM_PhiloxBlock(benchmark::State& state) {
  std::uint32_t i = 0;
  for (auto _ : state) {
    auto out = rng::Philox4x32::block({i++, 1, 2, 3}, 42, 43);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_PhiloxBlock);

void BM_NormalDraw(benchmark::State& state) {
  const rng::Stream stream(7, 0, rng::Driver::kGauss, 0);
  std::uint32_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(stream.normal(i++));
}
BENCHMARK(BM_NormalDraw);

void BM_SimulatePaths(benchmark::State& state) {
  const ProcessParams params(0.32, 0.5, 0.25);
  const double barriers[] = {1.0, 1.2};
  PathConfig cfg{10.0, 1.0 / 250.0, static_cast<std::size_t>(state.range(0)), 9, false, 1};
  for (auto _ : state) {
    auto rec = simulate_crossings(params, barriers, cfg);
    benchmark::DoNotOptimize(rec.first_passage.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulatePaths)->Arg(1000)->Arg(4000);

void BM_ParSpread(benchmark::State& state) {
  DefaultCurve curve;
  for (int m = 1; m <= 120; ++m) {
    const double t = m / 12.0;
    curve.grid.push_back(t);
    curve.p.push_back(1.0 - std::exp(-0.05 * t));
    curve.se.push_back(0.001);
  }
  curve.n_paths = 100000;
  const auto disc = DiscountCurve::flat(0.02);
  for (auto _ : state)
    benchmark::DoNotOptimize(par_spread(curve, disc, RecoveryAssumption{}, 10.0));
}
BENCHMARK(BM_ParSpread);

}  // namespace

BENCHMARK_MAIN();
