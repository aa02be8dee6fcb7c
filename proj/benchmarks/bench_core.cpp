#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "forest/equilibria.hpp"
#include "forest/simulate.hpp"
#include "forest/special.hpp"
#include "forest/spectrum.hpp"

namespace {

forest::ModelParams model() {
  return forest::ModelParams(1.0, 0.0, forest::BetaFunction::nicholson(6.0),
                             forest::GrowthFunction::exp_decay(5.0));
}

void BM_exp_integral_e1(benchmark::State& state) {
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(forest::exp_integral_e1(x));
    x = x < 40.0 ? x * 1.1 : 0.1;
  }
}
BENCHMARK(BM_exp_integral_e1);

void BM_reproduction_R(benchmark::State& state) {
  auto m = model();
  for (auto _ : state) benchmark::DoNotOptimize(forest::reproduction_R(m, 1.0));
}
BENCHMARK(BM_reproduction_R);

void BM_find_equilibria(benchmark::State& state) {
  auto m = model();
  for (auto _ : state) benchmark::DoNotOptimize(forest::find_equilibria(m, 10.0, 100));
}
BENCHMARK(BM_find_equilibria)->Unit(benchmark::kMillisecond);

void BM_chi_evaluation(benchmark::State& state) {
  auto m = model();
  forest::CharacteristicEvaluator ev(m, 0.4783277035);
  const std::complex<double> lam(0.5, 1.5);
  ev.chi(lam);  // warm the cached kernel
  for (auto _ : state) benchmark::DoNotOptimize(ev.chi(lam));
}
BENCHMARK(BM_chi_evaluation);

void BM_dominant_real_root(benchmark::State& state) {
  auto m = model();
  for (auto _ : state) benchmark::DoNotOptimize(forest::dominant_real_root(m, 0.4783277035));
}
BENCHMARK(BM_dominant_real_root)->Unit(benchmark::kMillisecond);

void BM_functional_step(benchmark::State& state) {
  auto m = model();
  const double h = 0.05;
  std::vector<double> hist(601, 0.5);
  auto init = forest::InitialData::constant(0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(forest::apply_functional(m, hist, h, init, 1.0));
}
BENCHMARK(BM_functional_step);

void BM_short_simulation(benchmark::State& state) {
  auto m = model();
  auto grid = forest::Grid::create(0.1, 30.0, 30.0);
  auto init = forest::InitialData::constant(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(forest::run(m, grid, init));
}
BENCHMARK(BM_short_simulation)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
