#include <benchmark/benchmark.h>

#include "confound/ensemble.hpp"
#include "confound/glm.hpp"
#include "confound/metamodel.hpp"

namespace {

confound::ModelParams params_for(int k, std::int64_t n) {
  confound::ModelParams p;
  p.p = 0.7;
  p.k = k;
  p.n_respondents = n;
  p.seed = 1;
  return p;
}

void BM_DrawPopulation(benchmark::State& state) {
  const auto params = params_for(static_cast<int>(state.range(0)), 10000);
  std::uint32_t realization = 0;
  for (auto _ : state) {
    auto m = confound::draw_population(params, params.column_count(), realization++);
    benchmark::DoNotOptimize(m);
  }
  state.SetItemsProcessed(state.iterations() * 10000 * static_cast<std::int64_t>(params.column_count()));
}
BENCHMARK(BM_DrawPopulation)->Arg(2)->Arg(9);

void BM_FitLogistic(benchmark::State& state) {
  const auto params = params_for(static_cast<int>(state.range(0)), state.range(1));
  const auto m = confound::draw_population(params, params.column_count());
  const auto y = confound::population_response(m);
  const auto x = confound::population_design(m, true);
  for (auto _ : state) {
    auto fit = confound::fit_logistic(y, x);
    benchmark::DoNotOptimize(fit);
  }
}
BENCHMARK(BM_FitLogistic)->Args({2, 10000})->Args({9, 10000})->Args({3, 200000})->Unit(benchmark::kMillisecond);

void BM_RunEnsemble(benchmark::State& state) {
  const auto params = params_for(3, 10000);
  confound::EnsembleOptions opts;
  opts.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    auto s = confound::run_ensemble(params, 20, opts);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_RunEnsemble)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
