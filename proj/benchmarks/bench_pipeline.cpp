#include <benchmark/benchmark.h>

#include "microgrid/config.hpp"
#include "microgrid/der.hpp"
#include "microgrid/mpc.hpp"

using namespace microgrid;

namespace {

void bm_population_day(benchmark::State& state) {
  const RunConfig cfg = default_config();
  const Population pop = make_population(cfg.population, 1);
  const std::vector<double> prices(24, 15.0);
  for (auto _ : state) {
    const PopulationTrace t = simulate_population(pop, prices);
    benchmark::DoNotOptimize(t.soc_total());
  }
}

void bm_scenario_day(benchmark::State& state) {
  RunConfig cfg = default_config();
  cfg.scenario = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const RunReport r = run_scenario(cfg);
    benchmark::DoNotOptimize(r.total_cost);
  }
}

}  // namespace

BENCHMARK(bm_population_day)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_scenario_day)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kSecond);
