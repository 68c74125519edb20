#include <benchmark/benchmark.h>

#include "microgrid/config.hpp"
#include "microgrid/dispatch.hpp"
#include "microgrid/milp.hpp"

using namespace microgrid;

namespace {

DispatchModel horizon_model(int horizon) {
  const RunConfig cfg = default_config();
  std::vector<double> demand(horizon), res(horizon);
  for (int k = 0; k < horizon; ++k) {
    demand[k] = 400.0 + 150.0 * (k % 5);
    res[k] = 120.0 * (k % 7);
  }
  return build_dispatch_model(demand, res, cfg.unit_classes,
                              std::vector<int>(cfg.unit_classes.size(), 0));
}

void bm_dispatch_milp(benchmark::State& state) {
  const DispatchModel dm = horizon_model(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const MilpSolution sol = solve_milp(dm.model);
    benchmark::DoNotOptimize(sol.objective);
  }
}

void bm_dispatch_lp(benchmark::State& state) {
  const DispatchModel dm = horizon_model(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const MilpSolution sol = solve_lp(dm.model);
    benchmark::DoNotOptimize(sol.objective);
  }
}

}  // namespace

BENCHMARK(bm_dispatch_lp)->Arg(6)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_dispatch_milp)->Arg(6)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);
