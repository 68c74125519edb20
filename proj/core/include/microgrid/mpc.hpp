#pragma once

#include <span>
#include <vector>

#include "microgrid/der.hpp"
#include "microgrid/dispatch.hpp"
#include "microgrid/market.hpp"
#include "microgrid/milp.hpp"
#include "microgrid/res.hpp"

namespace microgrid {

struct RunConfig;  // config.hpp

struct HorizonConfig {
  enum class Mode { Shrinking, Fixed };

  int n_k = 24;
  Mode mode = Mode::Shrinking;
  int fixed_horizon_length = 24;
  double interval_hours = 1.0;
  double j3_weight = 1.0;  // $ per unit SOC in the scalarized objective

  /// Prediction horizon length at interval k: to end-of-day when shrinking,
  /// min(fixed length, remaining intervals) otherwise.
  int horizon_at(int k) const;

  bool operator==(const HorizonConfig&) const = default;
};

void validate_horizon(const HorizonConfig& cfg);

/// Mutable state carried across MPC steps.
struct SimState {
  Population population;
  std::vector<int> prev_committed;  // per unit class
};

/// One candidate price plan evaluated over the horizon.
struct CandidateEval {
  double total_j = 0.0;  // j1 + j2 + penalty - j3_weight * j3 over the horizon
  double j1 = 0.0;
  double j2 = 0.0;
  double j3 = 0.0;       // sum over horizon and DERs of post-step SOC
  double penalty = 0.0;  // unserved-energy penalty over the horizon
  std::vector<DispatchDecision> decisions;
  PopulationTrace trace;
};

/// Simulates the DER population under the plan, solves the dispatch MILP for
/// the resulting demand, and recomputes all costs from the extracted integer
/// decision (deterministic accumulation, independent of solver arithmetic).
CandidateEval evaluate_candidate(std::span<const double> price_plan,
                                 const SimState& snapshot,
                                 std::span<const double> res_kw,
                                 std::span<const UnitClass> classes,
                                 const HorizonConfig& cfg,
                                 const SolverOptions& solver,
                                 const DispatchModelOptions& dispatch_opts);

struct StepResult {
  int k = 0;
  double clearing_price = 0.0;
  bool over_capacity = false;
  double demand_kw = 0.0;
  double served_kw = 0.0;
  double unserved_kw = 0.0;
  double res_available_kw = 0.0;      // series the optimizer saw this scenario
  double res_deterministic_kw = 0.0;
  double res_worst_case_kw = 0.0;
  double res_used_kw = 0.0;
  double mean_price = 0.0;            // mean DER willingness-to-pay
  double soc_sum = 0.0;               // population SOC total after the step
  std::vector<double> class_mean_soc; // per dissipation class, post-step
  DispatchDecision dispatch;          // committed first-interval decision
  double j1 = 0.0;
  double j2 = 0.0;
  double j3 = 0.0;       // = soc_sum
  double j_total = 0.0;  // j1 + j2 - j3_weight * j3 (j3_weight 0 in scenario 1)
  double penalty = 0.0;  // committed-step unserved penalty, reported separately

  bool operator==(const StepResult&) const = default;
};

struct ClassSummary {
  int class_id = 0;
  double mean_soc = 0.0;  // time mean of the class-mean SOC

  bool operator==(const ClassSummary&) const = default;
};

struct RunReport {
  int scenario = 1;
  std::vector<StepResult> steps;
  std::vector<double> cumulative_cost;  // prefix sums of j_total
  std::vector<ClassSummary> soc_by_class;
  double dg_energy_kwh = 0.0;
  double bess_energy_kwh = 0.0;
  double res_deterministic_total_kwh = 0.0;
  double res_worst_total_kwh = 0.0;
  double res_available_total_kwh = 0.0;
  double res_used_total_kwh = 0.0;
  double total_cost = 0.0;
  double total_unserved_kwh = 0.0;
  std::vector<std::string> class_names;  // unit classes, for report columns

  bool operator==(const RunReport&) const = default;
};

/// One receding-horizon step: assembles candidates for the scenario, picks
/// the total-J argmin (ties to the lowest price), commits the first-interval
/// decision and advances the population one interval.
StepResult mpc_step(SimState& state, int scenario,
                    std::span<const double> res_deterministic,
                    std::span<const double> res_worst,
                    std::span<const UnitClass> classes,
                    const MarketConfig& market, const HorizonConfig& cfg,
                    const SolverOptions& solver,
                    const DispatchModelOptions& dispatch_opts, int k);

/// Runs a full scenario over n_k intervals and assembles the report.
RunReport run_scenario(const RunConfig& config);

}  // namespace microgrid
