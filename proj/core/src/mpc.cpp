#include "microgrid/mpc.hpp"

#include <algorithm>
#include <cmath>

#include "microgrid/config.hpp"
#include "microgrid/errors.hpp"

namespace microgrid {

int HorizonConfig::horizon_at(int k) const {
  const int remaining = n_k - k;
  if (mode == Mode::Shrinking) return remaining;
  return std::min(fixed_horizon_length, remaining);
}

void validate_horizon(const HorizonConfig& cfg) {
  if (cfg.n_k < 1) throw ConfigError("horizon.n_k must be at least 1");
  if (cfg.fixed_horizon_length < 1)
    throw ConfigError("horizon.fixed_horizon_length must be at least 1");
  if (cfg.interval_hours <= 0.0)
    throw ConfigError("horizon.interval_hours must be positive");
  if (cfg.j3_weight < 0.0)
    throw ConfigError("horizon.j3_weight must be non-negative");
}

CandidateEval evaluate_candidate(std::span<const double> price_plan,
                                 const SimState& snapshot,
                                 std::span<const double> res_kw,
                                 std::span<const UnitClass> classes,
                                 const HorizonConfig& cfg,
                                 const SolverOptions& solver,
                                 const DispatchModelOptions& dispatch_opts) {
  if (price_plan.size() != res_kw.size())
    throw InputError("candidate evaluation: plan and RES horizon lengths differ");

  CandidateEval eval;
  eval.trace = simulate_population(snapshot.population, price_plan);
  eval.j3 = eval.trace.soc_total();

  DispatchModel dm = build_dispatch_model(eval.trace.demand_kw, res_kw, classes,
                                          snapshot.prev_committed, dispatch_opts);
  const MilpSolution sol = solve_milp(dm.model, solver);
  if (!sol.has_incumbent)
    throw NumericalError("dispatch model solve produced no incumbent (status " +
                         std::to_string(static_cast<int>(sol.status)) + ")");

  eval.decisions = extract_decisions(dm.index, sol.values, classes,
                                     snapshot.prev_committed,
                                     eval.trace.demand_kw, res_kw);
  for (std::size_t k = 0; k < eval.decisions.size(); ++k) {
    const IntervalCost c = dispatch_cost(eval.decisions[k], classes, dm.slack_penalty);
    eval.j1 += c.j1;
    eval.j2 += c.j2;
    eval.penalty += c.penalty;
  }
  eval.total_j = eval.j1 + eval.j2 + eval.penalty - cfg.j3_weight * eval.j3;
  return eval;
}

namespace {

struct Candidate {
  double price;  // first-interval clearing price
  std::vector<double> plan;
  bool over_capacity = false;
};

// Scenario 1 follows the base price forecast; scenarios 2 and 3 hold one bid
// across the horizon, restricted to bids whose instantaneous demand fits the
// feeder (the clearing rule of the market module). When no bid fits, the
// largest bid is used and flagged.
std::vector<Candidate> make_candidates(int scenario, const SimState& state,
                                       const MarketConfig& market, int k,
                                       int horizon) {
  std::vector<Candidate> out;
  if (scenario == 1) {
    Candidate c;
    c.plan.assign(market.p_base.begin() + k, market.p_base.begin() + k + horizon);
    c.price = c.plan.front();
    const DemandCurve curve = build_demand_curve(state.population);
    c.over_capacity = curve.demand_at(c.price) > market.feeder_capacity_kw;
    out.push_back(std::move(c));
    return out;
  }
  if (market.price_bids.empty())
    throw ConfigError("market.price_bids must not be empty in scenarios 2 and 3");
  if (!std::is_sorted(market.price_bids.begin(), market.price_bids.end()))
    throw ConfigError("market.price_bids must be sorted ascending");
  const DemandCurve curve = build_demand_curve(state.population);
  for (const auto& plan : enumerate_price_plans(market.price_bids, horizon)) {
    if (curve.demand_at(plan.front()) <= market.feeder_capacity_kw)
      out.push_back({plan.front(), plan, false});
  }
  if (out.empty()) {
    auto plans = enumerate_price_plans(market.price_bids, horizon);
    out.push_back({plans.back().front(), plans.back(), true});
  }
  return out;
}

}  // namespace

StepResult mpc_step(SimState& state, int scenario,
                    std::span<const double> res_deterministic,
                    std::span<const double> res_worst,
                    std::span<const UnitClass> classes,
                    const MarketConfig& market, const HorizonConfig& cfg,
                    const SolverOptions& solver,
                    const DispatchModelOptions& dispatch_opts, int k) {
  if (k < 0 || k >= cfg.n_k) throw InputError("mpc_step: interval out of range");
  const int horizon = cfg.horizon_at(k);
  const std::span<const double> res_all =
      scenario == 3 ? res_worst : res_deterministic;
  const std::span<const double> res_slice = res_all.subspan(k, horizon);

  HorizonConfig step_cfg = cfg;
  if (scenario == 1) step_cfg.j3_weight = 0.0;  // no price lever to optimize SOC

  const std::vector<Candidate> candidates =
      make_candidates(scenario, state, market, k, horizon);
  CandidateEval best;
  const Candidate* best_cand = nullptr;
  for (const Candidate& cand : candidates) {
    CandidateEval eval = evaluate_candidate(cand.plan, state, res_slice, classes,
                                            step_cfg, solver, dispatch_opts);
    // Candidates arrive in ascending price order, so strict improvement
    // implements the ties-to-lowest-price rule.
    if (best_cand == nullptr || eval.total_j < best.total_j) {
      best = std::move(eval);
      best_cand = &cand;
    }
  }

  // Commit the first interval and advance the true population.
  const double committed_price = best_cand->plan.front();
  const std::vector<double> one_step{committed_price};
  const PopulationTrace step_trace = simulate_population(state.population, one_step);
  state.population = step_trace.final_states;

  StepResult r;
  r.k = k;
  r.clearing_price = committed_price;
  r.over_capacity = best_cand->over_capacity;
  r.demand_kw = step_trace.demand_kw[0];
  r.res_deterministic_kw = res_deterministic[k];
  r.res_worst_case_kw = res_worst[k];
  r.res_available_kw = res_all[k];
  r.dispatch = best.decisions.front();
  r.res_used_kw = r.dispatch.res_used_kw;
  r.unserved_kw = r.dispatch.unserved_kw;
  r.served_kw = r.demand_kw - r.unserved_kw;
  r.mean_price = step_trace.mean_price[0];
  r.soc_sum = step_trace.soc_sum[0];

  const double penalty_rate =
      resolve_slack_penalty(classes, dispatch_opts.slack_penalty);
  const IntervalCost cost = dispatch_cost(r.dispatch, classes, penalty_rate);
  r.j1 = cost.j1;
  r.j2 = cost.j2;
  r.j3 = r.soc_sum;
  r.penalty = cost.penalty;
  r.j_total = r.j1 + r.j2 - step_cfg.j3_weight * r.j3;

  // Per-class mean SOC for the report.
  int n_classes = 0;
  for (const Der& d : state.population)
    n_classes = std::max(n_classes, d.class_id + 1);
  r.class_mean_soc.assign(n_classes, 0.0);
  std::vector<int> counts(n_classes, 0);
  for (const Der& d : state.population) {
    r.class_mean_soc[d.class_id] += d.state.soc;
    ++counts[d.class_id];
  }
  for (int c = 0; c < n_classes; ++c)
    if (counts[c] > 0) r.class_mean_soc[c] /= counts[c];

  for (std::size_t c = 0; c < classes.size(); ++c)
    state.prev_committed[c] = r.dispatch.classes[c].committed;
  return r;
}

RunReport run_scenario(const RunConfig& config) {
  validate_config(config);

  RunReport report;
  report.scenario = config.scenario;
  for (const auto& uc : config.unit_classes) report.class_names.push_back(uc.name);

  const std::vector<double> res_det =
      res_series(config.forecast, config.res.wind_units, config.res.pv,
                 /*worst_case=*/false, config.res.wind_power_mode);
  const std::vector<double> res_worst =
      config.forecast.has_uncertainty()
          ? res_series(config.forecast, config.res.wind_units, config.res.pv,
                       /*worst_case=*/true, config.res.wind_power_mode)
          : res_det;

  SimState state;
  state.population = make_population(config.population, config.seed);
  state.prev_committed.assign(config.unit_classes.size(), 0);

  DispatchModelOptions dopts;
  dopts.slack_penalty = config.slack_penalty;
  dopts.interval_hours = config.horizon.interval_hours;

  double cum = 0.0;
  for (int k = 0; k < config.horizon.n_k; ++k) {
    StepResult r = mpc_step(state, config.scenario, res_det, res_worst,
                            config.unit_classes, config.market, config.horizon,
                            config.solver, dopts, k);
    cum += r.j_total;
    report.cumulative_cost.push_back(cum);
    report.steps.push_back(std::move(r));
  }

  const double hours = config.horizon.interval_hours;
  int n_classes = 0;
  for (const auto& s : report.steps)
    n_classes = std::max(n_classes, static_cast<int>(s.class_mean_soc.size()));
  std::vector<double> soc_acc(n_classes, 0.0);
  for (const auto& s : report.steps) {
    report.res_deterministic_total_kwh += s.res_deterministic_kw * hours;
    report.res_worst_total_kwh += s.res_worst_case_kw * hours;
    report.res_available_total_kwh += s.res_available_kw * hours;
    report.res_used_total_kwh += s.res_used_kw * hours;
    report.total_unserved_kwh += s.unserved_kw * hours;
    for (std::size_t c = 0; c < config.unit_classes.size(); ++c) {
      const double e = s.dispatch.classes[c].power_kw * hours;
      if (config.unit_classes[c].kind == UnitClass::Kind::DG)
        report.dg_energy_kwh += e;
      else
        report.bess_energy_kwh += e;
    }
    for (int c = 0; c < static_cast<int>(s.class_mean_soc.size()); ++c)
      soc_acc[c] += s.class_mean_soc[c];
  }
  report.total_cost = report.cumulative_cost.empty() ? 0.0 : report.cumulative_cost.back();
  for (int c = 0; c < n_classes; ++c)
    report.soc_by_class.push_back(
        {c, soc_acc[c] / static_cast<double>(config.horizon.n_k)});
  return report;
}

}  // namespace microgrid
