#include "microgrid/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "microgrid/config.hpp"
#include "microgrid/errors.hpp"

namespace microgrid {

EnumerationReport enumerate_milp(const MilpModel& model, std::int64_t cap,
                                 double feas_tol) {
  model.validate();
  const auto& vars = model.variables();
  const int n = model.num_variables();
  const bool minimize = model.objective_sense() == ObjectiveSense::Minimize;

  std::vector<std::int64_t> lo(n), hi(n);
  std::int64_t product = 1;
  for (int j = 0; j < n; ++j) {
    if (vars[j].kind != VarKind::Integer)
      throw InputError("enumerate_milp: variable " + vars[j].name + " is continuous");
    lo[j] = static_cast<std::int64_t>(std::ceil(vars[j].lower - 1e-9));
    hi[j] = static_cast<std::int64_t>(std::floor(vars[j].upper + 1e-9));
    if (lo[j] > hi[j]) {
      product = 0;
      break;
    }
    const std::int64_t domain = hi[j] - lo[j] + 1;
    if (product > cap / domain + 1) throw InputError("enumerate_milp: assignment count exceeds cap");
    product *= domain;
    if (product > cap) throw InputError("enumerate_milp: assignment count exceeds cap");
  }

  EnumerationReport report;
  if (product == 0) return report;

  std::vector<double> x(n);
  for (int j = 0; j < n; ++j) x[j] = static_cast<double>(lo[j]);
  std::vector<std::int64_t> cur(lo);

  while (true) {
    ++report.assignments_enumerated;
    if (model.satisfies(x, feas_tol)) {
      const double obj = model.objective_value(x);
      const bool better = !report.feasible ||
                          (minimize ? obj < report.objective : obj > report.objective);
      if (better) {
        report.feasible = true;
        report.objective = obj;
        report.best_assignment = x;
        report.optima_count = 1;
      } else if (obj == report.objective) {
        ++report.optima_count;
      }
    }
    // Odometer with variable 0 most significant: first optimum in lex order.
    int j = n - 1;
    while (j >= 0) {
      if (cur[j] < hi[j]) {
        ++cur[j];
        x[j] = static_cast<double>(cur[j]);
        break;
      }
      cur[j] = lo[j];
      x[j] = static_cast<double>(cur[j]);
      --j;
    }
    if (j < 0) break;
  }
  return report;
}

namespace {

// ---------------------------------------------------------------------------
// Straight-line reference pipeline. DER dynamics, RES power maps, market
// admissibility and the dispatch optimum are recomputed here without calling
// simulate_population, res_series, DemandCurve, simplex or branch-and-bound,
// so this path can falsify each of them. Reported decisions and costs go
// through the same canonical assembly and cost helpers as the scheduler.
// ---------------------------------------------------------------------------

struct RefStepTrace {
  double demand_kw = 0.0;
  double mean_price = 0.0;
  double soc_sum = 0.0;
};

RefStepTrace ref_advance(Population& pop, double p_clear) {
  RefStepTrace t;
  double price_sum = 0.0;
  for (Der& d : pop) {
    const DerParams& p = d.params;
    const double price = p.p_max - p.beta * d.state.soc;
    price_sum += price;
    const bool on = price >= p_clear;
    if (d.state.charge_enabled && on) t.demand_kw += p.p_rated_kw;
    const double charge = (d.state.charge_enabled && on) ? p.gamma : 0.0;
    double soc = std::min(p.a * d.state.soc + charge, p.soc_max);
    if (soc < 0.0) soc = 0.0;
    bool m = d.state.charge_enabled;
    if (soc >= p.soc_max)
      m = false;
    else if (soc < p.soc_set)
      m = true;
    d.state.soc = soc;
    d.state.charge_enabled = m;
    d.state.on = on;
    t.soc_sum += soc;
  }
  t.mean_price = pop.empty() ? 0.0 : price_sum / static_cast<double>(pop.size());
  return t;
}

std::vector<double> ref_res_series(const RunConfig& cfg, bool worst) {
  const ResForecast& f = cfg.forecast;
  const std::size_t n = f.irradiance.size();
  std::vector<double> out(n, 0.0);
  std::vector<double> held_wind(cfg.res.wind_units.size(), 0.0);
  double held_solar = 0.0;
  const bool hold = cfg.res.wind_power_mode == WindPowerMode::HoldPrevious;

  for (std::size_t k = 0; k < n; ++k) {
    double irr = f.irradiance[k];
    double v = f.wind_speed[k];
    if (worst) {
      if (!f.irr_uncertainty.empty()) irr = std::max(irr - f.irr_uncertainty[k], 0.0);
      if (!f.wind_uncertainty.empty()) v = std::max(v - f.wind_uncertainty[k], 0.0);
    }
    double total = 0.0;
    for (std::size_t u = 0; u < cfg.res.wind_units.size(); ++u) {
      const WtModel& m = cfg.res.wind_units[u];
      double p;
      if (v < m.v_min)
        p = 0.0;
      else if (v >= m.v_max)
        p = m.p_max_kw;
      else if (hold)
        p = std::clamp(held_wind[u], 0.0, m.p_max_kw);
      else
        p = std::min(0.5 * m.rho * m.area_m2 * (v * v * v) * m.cp / 1000.0,
                     m.p_max_kw);
      held_wind[u] = p;
      total += p;
    }
    const PvModel& pv = cfg.res.pv;
    double ps;
    if (irr < pv.irr_min)
      ps = 0.0;
    else if (irr >= pv.irr_max)
      ps = pv.p_max_kw;
    else if (hold)
      ps = std::clamp(held_solar, 0.0, pv.p_max_kw);
    else
      ps = pv.p_max_kw * (irr - pv.irr_min) / (pv.irr_max - pv.irr_min);
    held_solar = ps;
    out[k] = total + ps;
  }
  return out;
}

double ref_demand_at(const Population& pop, double price) {
  double total = 0.0;
  for (const Der& d : pop) {
    if (!d.state.charge_enabled) continue;
    if (d.params.p_max - d.params.beta * d.state.soc >= price)
      total += d.params.p_rated_kw;
  }
  return total;
}

// One admissible per-interval choice for a unit class.
struct ClassOption {
  std::vector<int> producing;
  int committed = 0;
  int units = 0;
  double power_kw = 0.0;
  double base_cost = 0.0;  // energy + no-load, start cost added per transition
};

std::vector<ClassOption> class_options(const UnitClass& uc, std::int64_t cap) {
  const int levels = static_cast<int>(uc.bid_ladder_kw.size());
  const bool costless = uc.c_start == 0.0 && uc.c_noload == 0.0;
  std::vector<ClassOption> out;
  std::vector<int> vec(levels, 0);
  while (true) {
    int units = 0;
    for (int n : vec) units += n;
    if (units <= uc.count) {
      double power = 0.0;
      for (int l = 0; l < levels; ++l) power += uc.bid_ladder_kw[l] * vec[l];
      // Committed beyond the producing units only matters when holding a unit
      // hot has a cost or saves a start; costless classes commit exactly what
      // produces.
      const int c_hi = costless ? units : uc.count;
      for (int committed = units; committed <= c_hi; ++committed) {
        ClassOption opt;
        opt.producing = vec;
        opt.committed = committed;
        opt.units = units;
        opt.power_kw = power;
        opt.base_cost = uc.c_energy * power + uc.c_noload * (committed - units);
        out.push_back(std::move(opt));
        if (static_cast<std::int64_t>(out.size()) > cap)
          throw InputError("reference_run: unit class " + uc.name +
                           " has too many per-interval choices to enumerate");
      }
    }
    int l = levels - 1;
    while (l >= 0 && vec[l] == uc.count) vec[l--] = 0;
    if (l < 0) break;
    ++vec[l];
  }
  return out;
}

// Exact optimal dispatch over the horizon by dynamic programming on the
// committed-count state, enumerating every per-interval choice.
std::vector<DispatchDecision> ref_dispatch(std::span<const double> demand_kw,
                                           std::span<const double> res_kw,
                                           std::span<const UnitClass> classes,
                                           std::span<const int> prev_committed,
                                           double slack_penalty) {
  const int horizon = static_cast<int>(demand_kw.size());
  const int n_classes = static_cast<int>(classes.size());
  constexpr std::int64_t kOptionCap = 20'000;
  constexpr std::int64_t kWorkCap = 50'000'000;

  std::vector<std::vector<ClassOption>> options;
  std::int64_t joint = 1;
  std::int64_t n_states = 1;
  for (const auto& uc : classes) {
    options.push_back(class_options(uc, kOptionCap));
    joint *= static_cast<std::int64_t>(options.back().size());
    n_states *= uc.count + 1;
    if (joint > kOptionCap || n_states > 100'000)
      throw InputError("reference_run: dispatch choice space too large to enumerate");
  }
  if (joint * n_states * horizon > kWorkCap)
    throw InputError("reference_run: dispatch enumeration work exceeds cap");

  auto state_id = [&](std::span<const int> committed) {
    std::int64_t id = 0;
    for (int c = 0; c < n_classes; ++c) id = id * (classes[c].count + 1) + committed[c];
    return id;
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev_cost(n_states, inf);
  prev_cost[state_id(prev_committed)] = 0.0;
  // back[k][state] = (previous state, joint choice index)
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> back(
      horizon, std::vector<std::pair<std::int64_t, std::int64_t>>(
                   n_states, {-1, -1}));

  std::vector<int> choice(n_classes, 0);
  std::vector<int> committed(n_classes, 0);
  std::vector<int> state_committed(n_classes, 0);

  for (int k = 0; k < horizon; ++k) {
    std::vector<double> cur_cost(n_states, inf);
    std::fill(choice.begin(), choice.end(), 0);
    while (true) {
      double base = 0.0;
      double supply = 0.0;
      for (int c = 0; c < n_classes; ++c) {
        const ClassOption& opt = options[c][choice[c]];
        base += opt.base_cost;
        supply += opt.power_kw;
        committed[c] = opt.committed;
      }
      const double shortfall = std::max(0.0, demand_kw[k] - res_kw[k] - supply);
      base += slack_penalty * shortfall;
      const std::int64_t new_state = state_id(committed);

      std::int64_t joint_id = 0;
      for (int c = 0; c < n_classes; ++c)
        joint_id = joint_id * static_cast<std::int64_t>(options[c].size()) + choice[c];

      for (std::int64_t s = 0; s < n_states; ++s) {
        if (prev_cost[s] == inf) continue;
        std::int64_t rem = s;
        for (int c = n_classes - 1; c >= 0; --c) {
          state_committed[c] = static_cast<int>(rem % (classes[c].count + 1));
          rem /= classes[c].count + 1;
        }
        double start_cost = 0.0;
        for (int c = 0; c < n_classes; ++c)
          start_cost += classes[c].c_start *
                        std::max(0, committed[c] - state_committed[c]);
        const double total = prev_cost[s] + base + start_cost;
        if (total < cur_cost[new_state]) {
          cur_cost[new_state] = total;
          back[k][new_state] = {s, joint_id};
        }
      }

      int c = n_classes - 1;
      while (c >= 0 && choice[c] + 1 >= static_cast<int>(options[c].size()))
        choice[c--] = 0;
      if (c < 0) break;
      ++choice[c];
    }
    prev_cost = std::move(cur_cost);
  }

  std::int64_t best_state = -1;
  double best_cost = inf;
  for (std::int64_t s = 0; s < n_states; ++s) {
    if (prev_cost[s] < best_cost) {
      best_cost = prev_cost[s];
      best_state = s;
    }
  }
  if (best_state < 0)
    throw NumericalError("reference_run: dispatch enumeration found no plan");

  // Walk parents back to the first interval, then assemble canonically.
  std::vector<std::int64_t> chosen(horizon);
  std::int64_t state = best_state;
  for (int k = horizon - 1; k >= 0; --k) {
    const auto [prev_state, joint_id] = back[k][state];
    chosen[k] = joint_id;
    state = prev_state;
  }

  std::vector<DispatchDecision> decisions;
  decisions.reserve(horizon);
  std::vector<int> prev(prev_committed.begin(), prev_committed.end());
  for (int k = 0; k < horizon; ++k) {
    std::int64_t rem = chosen[k];
    std::vector<int> opt_idx(n_classes, 0);
    for (int c = n_classes - 1; c >= 0; --c) {
      opt_idx[c] = static_cast<int>(rem % static_cast<std::int64_t>(options[c].size()));
      rem /= static_cast<std::int64_t>(options[c].size());
    }
    std::vector<std::vector<int>> producing(n_classes);
    std::vector<int> committed_now(n_classes);
    for (int c = 0; c < n_classes; ++c) {
      const ClassOption& opt = options[c][opt_idx[c]];
      producing[c] = opt.producing;
      committed_now[c] = opt.committed;
    }
    DispatchDecision d = assemble_decision(classes, producing, committed_now,
                                           prev, demand_kw[k], res_kw[k]);
    for (int c = 0; c < n_classes; ++c) prev[c] = d.classes[c].committed;
    decisions.push_back(std::move(d));
  }
  return decisions;
}

struct RefCandidate {
  double price = 0.0;
  std::vector<double> plan;
  bool over_capacity = false;
};

struct RefEval {
  double total_j = 0.0;
  double j1 = 0.0, j2 = 0.0, j3 = 0.0, penalty = 0.0;
  std::vector<DispatchDecision> decisions;
  RefStepTrace first_step;
};

RefEval ref_evaluate(const std::vector<double>& plan, const Population& pop,
                     std::span<const int> prev_committed,
                     std::span<const double> res_slice,
                     std::span<const UnitClass> classes, double j3_weight,
                     double slack_penalty) {
  RefEval eval;
  Population sim = pop;
  std::vector<double> demand(plan.size(), 0.0);
  for (std::size_t k = 0; k < plan.size(); ++k) {
    const RefStepTrace t = ref_advance(sim, plan[k]);
    demand[k] = t.demand_kw;
    eval.j3 += t.soc_sum;
    if (k == 0) eval.first_step = t;
  }
  eval.decisions = ref_dispatch(demand, res_slice, classes, prev_committed,
                                slack_penalty);
  for (std::size_t k = 0; k < eval.decisions.size(); ++k) {
    const IntervalCost c = dispatch_cost(eval.decisions[k], classes, slack_penalty);
    eval.j1 += c.j1;
    eval.j2 += c.j2;
    eval.penalty += c.penalty;
  }
  eval.total_j = eval.j1 + eval.j2 + eval.penalty - j3_weight * eval.j3;
  return eval;
}

}  // namespace

RunReport reference_run(const RunConfig& config) {
  validate_config(config);
  if (config.population.count > 64)
    throw InputError("reference_run: population too large (max 64 DERs)");
  if (config.unit_classes.size() > 4)
    throw InputError("reference_run: too many unit classes (max 4)");
  if (config.horizon.n_k > 12)
    throw InputError("reference_run: horizon too long (max 12 intervals)");

  RunReport report;
  report.scenario = config.scenario;
  for (const auto& uc : config.unit_classes) report.class_names.push_back(uc.name);

  const std::vector<double> res_det = ref_res_series(config, false);
  const std::vector<double> res_worst = config.forecast.has_uncertainty()
                                            ? ref_res_series(config, true)
                                            : res_det;
  const std::vector<double>& res_all = config.scenario == 3 ? res_worst : res_det;

  Population population = make_population(config.population, config.seed);
  std::vector<int> prev_committed(config.unit_classes.size(), 0);
  const double penalty_rate =
      resolve_slack_penalty(config.unit_classes, config.slack_penalty);

  double cum = 0.0;
  for (int k = 0; k < config.horizon.n_k; ++k) {
    const int horizon = config.horizon.horizon_at(k);
    const std::span<const double> res_slice =
        std::span<const double>(res_all).subspan(k, horizon);
    const double j3_weight = config.scenario == 1 ? 0.0 : config.horizon.j3_weight;

    std::vector<RefCandidate> candidates;
    if (config.scenario == 1) {
      RefCandidate c;
      c.plan.assign(config.market.p_base.begin() + k,
                    config.market.p_base.begin() + k + horizon);
      c.price = c.plan.front();
      c.over_capacity =
          ref_demand_at(population, c.price) > config.market.feeder_capacity_kw;
      candidates.push_back(std::move(c));
    } else {
      for (double bid : config.market.price_bids) {
        if (ref_demand_at(population, bid) <= config.market.feeder_capacity_kw)
          candidates.push_back(
              {bid, std::vector<double>(static_cast<std::size_t>(horizon), bid), false});
      }
      if (candidates.empty()) {
        const double bid = config.market.price_bids.back();
        candidates.push_back(
            {bid, std::vector<double>(static_cast<std::size_t>(horizon), bid), true});
      }
    }

    RefEval best;
    const RefCandidate* best_cand = nullptr;
    for (const RefCandidate& cand : candidates) {
      RefEval eval = ref_evaluate(cand.plan, population, prev_committed,
                                  res_slice, config.unit_classes, j3_weight,
                                  penalty_rate);
      if (best_cand == nullptr || eval.total_j < best.total_j) {
        best = std::move(eval);
        best_cand = &cand;
      }
    }

    const double committed_price = best_cand->plan.front();
    const RefStepTrace step_trace = ref_advance(population, committed_price);

    StepResult r;
    r.k = k;
    r.clearing_price = committed_price;
    r.over_capacity = best_cand->over_capacity;
    r.demand_kw = step_trace.demand_kw;
    r.res_deterministic_kw = res_det[k];
    r.res_worst_case_kw = res_worst[k];
    r.res_available_kw = res_all[k];
    r.dispatch = best.decisions.front();
    r.res_used_kw = r.dispatch.res_used_kw;
    r.unserved_kw = r.dispatch.unserved_kw;
    r.served_kw = r.demand_kw - r.unserved_kw;
    r.mean_price = step_trace.mean_price;
    r.soc_sum = step_trace.soc_sum;

    const IntervalCost cost =
        dispatch_cost(r.dispatch, config.unit_classes, penalty_rate);
    r.j1 = cost.j1;
    r.j2 = cost.j2;
    r.j3 = r.soc_sum;
    r.penalty = cost.penalty;
    r.j_total = r.j1 + r.j2 - j3_weight * r.j3;

    int n_classes = 0;
    for (const Der& d : population)
      n_classes = std::max(n_classes, d.class_id + 1);
    r.class_mean_soc.assign(n_classes, 0.0);
    std::vector<int> counts(n_classes, 0);
    for (const Der& d : population) {
      r.class_mean_soc[d.class_id] += d.state.soc;
      ++counts[d.class_id];
    }
    for (int c = 0; c < n_classes; ++c)
      if (counts[c] > 0) r.class_mean_soc[c] /= counts[c];

    for (std::size_t c = 0; c < config.unit_classes.size(); ++c)
      prev_committed[c] = r.dispatch.classes[c].committed;

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
