#include "microgrid/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "microgrid/errors.hpp"

namespace microgrid {

void validate_unit_class(const UnitClass& c) {
  auto fail = [&](const std::string& what) {
    throw ConfigError("unit class " + c.name + ": " + what);
  };
  if (c.count < 1) fail("count must be at least 1");
  if (c.bid_ladder_kw.empty()) fail("bid ladder must not be empty");
  for (std::size_t i = 0; i < c.bid_ladder_kw.size(); ++i) {
    if (c.bid_ladder_kw[i] <= 0.0) fail("bids must be positive");
    if (i > 0 && c.bid_ladder_kw[i] <= c.bid_ladder_kw[i - 1])
      fail("bid ladder must be strictly ascending");
  }
  if (c.c_energy < 0.0 || c.c_start < 0.0 || c.c_noload < 0.0)
    fail("costs must be non-negative");
  if (c.horizon_energy_budget_kwh && *c.horizon_energy_budget_kwh < 0.0)
    fail("energy budget must be non-negative");
}

double resolve_slack_penalty(std::span<const UnitClass> classes,
                             double configured) {
  if (configured > 0.0) return configured;
  double max_ce = 0.0;
  for (const auto& c : classes) max_ce = std::max(max_ce, c.c_energy);
  return max_ce > 0.0 ? 1000.0 * max_ce : 1000.0;
}

DispatchModel build_dispatch_model(std::span<const double> demand_kw,
                                   std::span<const double> res_kw,
                                   std::span<const UnitClass> classes,
                                   std::span<const int> prev_committed,
                                   const DispatchModelOptions& opts) {
  const int horizon = static_cast<int>(demand_kw.size());
  if (res_kw.size() != demand_kw.size())
    throw InputError("dispatch model: demand and RES series lengths differ");
  if (prev_committed.size() != classes.size())
    throw InputError("dispatch model: prev_committed size differs from classes");
  for (const auto& c : classes) validate_unit_class(c);
  for (std::size_t c = 0; c < classes.size(); ++c)
    if (prev_committed[c] < 0 || prev_committed[c] > classes[c].count)
      throw InputError("dispatch model: prev_committed outside class count");

  DispatchModel out;
  out.slack_penalty = resolve_slack_penalty(classes, opts.slack_penalty);
  MilpModel& m = out.model;
  std::vector<double> obj;
  auto add_var = [&](std::string name, VarKind kind, double lo, double hi,
                     double cost) {
    const int id = m.add_variable(std::move(name), kind, lo, hi);
    obj.push_back(cost);
    return id;
  };

  out.index.classes.resize(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const UnitClass& uc = classes[c];
    auto& vars = out.index.classes[c];
    vars.producing.assign(horizon, {});
    vars.committed.resize(horizon);
    vars.started.resize(horizon);
    for (int k = 0; k < horizon; ++k) {
      for (std::size_t l = 0; l < uc.bid_ladder_kw.size(); ++l) {
        // Producing units pay energy cost and are exempt from no-load cost.
        const double cost = uc.c_energy * uc.bid_ladder_kw[l] - uc.c_noload;
        vars.producing[k].push_back(
            add_var("n_" + uc.name + "_k" + std::to_string(k) + "_l" + std::to_string(l),
                    VarKind::Integer, 0.0, uc.count, cost));
      }
      vars.committed[k] =
          add_var("c_" + uc.name + "_k" + std::to_string(k), VarKind::Integer,
                  0.0, uc.count, uc.c_noload);
      vars.started[k] =
          add_var("s_" + uc.name + "_k" + std::to_string(k), VarKind::Integer,
                  0.0, uc.count, uc.c_start);
    }
  }
  out.index.unserved.assign(horizon, -1);
  if (opts.include_unserved_slack) {
    for (int k = 0; k < horizon; ++k) {
      out.index.unserved[k] =
          add_var("unserved_k" + std::to_string(k), VarKind::Continuous, 0.0,
                  std::max(demand_kw[k], 0.0), out.slack_penalty);
    }
  }

  for (std::size_t c = 0; c < classes.size(); ++c) {
    const UnitClass& uc = classes[c];
    const auto& vars = out.index.classes[c];
    for (int k = 0; k < horizon; ++k) {
      // sum_l producing <= committed
      std::vector<MilpTerm> link;
      for (int id : vars.producing[k]) link.push_back({id, 1.0});
      link.push_back({vars.committed[k], -1.0});
      m.add_constraint("link_" + uc.name + "_k" + std::to_string(k),
                       std::move(link), ConstraintSense::LessEqual, 0.0);
      // started >= committed_k - committed_{k-1}
      std::vector<MilpTerm> start{{vars.started[k], 1.0},
                                  {vars.committed[k], -1.0}};
      double rhs = 0.0;
      if (k == 0)
        rhs = -static_cast<double>(prev_committed[c]);
      else
        start.push_back({vars.committed[k - 1], 1.0});
      m.add_constraint("start_" + uc.name + "_k" + std::to_string(k),
                       std::move(start), ConstraintSense::GreaterEqual, rhs);
    }
    if (uc.horizon_energy_budget_kwh) {
      std::vector<MilpTerm> budget;
      for (int k = 0; k < horizon; ++k)
        for (std::size_t l = 0; l < uc.bid_ladder_kw.size(); ++l)
          budget.push_back(
              {vars.producing[k][l], uc.bid_ladder_kw[l] * opts.interval_hours});
      m.add_constraint("budget_" + uc.name, std::move(budget),
                       ConstraintSense::LessEqual, *uc.horizon_energy_budget_kwh);
    }
  }

  // Bid counts in units of the common milli-kW gcd; used to append a rounded
  // (MIR) version of each balance row that closes the per-interval integer
  // rounding gap of the relaxation.
  std::int64_t gcd_milli = 0;
  bool cuts_ok = true;
  for (const auto& uc : classes) {
    for (double bid : uc.bid_ladder_kw) {
      const double scaled = bid * 1000.0;
      const std::int64_t q = std::llround(scaled);
      if (q < 1 || std::abs(scaled - static_cast<double>(q)) > 1e-6) {
        cuts_ok = false;
        break;
      }
      gcd_milli = std::gcd(gcd_milli, q);
    }
    if (!cuts_ok) break;
  }

  for (int k = 0; k < horizon; ++k) {
    std::vector<MilpTerm> balance;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const UnitClass& uc = classes[c];
      for (std::size_t l = 0; l < uc.bid_ladder_kw.size(); ++l)
        balance.push_back(
            {out.index.classes[c].producing[k][l], uc.bid_ladder_kw[l]});
    }
    if (out.index.unserved[k] >= 0)
      balance.push_back({out.index.unserved[k], 1.0});
    const double residual = demand_kw[k] - res_kw[k];
    m.add_constraint("balance_k" + std::to_string(k), balance,
                     ConstraintSense::GreaterEqual, residual);

    // Rounded cover: with integer bid multiples a_j = bid_j / g and
    // T = sum a_j n_j integral, T + s/(f*g) >= ceil(b) is valid for every
    // integer point of  T + s/g >= b,  f = frac(b). Skipped near-integral b
    // where floating noise could flip the ceiling.
    if (!cuts_ok || gcd_milli <= 0 || residual <= 0.0) continue;
    const double g_kw = static_cast<double>(gcd_milli) / 1000.0;
    const double b = residual / g_kw;
    const double f = b - std::floor(b);
    if (f < 1e-6 || f > 1.0 - 1e-6) continue;
    std::vector<MilpTerm> cover;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      const UnitClass& uc = classes[c];
      for (std::size_t l = 0; l < uc.bid_ladder_kw.size(); ++l) {
        const double a = std::round(uc.bid_ladder_kw[l] * 1000.0 /
                                    static_cast<double>(gcd_milli));
        cover.push_back({out.index.classes[c].producing[k][l], a});
      }
    }
    if (out.index.unserved[k] >= 0)
      cover.push_back({out.index.unserved[k], 1.0 / (f * g_kw)});
    m.add_constraint("cover_k" + std::to_string(k), std::move(cover),
                     ConstraintSense::GreaterEqual, std::ceil(b));
  }

  m.set_objective(ObjectiveSense::Minimize, std::move(obj));
  return out;
}

namespace {

// Milli-kW integer view of a ladder; canonicalization works on exact totals.
std::optional<std::vector<std::int64_t>> ladder_milli(
    std::span<const double> ladder) {
  std::vector<std::int64_t> out;
  out.reserve(ladder.size());
  for (double b : ladder) {
    const double scaled = b * 1000.0;
    const std::int64_t q = std::llround(scaled);
    if (q < 1 || std::abs(scaled - static_cast<double>(q)) > 1e-6)
      return std::nullopt;
    out.push_back(q);
  }
  return out;
}

// Decompose total into exactly `units` bids (counts bounded by count),
// scanning levels from the largest down so the first solution found prefers
// large bids. Returns false when the node budget runs out.
bool decompose(const std::vector<std::int64_t>& bids, int level,
               std::int64_t remaining, int units_left, int count_left,
               std::vector<int>& out, long& budget) {
  if (--budget < 0) return false;
  if (level < 0) return remaining == 0 && units_left == 0;
  if (remaining == 0 && units_left == 0) return true;
  const std::int64_t lo_bid = bids.front();
  const std::int64_t hi_bid = bids[level];
  if (remaining < units_left * lo_bid || remaining > units_left * hi_bid)
    return false;
  const int max_n = static_cast<int>(
      std::min<std::int64_t>({units_left, count_left, remaining / hi_bid}));
  for (int n = max_n; n >= 0; --n) {
    out[level] = n;
    if (decompose(bids, level - 1, remaining - n * hi_bid, units_left - n,
                  count_left - n, out, budget))
      return true;
  }
  out[level] = 0;
  return false;
}

}  // namespace

std::optional<std::vector<int>> canonical_producing(
    std::span<const int> producing, std::span<const double> ladder, int count) {
  const auto bids = ladder_milli(ladder);
  if (!bids) return std::nullopt;
  std::int64_t total = 0;
  int used = 0;
  for (std::size_t l = 0; l < producing.size(); ++l) {
    total += producing[l] * (*bids)[l];
    used += producing[l];
  }
  if (total == 0) return std::vector<int>(ladder.size(), 0);
  const std::int64_t hi = bids->back();
  std::vector<int> out(ladder.size(), 0);
  for (int units = static_cast<int>((total + hi - 1) / hi); units <= used;
       ++units) {
    long budget = 100'000;
    if (decompose(*bids, static_cast<int>(bids->size()) - 1, total, units,
                  count, out, budget))
      return out;
    if (budget < 0) return std::nullopt;
    std::fill(out.begin(), out.end(), 0);
  }
  return std::nullopt;
}

DispatchDecision assemble_decision(
    std::span<const UnitClass> classes,
    std::span<const std::vector<int>> producing_per_class,
    std::span<const int> committed_per_class, std::span<const int> prev_committed,
    double demand_kw, double res_kw) {
  DispatchDecision out;
  out.classes.resize(classes.size());
  double supplied = 0.0;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const UnitClass& uc = classes[c];
    ClassDispatch& cd = out.classes[c];
    cd.producing = producing_per_class[c];
    int units = 0;
    for (int n : cd.producing) units += n;
    const bool costless = uc.c_start == 0.0 && uc.c_noload == 0.0;
    if (costless) {
      if (auto canon = canonical_producing(cd.producing, uc.bid_ladder_kw, uc.count)) {
        cd.producing = std::move(*canon);
        units = 0;
        for (int n : cd.producing) units += n;
      }
      cd.committed = units;
    } else {
      cd.committed = committed_per_class[c];
    }
    cd.started = std::max(0, cd.committed - prev_committed[c]);
    cd.power_kw = 0.0;
    for (std::size_t l = 0; l < uc.bid_ladder_kw.size(); ++l)
      cd.power_kw += uc.bid_ladder_kw[l] * cd.producing[l];
    supplied += cd.power_kw;
  }
  out.res_used_kw = std::min(res_kw, demand_kw);
  out.unserved_kw = std::max(0.0, demand_kw - res_kw - supplied);
  return out;
}

std::vector<DispatchDecision> extract_decisions(
    const DispatchVarIndex& index, std::span<const double> values,
    std::span<const UnitClass> classes, std::span<const int> prev_committed,
    std::span<const double> demand_kw, std::span<const double> res_kw) {
  const int horizon = static_cast<int>(demand_kw.size());
  std::vector<DispatchDecision> out;
  out.reserve(horizon);
  auto as_int = [&](int id) {
    return static_cast<int>(std::llround(values[static_cast<std::size_t>(id)]));
  };

  std::vector<int> prev(prev_committed.begin(), prev_committed.end());
  for (int k = 0; k < horizon; ++k) {
    std::vector<std::vector<int>> producing(classes.size());
    std::vector<int> committed(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
      producing[c].resize(classes[c].bid_ladder_kw.size());
      for (std::size_t l = 0; l < producing[c].size(); ++l)
        producing[c][l] = as_int(index.classes[c].producing[k][l]);
      committed[c] = as_int(index.classes[c].committed[k]);
    }
    DispatchDecision d = assemble_decision(classes, producing, committed, prev,
                                           demand_kw[k], res_kw[k]);
    for (std::size_t c = 0; c < classes.size(); ++c)
      prev[c] = d.classes[c].committed;
    out.push_back(std::move(d));
  }
  return out;
}

IntervalCost dispatch_cost(const DispatchDecision& d,
                           std::span<const UnitClass> classes,
                           double slack_penalty) {
  IntervalCost cost;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const UnitClass& uc = classes[c];
    const ClassDispatch& cd = d.classes[c];
    int units = 0;
    for (int n : cd.producing) units += n;
    cost.j1 += uc.c_energy * cd.power_kw;
    cost.j2 += uc.c_start * cd.started + uc.c_noload * (cd.committed - units);
  }
  cost.penalty = slack_penalty * d.unserved_kw;
  return cost;
}

}  // namespace microgrid
