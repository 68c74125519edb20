#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "microgrid/milp.hpp"

namespace microgrid {

/// An aggregated class of identical dispatchable units with a discrete bid
/// ladder. Per-unit on/off collapses into integer counts.
struct UnitClass {
  enum class Kind { DG, BESS };

  Kind kind = Kind::DG;
  std::string name = "dg";
  int count = 1;
  std::vector<double> bid_ladder_kw;  // strictly ascending, all positive
  double c_energy = 1.0;  // $ per kW per interval while producing
  double c_start = 0.0;   // $ per start event
  double c_noload = 0.0;  // $ per interval committed but not producing
  /// Optional cap on the class's energy over the optimization horizon, kWh.
  std::optional<double> horizon_energy_budget_kwh;

  bool operator==(const UnitClass&) const = default;
};

void validate_unit_class(const UnitClass& c);

struct DispatchVarIndex {
  struct PerClass {
    std::vector<std::vector<int>> producing;  // [interval][level]
    std::vector<int> committed;               // [interval]
    std::vector<int> started;                 // [interval]
  };
  std::vector<PerClass> classes;
  std::vector<int> unserved;  // [interval]; -1 when the slack is disabled
};

struct DispatchModelOptions {
  bool include_unserved_slack = true;
  /// Penalty per unserved kW per interval; 0 selects 1000 x max c_energy
  /// (floor 1000 when every energy cost is zero).
  double slack_penalty = 0.0;
  double interval_hours = 1.0;  // used by energy-budget rows only
};

struct DispatchModel {
  MilpModel model;
  DispatchVarIndex index;
  double slack_penalty = 0.0;
};

double resolve_slack_penalty(std::span<const UnitClass> classes,
                             double configured);

/// Builds the dispatch MILP over the horizon: per class and interval,
/// producing counts per bid level, a committed count and a start count, with
///   sum_l producing <= committed,
///   started >= committed_k - committed_{k-1}  (committed_0 = prev),
///   sum bids*producing + res + unserved >= demand,
/// minimizing energy, start, no-load (committed minus producing) and
/// unserved-penalty costs.
DispatchModel build_dispatch_model(std::span<const double> demand_kw,
                                   std::span<const double> res_kw,
                                   std::span<const UnitClass> classes,
                                   std::span<const int> prev_committed,
                                   const DispatchModelOptions& opts = {});

/// Minimal-unit decomposition of a producing vector's power total over the
/// ladder, preferring larger bids. Returns nullopt when the ladder is not
/// milli-kW representable or no decomposition is found within budget.
std::optional<std::vector<int>> canonical_producing(
    std::span<const int> producing, std::span<const double> ladder, int count);

struct ClassDispatch {
  std::vector<int> producing;  // per ladder level
  int committed = 0;
  int started = 0;
  double power_kw = 0.0;

  bool operator==(const ClassDispatch&) const = default;
};

/// Committed dispatch for one interval.
struct DispatchDecision {
  std::vector<ClassDispatch> classes;
  double res_used_kw = 0.0;
  double unserved_kw = 0.0;

  bool operator==(const DispatchDecision&) const = default;
};

/// Canonical assembly of one interval's decision from raw integer choices:
/// classes with no start and no no-load cost are re-expressed as the
/// minimal-unit decomposition of their power total with committed =
/// producing units; start counts are always max(0, committed - prev).
/// Unserved energy is recomputed from the integer decision. Both the MPC
/// path and the enumeration oracle report through this one function.
DispatchDecision assemble_decision(
    std::span<const UnitClass> classes,
    std::span<const std::vector<int>> producing_per_class,
    std::span<const int> committed_per_class, std::span<const int> prev_committed,
    double demand_kw, double res_kw);

/// Rounds a solver assignment into per-interval canonical decisions.
std::vector<DispatchDecision> extract_decisions(
    const DispatchVarIndex& index, std::span<const double> values,
    std::span<const UnitClass> classes, std::span<const int> prev_committed,
    std::span<const double> demand_kw, std::span<const double> res_kw);

struct IntervalCost {
  double j1 = 0.0;       // production cost
  double j2 = 0.0;       // start + no-load cost
  double penalty = 0.0;  // unserved-energy penalty
};

/// Recomputes cost components from an integer decision; both the scheduler
/// and the enumeration oracle report through this one path.
IntervalCost dispatch_cost(const DispatchDecision& d,
                           std::span<const UnitClass> classes,
                           double slack_penalty);

}  // namespace microgrid
