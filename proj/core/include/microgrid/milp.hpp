#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace microgrid {

enum class VarKind { Continuous, Integer };
enum class ConstraintSense { LessEqual, Equal, GreaterEqual };
enum class ObjectiveSense { Minimize, Maximize };

struct MilpVariable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = 0.0;
};

struct MilpTerm {
  int var = 0;
  double coeff = 0.0;
};

struct MilpConstraint {
  std::string name;
  std::vector<MilpTerm> terms;
  ConstraintSense sense = ConstraintSense::LessEqual;
  double rhs = 0.0;
};

/// A mixed-integer linear program over bounded variables. Immutable once built
/// and handed to a solver; solves on distinct models may run concurrently.
class MilpModel {
 public:
  int add_variable(std::string name, VarKind kind, double lower, double upper);
  void add_constraint(std::string name, std::vector<MilpTerm> terms,
                      ConstraintSense sense, double rhs);
  void set_objective(ObjectiveSense sense, std::vector<double> coeffs);

  int num_variables() const { return static_cast<int>(vars_.size()); }
  const std::vector<MilpVariable>& variables() const { return vars_; }
  const std::vector<MilpConstraint>& constraints() const { return cons_; }
  ObjectiveSense objective_sense() const { return obj_sense_; }
  /// Objective coefficients, padded with zeros to num_variables().
  std::vector<double> objective() const;

  /// Throws ConfigError on dangling term ids, crossed bounds, or integer
  /// variables without finite bounds.
  void validate() const;

  double objective_value(std::span<const double> x) const;
  bool satisfies(std::span<const double> x, double feas_tol) const;

  /// Plain-text dump, one line per variable/constraint, exact decimal
  /// rendering (round-trip format). Stable across runs; used by golden tests.
  void dump(std::ostream& os) const;

 private:
  std::vector<MilpVariable> vars_;
  std::vector<MilpConstraint> cons_;
  std::vector<double> obj_;
  ObjectiveSense obj_sense_ = ObjectiveSense::Minimize;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, NodeLimit };

struct SolverOptions {
  double feasibility_tol = 1e-7;
  double integrality_tol = 1e-6;
  double relative_gap = 1e-9;
  std::int64_t node_limit = 1'000'000;
  /// Run the fix-and-round incumbent heuristic at the root and then every
  /// this-many nodes; 0 disables it.
  int heuristic_period = 16;

  bool operator==(const SolverOptions&) const = default;
};

struct MilpSolution {
  SolveStatus status = SolveStatus::Infeasible;
  bool has_incumbent = false;
  std::vector<double> values;  // empty unless has_incumbent
  double objective = 0.0;      // incumbent objective when has_incumbent
  double best_bound = 0.0;     // proven bound in the model's objective sense
  std::int64_t nodes = 0;      // LP relaxations solved by branch-and-bound
};

/// Solves the LP relaxation (integrality ignored) with a bounded-variable
/// two-phase simplex. Deterministic: fixed pivoting rules, Bland's rule as
/// anti-cycling fallback after a degenerate-pivot threshold.
MilpSolution solve_lp(const MilpModel& model, const SolverOptions& opts = {});

/// Branch-and-bound on fractional integer variables: most-fractional
/// branching (ties by lowest variable id), best-bound node selection (ties by
/// lowest node id). Deterministic: identical models yield identical solutions
/// and node counts.
MilpSolution solve_milp(const MilpModel& model, const SolverOptions& opts = {});

}  // namespace microgrid
