#pragma once

#include <cstdint>
#include <vector>

#include "microgrid/milp.hpp"
#include "microgrid/mpc.hpp"

namespace microgrid {

struct RunConfig;  // config.hpp

/// Result of exhaustively evaluating every integer assignment of a model.
struct EnumerationReport {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> best_assignment;       // first optimum in lex order
  std::int64_t assignments_enumerated = 0;   // product of the domain sizes
  std::int64_t optima_count = 0;             // assignments tying the optimum

  bool operator==(const EnumerationReport&) const = default;
};

/// Evaluates every assignment of an all-integer, finitely bounded model.
/// Throws InputError when a variable is continuous or the assignment count
/// exceeds cap. Kept free of simplex and branch-and-bound code paths.
EnumerationReport enumerate_milp(const MilpModel& model,
                                 std::int64_t cap = 2'000'000,
                                 double feas_tol = 1e-7);

/// Straight-line re-implementation of the whole scenario pipeline for small
/// configurations: DER dynamics, candidate prices, and dispatch optimization
/// are recomputed independently, with the dispatch optimum found by exact
/// enumeration (dynamic programming over committed-unit states) instead of
/// branch-and-bound. Output must match run_scenario exactly on the same
/// config. Throws InputError when the config is too large to enumerate.
RunReport reference_run(const RunConfig& config);

}  // namespace microgrid
