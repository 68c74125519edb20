#include <doctest.h>

#include <cmath>

#include "microgrid/dispatch.hpp"
#include "microgrid/errors.hpp"
#include "microgrid/milp.hpp"

using namespace microgrid;

namespace {

UnitClass paper_dg() {
  UnitClass dg;
  dg.kind = UnitClass::Kind::DG;
  dg.name = "dg";
  dg.count = 10;
  dg.bid_ladder_kw = {50.0, 100.0, 150.0, 200.0};
  dg.c_energy = 1.0;
  dg.c_start = 2.0;
  dg.c_noload = 1.0;
  return dg;
}

UnitClass paper_bess() {
  UnitClass b;
  b.kind = UnitClass::Kind::BESS;
  b.name = "bess";
  b.count = 50;
  b.bid_ladder_kw = {10.0, 20.0, 30.0, 40.0};
  b.c_energy = 0.1;
  b.c_start = 0.0;
  b.c_noload = 0.0;
  return b;
}

struct Solved {
  DispatchModel dm;
  MilpSolution sol;
  std::vector<DispatchDecision> decisions;
};

Solved solve_dispatch(const std::vector<double>& demand,
                      const std::vector<double>& res,
                      const std::vector<UnitClass>& classes,
                      const std::vector<int>& prev,
                      DispatchModelOptions opts = {}) {
  Solved s{build_dispatch_model(demand, res, classes, prev, opts), {}, {}};
  s.sol = solve_milp(s.dm.model);
  REQUIRE(s.sol.status == SolveStatus::Optimal);
  s.decisions = extract_decisions(s.dm.index, s.sol.values, classes, prev, demand, res);
  return s;
}

}  // namespace

TEST_CASE("dispatch model: zero demand dispatches nothing") {
  const std::vector<UnitClass> classes{paper_dg(), paper_bess()};
  const auto s = solve_dispatch({0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, classes, {0, 0});
  CHECK(s.sol.objective == doctest::Approx(0.0).epsilon(1e-12));
  for (const auto& d : s.decisions) {
    for (const auto& cd : d.classes) {
      CHECK(cd.power_kw == 0.0);
      CHECK(cd.committed == 0);
      CHECK(cd.started == 0);
    }
    CHECK(d.unserved_kw == 0.0);
  }
}

TEST_CASE("dispatch toy: demand 50 is served by one DG at 50 kW for 52") {
  const std::vector<UnitClass> classes{paper_dg()};
  const auto s = solve_dispatch({50.0}, {0.0}, classes, {0});
  CHECK(s.sol.objective == doctest::Approx(52.0).epsilon(1e-12));
  const ClassDispatch& dg = s.decisions[0].classes[0];
  CHECK(dg.producing == std::vector<int>{1, 0, 0, 0});
  CHECK(dg.committed == 1);
  CHECK(dg.started == 1);
  CHECK(dg.power_kw == 50.0);
  CHECK(s.decisions[0].unserved_kw == 0.0);
  const IntervalCost cost = dispatch_cost(s.decisions[0], classes, s.dm.slack_penalty);
  CHECK(cost.j1 + cost.j2 == doctest::Approx(52.0).epsilon(1e-12));
}

TEST_CASE("dispatch: starting late beats committing early and idling") {
  // Demand {0, 50}: start at k=1 costs 52; committing at k=0 and idling
  // costs 2 + 1 + 50 = 53.
  const std::vector<UnitClass> classes{paper_dg()};
  const auto s = solve_dispatch({0.0, 50.0}, {0.0, 0.0}, classes, {0});
  CHECK(s.sol.objective == doctest::Approx(52.0).epsilon(1e-12));
  CHECK(s.decisions[0].classes[0].committed == 0);
  CHECK(s.decisions[1].classes[0].committed == 1);
  CHECK(s.decisions[1].classes[0].started == 1);
}

TEST_CASE("dispatch: hot unit is kept committed when restarting costs more") {
  // Demand {50, 0, 50} with a high start cost: holding the unit hot through
  // the idle interval (no-load 1) beats a second start.
  UnitClass dg = paper_dg();
  dg.c_start = 5.0;
  const std::vector<UnitClass> classes{dg};
  const auto s = solve_dispatch({50.0, 0.0, 50.0}, {0.0, 0.0, 0.0}, classes, {0});
  // start (5) + 50 + no-load (1) + 50 = 106 vs 5 + 50 + 5 + 50 = 110.
  CHECK(s.sol.objective == doctest::Approx(106.0).epsilon(1e-12));
  CHECK(s.decisions[1].classes[0].committed == 1);
  CHECK(s.decisions[1].classes[0].power_kw == 0.0);
  CHECK(s.decisions[2].classes[0].started == 0);
}

TEST_CASE("dispatch: RES offsets demand before units run") {
  const std::vector<UnitClass> classes{paper_dg(), paper_bess()};
  const auto s = solve_dispatch({120.0}, {120.0}, classes, {0, 0});
  CHECK(s.sol.objective == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(s.decisions[0].res_used_kw == 120.0);
  CHECK(s.decisions[0].unserved_kw == 0.0);
}

TEST_CASE("dispatch: infeasible balance is relaxed into unserved energy") {
  UnitClass dg = paper_dg();
  dg.count = 1;  // max supply 200 kW
  const std::vector<UnitClass> classes{dg};
  const auto s = solve_dispatch({500.0}, {0.0}, classes, {0});
  CHECK(s.decisions[0].unserved_kw == doctest::Approx(300.0).epsilon(1e-12));
  CHECK(s.decisions[0].classes[0].power_kw == 200.0);
  const IntervalCost cost = dispatch_cost(s.decisions[0], classes, s.dm.slack_penalty);
  CHECK(cost.penalty == doctest::Approx(300.0 * s.dm.slack_penalty).epsilon(1e-12));
}

TEST_CASE("dispatch: without the slack the same model is infeasible") {
  UnitClass dg = paper_dg();
  dg.count = 1;
  DispatchModelOptions opts;
  opts.include_unserved_slack = false;
  const auto dm = build_dispatch_model(std::vector<double>{500.0},
                                       std::vector<double>{0.0},
                                       std::vector<UnitClass>{dg},
                                       std::vector<int>{0}, opts);
  CHECK(solve_milp(dm.model).status == SolveStatus::Infeasible);
}

TEST_CASE("dispatch: horizon energy budget binds") {
  UnitClass bess = paper_bess();
  bess.horizon_energy_budget_kwh = 50.0;
  const std::vector<UnitClass> classes{bess};
  const auto s = solve_dispatch({40.0, 40.0}, {0.0, 0.0}, classes, {0});
  double energy = 0.0;
  for (const auto& d : s.decisions) energy += d.classes[0].power_kw;
  CHECK(energy <= 50.0 + 1e-9);
  CHECK(s.decisions[0].unserved_kw + s.decisions[1].unserved_kw ==
        doctest::Approx(30.0).epsilon(1e-9));
}

TEST_CASE("canonical_producing: minimal units preferring large bids") {
  const std::vector<double> ladder{10.0, 20.0, 30.0, 40.0};
  // 4 x 10 kW collapses to 1 x 40 kW.
  CHECK(canonical_producing(std::vector<int>{4, 0, 0, 0}, ladder, 50) ==
        std::vector<int>{0, 0, 0, 1});
  // 60 kW in two units: 20 + 40 beats 30 + 30.
  CHECK(canonical_producing(std::vector<int>{0, 3, 0, 0}, ladder, 50) ==
        std::vector<int>{0, 1, 0, 1});
  // Zero stays zero.
  CHECK(canonical_producing(std::vector<int>{0, 0, 0, 0}, ladder, 50) ==
        std::vector<int>{0, 0, 0, 0});
  // A ladder where the greedy large-bid split fails: 60 = 2 x 30 only.
  const std::vector<double> awkward{30.0, 40.0};
  CHECK(canonical_producing(std::vector<int>{2, 0}, awkward, 10) ==
        std::vector<int>{2, 0});
}

TEST_CASE("assemble_decision: costless classes are canonicalized") {
  const std::vector<UnitClass> classes{paper_dg(), paper_bess()};
  const std::vector<std::vector<int>> producing{{1, 0, 0, 0}, {4, 0, 0, 0}};
  const std::vector<int> committed{2, 4};
  const std::vector<int> prev{0, 0};
  const DispatchDecision d =
      assemble_decision(classes, producing, committed, prev, 90.0, 0.0);
  // DG keeps the solver commitment; BESS is re-expressed as 1 x 40.
  CHECK(d.classes[0].committed == 2);
  CHECK(d.classes[0].started == 2);
  CHECK(d.classes[1].producing == std::vector<int>{0, 0, 0, 1});
  CHECK(d.classes[1].committed == 1);
  CHECK(d.classes[1].started == 1);
  CHECK(d.unserved_kw == 0.0);
}

TEST_CASE("dispatch model validation") {
  UnitClass bad = paper_dg();
  bad.bid_ladder_kw = {50.0, 50.0};
  CHECK_THROWS_AS(validate_unit_class(bad), ConfigError);
  bad = paper_dg();
  bad.count = 0;
  CHECK_THROWS_AS(validate_unit_class(bad), ConfigError);
  bad = paper_dg();
  bad.c_energy = -1.0;
  CHECK_THROWS_AS(validate_unit_class(bad), ConfigError);

  CHECK_THROWS_AS(build_dispatch_model(std::vector<double>{1.0},
                                       std::vector<double>{},
                                       std::vector<UnitClass>{paper_dg()},
                                       std::vector<int>{0}),
                  InputError);
  CHECK_THROWS_AS(build_dispatch_model(std::vector<double>{1.0},
                                       std::vector<double>{0.0},
                                       std::vector<UnitClass>{paper_dg()},
                                       std::vector<int>{99}),
                  InputError);
}

TEST_CASE("slack penalty resolution") {
  const std::vector<UnitClass> classes{paper_dg(), paper_bess()};
  CHECK(resolve_slack_penalty(classes, 0.0) == doctest::Approx(1000.0));
  CHECK(resolve_slack_penalty(classes, 77.0) == 77.0);
  UnitClass freebie = paper_bess();
  freebie.c_energy = 0.0;
  CHECK(resolve_slack_penalty(std::vector<UnitClass>{freebie}, 0.0) == 1000.0);
}
