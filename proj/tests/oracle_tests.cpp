#include <doctest.h>

#include <cmath>

#include "microgrid/config.hpp"
#include "microgrid/errors.hpp"
#include "microgrid/oracle.hpp"
#include "support.hpp"

using namespace microgrid;

TEST_CASE("enumerate_milp: single binary, no constraints") {
  MilpModel m;
  m.add_variable("x", VarKind::Integer, 0.0, 1.0);
  m.set_objective(ObjectiveSense::Minimize, {1.0});
  const EnumerationReport r = enumerate_milp(m);
  CHECK(r.feasible);
  CHECK(r.objective == 0.0);
  CHECK(r.best_assignment == std::vector<double>{0.0});
  CHECK(r.assignments_enumerated == 2);
}

TEST_CASE("enumerate_milp: knapsack ground truth") {
  MilpModel m;
  m.add_variable("a", VarKind::Integer, 0.0, 1.0);
  m.add_variable("b", VarKind::Integer, 0.0, 1.0);
  m.add_variable("c", VarKind::Integer, 0.0, 1.0);
  m.add_constraint("pick2", {{0, 1.0}, {1, 1.0}, {2, 1.0}},
                   ConstraintSense::LessEqual, 2.0);
  m.set_objective(ObjectiveSense::Maximize, {5.0, 4.0, 3.0});
  const EnumerationReport r = enumerate_milp(m);
  CHECK(r.feasible);
  CHECK(r.objective == 9.0);
  CHECK(r.best_assignment == std::vector<double>{1.0, 1.0, 0.0});
  CHECK(r.assignments_enumerated == 8);
}

TEST_CASE("enumerate_milp: infeasible binary pair") {
  MilpModel m;
  m.add_variable("x", VarKind::Integer, 0.0, 1.0);
  m.add_variable("y", VarKind::Integer, 0.0, 1.0);
  m.add_constraint("need3", {{0, 1.0}, {1, 1.0}}, ConstraintSense::GreaterEqual, 3.0);
  m.set_objective(ObjectiveSense::Minimize, {1.0, 1.0});
  const EnumerationReport r = enumerate_milp(m);
  CHECK_FALSE(r.feasible);
  CHECK(r.assignments_enumerated == 4);
}

TEST_CASE("enumerate_milp: refusals") {
  MilpModel cont;
  cont.add_variable("x", VarKind::Continuous, 0.0, 1.0);
  cont.set_objective(ObjectiveSense::Minimize, {1.0});
  CHECK_THROWS_AS(enumerate_milp(cont), InputError);

  MilpModel big;
  for (int j = 0; j < 10; ++j)
    big.add_variable("x" + std::to_string(j), VarKind::Integer, 0.0, 9.0);
  big.set_objective(ObjectiveSense::Minimize, std::vector<double>(10, 1.0));
  CHECK_THROWS_AS(enumerate_milp(big, 1000), InputError);
}

TEST_CASE("enumerate_milp: dispatch toy bid choice") {
  // Cover demand 50 with one DG whose bids are 50/100/150/200 at cost 1 $/kW:
  // pick the 50 kW bid. Binary per bid level, at most one level on.
  MilpModel m;
  const double bids[4] = {50.0, 100.0, 150.0, 200.0};
  std::vector<MilpTerm> cover, onehot;
  std::vector<double> obj;
  for (int l = 0; l < 4; ++l) {
    m.add_variable("bid" + std::to_string(l), VarKind::Integer, 0.0, 1.0);
    cover.push_back({l, bids[l]});
    onehot.push_back({l, 1.0});
    obj.push_back(bids[l]);
  }
  m.add_constraint("cover", cover, ConstraintSense::GreaterEqual, 50.0);
  m.add_constraint("one", onehot, ConstraintSense::LessEqual, 1.0);
  m.set_objective(ObjectiveSense::Minimize, obj);
  const EnumerationReport r = enumerate_milp(m);
  CHECK(r.feasible);
  CHECK(r.objective == 50.0);
  CHECK(r.best_assignment == std::vector<double>{1.0, 0.0, 0.0, 0.0});
}

TEST_CASE("reference_run: refuses oversized configs") {
  RunConfig cfg = testsupport::small_config(1, 1, 3, 6, 2);
  cfg.population.count = 300;
  CHECK_THROWS_AS(reference_run(cfg), InputError);

  RunConfig long_cfg = testsupport::small_config(1, 1, 3, 6, 2);
  long_cfg.horizon.n_k = 24;
  long_cfg.market.p_base.assign(24, 15.0);
  long_cfg.forecast.irradiance = synthetic_irradiance(24);
  long_cfg.forecast.wind_speed = synthetic_wind(24);
  long_cfg.forecast.irr_uncertainty = synthetic_irr_uncertainty(24);
  long_cfg.forecast.wind_uncertainty = synthetic_wind_uncertainty(24);
  CHECK_THROWS_AS(reference_run(long_cfg), InputError);
}

TEST_CASE("reference_run equals run_scenario on a trivial zero-demand config") {
  RunConfig cfg = testsupport::small_config(2, 1, 3, 5, 1);
  cfg.market.p_base.assign(cfg.market.p_base.size(), 500.0);  // nobody pays
  const RunReport mpc = run_scenario(cfg);
  const RunReport ref = reference_run(cfg);
  CHECK(mpc == ref);
}

TEST_CASE("reference_run equals run_scenario on small configs, all scenarios") {
  for (int scenario : {1, 2, 3}) {
    for (int seed : {5, 6}) {
      const RunConfig cfg = testsupport::small_config(seed, scenario, 3, 8, 2);
      CAPTURE(scenario);
      CAPTURE(seed);
      const RunReport mpc = run_scenario(cfg);
      const RunReport ref = reference_run(cfg);
      REQUIRE(mpc.steps.size() == ref.steps.size());
      for (std::size_t k = 0; k < mpc.steps.size(); ++k) {
        CAPTURE(k);
        CHECK(mpc.steps[k] == ref.steps[k]);
      }
      CHECK(mpc == ref);
    }
  }
}

TEST_CASE("reference_run: scenario 2 chooses the same bids as run_scenario") {
  RunConfig cfg = testsupport::small_config(9, 2, 2, 10, 2);
  cfg.market.price_bids = {15.0, 25.0};
  const RunReport mpc = run_scenario(cfg);
  const RunReport ref = reference_run(cfg);
  REQUIRE(mpc.steps.size() == ref.steps.size());
  for (std::size_t k = 0; k < mpc.steps.size(); ++k)
    CHECK(mpc.steps[k].clearing_price == ref.steps[k].clearing_price);
}
