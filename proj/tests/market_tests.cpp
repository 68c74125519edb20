#include <doctest.h>

#include <algorithm>

#include "microgrid/errors.hpp"
#include "microgrid/market.hpp"
#include "microgrid/rng.hpp"

using namespace microgrid;

namespace {

Population three_ders() {
  // Willingness-to-pay 10, 20, 30 at p_rated 6 each.
  Population pop;
  for (double soc : {0.5, 0.25, 0.0}) {
    Der d;
    d.state.soc = soc;
    d.state.charge_enabled = true;
    pop.push_back(d);
  }
  return pop;
}

DemandCurve random_curve(Rng& rng) {
  std::vector<DemandCurve::Breakpoint> pts;
  double price = rng.uniform(0.0, 10.0);
  double demand = rng.uniform(50.0, 200.0);
  const int n = static_cast<int>(rng.uniform_int(0, 6));
  for (int i = 0; i < n; ++i) {
    pts.push_back({price, demand});
    price += rng.uniform(1.0, 10.0);
    demand -= rng.uniform(0.0, demand);
  }
  return DemandCurve(std::move(pts));
}

// Brute-force clearing over the bid list, mirroring the documented rule.
ClearingOutcome clear_reference(const DemandCurve& curve, double p_base,
                                double cap, const std::vector<double>& bids) {
  if (curve.demand_at(p_base) <= cap) return {p_base, false};
  for (double b : bids)
    if (curve.demand_at(b) <= cap) return {b, false};
  return {bids.back(), true};
}

}  // namespace

TEST_CASE("build_demand_curve: empty and locked-out populations") {
  CHECK(build_demand_curve({}).total_demand_kw() == 0.0);
  Population pop = three_ders();
  for (auto& d : pop) d.state.charge_enabled = false;
  CHECK(build_demand_curve(pop).total_demand_kw() == 0.0);
}

TEST_CASE("build_demand_curve: enumerated step function") {
  const DemandCurve curve = build_demand_curve(three_ders());
  CHECK(curve.demand_at(5.0) == doctest::Approx(18.0));
  CHECK(curve.demand_at(15.0) == doctest::Approx(12.0));
  CHECK(curve.demand_at(25.0) == doctest::Approx(6.0));
  CHECK(curve.demand_at(35.0) == 0.0);
  // A DER's own price is included (>= branch).
  CHECK(curve.demand_at(10.0) == doctest::Approx(18.0));
  CHECK(curve.demand_at(20.0) == doctest::Approx(12.0));
  CHECK(curve.demand_at(30.0) == doctest::Approx(6.0));
}

TEST_CASE("DemandCurve validates its invariants") {
  CHECK_THROWS_AS(DemandCurve({{1.0, 5.0}, {1.0, 4.0}}), ConfigError);
  CHECK_THROWS_AS(DemandCurve({{1.0, 5.0}, {2.0, 6.0}}), ConfigError);
  CHECK_THROWS_AS(DemandCurve({{1.0, -5.0}}), ConfigError);
}

TEST_CASE("clear_price: examples") {
  const DemandCurve curve = build_demand_curve(three_ders());
  const std::vector<double> bids{15.0, 25.0, 35.0};

  // Capacity never binds.
  CHECK(clear_price(DemandCurve{}, 15.0, 10.0, bids) == ClearingOutcome{15.0, false});
  CHECK(clear_price(curve, 15.0, 1000.0, bids) == ClearingOutcome{15.0, false});

  // demand(15)=12 > 10, demand(25)=6 <= 10.
  CHECK(clear_price(curve, 15.0, 10.0, bids) == ClearingOutcome{25.0, false});

  // Nothing fits: largest bid, flagged. Use a curve that stays above cap.
  const DemandCurve heavy({{40.0, 50.0}});
  CHECK(clear_price(heavy, 15.0, 10.0, bids) == ClearingOutcome{35.0, true});

  CHECK_THROWS_AS(clear_price(curve, 15.0, 10.0, std::vector<double>{}), ConfigError);
  CHECK_THROWS_AS(clear_price(curve, 15.0, 10.0, std::vector<double>{25.0, 15.0}),
                  ConfigError);
}

TEST_CASE("clear_price: output is p_base or a bid; capacity respected; monotone") {
  Rng rng(17);
  const std::vector<double> bids{12.0, 18.0, 24.0, 30.0};
  for (int rep = 0; rep < 100; ++rep) {
    const DemandCurve curve = random_curve(rng);
    const double p_base = rng.uniform(0.0, 40.0);
    const double cap = rng.uniform(1.0, 250.0);
    const ClearingOutcome out = clear_price(curve, p_base, cap, bids);

    const bool is_bid = std::find(bids.begin(), bids.end(), out.price) != bids.end();
    CHECK((out.price == p_base || is_bid));
    if (!out.over_capacity) CHECK(curve.demand_at(out.price) <= cap);
    CHECK(out == clear_reference(curve, p_base, cap, bids));

    // Raising capacity never raises the clearing price.
    const ClearingOutcome roomier = clear_price(curve, p_base, cap * 2.0, bids);
    CHECK(roomier.price <= out.price);
  }
}

TEST_CASE("enumerate_price_plans: construction") {
  const std::vector<double> bids{15.0, 25.0, 35.0};
  const auto plans = enumerate_price_plans(bids, 6);
  REQUIRE(plans.size() == 3);
  for (std::size_t i = 0; i < plans.size(); ++i) {
    CHECK(plans[i].size() == 6);
    for (double p : plans[i]) CHECK(p == bids[i]);
  }
  CHECK(enumerate_price_plans(std::vector<double>{15.0}, 4).size() == 1);
  CHECK(enumerate_price_plans(std::vector<double>{}, 4).empty());
  CHECK_THROWS_AS(enumerate_price_plans(bids, 0), InputError);
}
