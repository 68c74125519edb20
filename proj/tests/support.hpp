#pragma once

// Shared helpers for the unit and acceptance suites: seeded random model and
// config generators kept deliberately simple and deterministic.

#include <cstdint>
#include <string>
#include <vector>

#include "microgrid/config.hpp"
#include "microgrid/milp.hpp"
#include "microgrid/rng.hpp"

namespace testsupport {

// Random all-integer model with small domains: product of domain sizes kept
// under ~20k so exhaustive enumeration stays cheap. Integer coefficients and
// right-hand sides keep constraint evaluation exact.
inline microgrid::MilpModel random_integer_model(microgrid::Rng& rng) {
  using namespace microgrid;
  MilpModel m;
  const int n = static_cast<int>(rng.uniform_int(2, 12));
  std::int64_t product = 1;
  std::vector<double> obj;
  for (int j = 0; j < n; ++j) {
    std::int64_t domain = rng.uniform_int(2, 4);
    if (product * domain > 20'000) domain = 2;
    if (product * 2 > 20'000) domain = 1;
    product *= domain;
    const double lo = static_cast<double>(rng.uniform_int(-3, 2));
    m.add_variable("x" + std::to_string(j), VarKind::Integer, lo,
                   lo + static_cast<double>(domain - 1));
    obj.push_back(static_cast<double>(rng.uniform_int(-9, 9)));
  }
  const int n_cons = static_cast<int>(rng.uniform_int(1, 10));
  for (int i = 0; i < n_cons; ++i) {
    std::vector<MilpTerm> terms;
    for (int j = 0; j < n; ++j) {
      if (rng.uniform() < 0.6) continue;
      const double c = static_cast<double>(rng.uniform_int(-5, 5));
      if (c != 0.0) terms.push_back({j, c});
    }
    if (terms.empty()) terms.push_back({0, 1.0});
    // Right-hand side inside (or near) the achievable lhs range, so a healthy
    // share of the generated models is feasible.
    double lo = 0.0, hi = 0.0;
    for (const auto& t : terms) {
      const auto& v = m.variables()[t.var];
      lo += std::min(t.coeff * v.lower, t.coeff * v.upper);
      hi += std::max(t.coeff * v.lower, t.coeff * v.upper);
    }
    const double rhs = std::floor(rng.uniform(lo - 2.0, hi + 3.0));
    const double roll = rng.uniform();
    const auto sense = roll < 0.45 ? ConstraintSense::LessEqual
                       : roll < 0.9 ? ConstraintSense::GreaterEqual
                                    : ConstraintSense::Equal;
    m.add_constraint("c" + std::to_string(i), std::move(terms), sense, rhs);
  }
  m.set_objective(rng.uniform() < 0.5 ? ObjectiveSense::Minimize
                                      : ObjectiveSense::Maximize,
                  std::move(obj));
  return m;
}

// Small pipeline config for oracle-equivalence checks. Unit classes are
// either DG-like (positive start and no-load costs) or BESS-like (both zero)
// with generic cost values, so the dispatch optimum is unique; DER rated
// powers are binary-friendly so demand sums are exact.
inline microgrid::RunConfig small_config(std::uint64_t seed, int scenario,
                                         int n_k, int n_ders, int n_classes,
                                         bool fixed_horizon = false,
                                         bool binding_capacity = false) {
  using namespace microgrid;
  Rng rng(seed * 977 + 13);
  RunConfig cfg = default_config();
  cfg.scenario = scenario;
  cfg.seed = seed;
  cfg.horizon.n_k = n_k;
  cfg.horizon.mode = fixed_horizon ? HorizonConfig::Mode::Fixed
                                   : HorizonConfig::Mode::Shrinking;
  cfg.horizon.fixed_horizon_length = fixed_horizon ? 2 : 24;
  cfg.horizon.j3_weight = 0.5 + rng.uniform();

  cfg.population.count = n_ders;
  cfg.population.classes.clear();
  const double socs[3] = {0.55, 0.6, 0.65};
  for (int c = 0; c < 2; ++c) {
    ClassSpec cs;
    cs.fraction = c == 0 ? 0.5 : 0.5;
    cs.params.a = 0.88 + 0.04 * c;
    cs.params.beta = 30.0 + 5.0 * c;
    cs.params.p_max = 30.0;
    cs.params.soc_set = socs[c];
    cs.params.soc_max = 1.0;
    cs.params.p_rated_kw = c == 0 ? 6.0 : 4.0;
    cfg.population.classes.push_back(cs);
  }

  cfg.unit_classes.clear();
  {
    UnitClass dg;
    dg.kind = UnitClass::Kind::DG;
    dg.name = "dg";
    dg.count = static_cast<int>(rng.uniform_int(1, 2));
    dg.bid_ladder_kw = {8.0, 16.0};
    dg.c_energy = 0.9 + 0.2 * rng.uniform();
    dg.c_start = 1.5 + rng.uniform();
    dg.c_noload = 0.8 + 0.3 * rng.uniform();
    cfg.unit_classes.push_back(dg);
  }
  if (n_classes > 1) {
    UnitClass bess;
    bess.kind = UnitClass::Kind::BESS;
    bess.name = "bess";
    bess.count = static_cast<int>(rng.uniform_int(1, 2));
    bess.bid_ladder_kw = {4.0, 12.0};
    bess.c_energy = 0.1 + 0.05 * rng.uniform();
    bess.c_start = 0.0;
    bess.c_noload = 0.0;
    cfg.unit_classes.push_back(bess);
  }

  cfg.market.p_base.assign(static_cast<std::size_t>(n_k), 15.0);
  cfg.market.price_bids = {15.0, 25.0, 35.0};
  cfg.market.feeder_capacity_kw =
      binding_capacity ? 8.0 : 10'000.0;

  // One small turbine and a small PV plant; series sized to n_k.
  cfg.res.wind_units = {WtModel{3.5, 25.0, 18.0, 1.23, 60.0, 0.4}};
  cfg.res.pv.p_max_kw = 12.0;
  cfg.forecast.irradiance = synthetic_irradiance(n_k);
  cfg.forecast.wind_speed = synthetic_wind(n_k);
  cfg.forecast.irr_uncertainty = synthetic_irr_uncertainty(n_k);
  cfg.forecast.wind_uncertainty = synthetic_wind_uncertainty(n_k);

  validate_config(cfg);
  return cfg;
}

}  // namespace testsupport
