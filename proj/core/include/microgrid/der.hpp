#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace microgrid {

/// One demand-side resource (TCL, EV, battery) as a generalized battery.
struct DerParams {
  double a = 0.9;           // dissipation rate per interval
  double gamma = 1.0;       // SOC gained per charging interval
  double beta = 40.0;       // price-to-SOC slope, $/MWh per unit SOC
  double p_max = 30.0;      // maximum consumer price, $/MWh
  double soc_set = 0.7;     // recharge threshold (hysteresis)
  double soc_max = 1.0;
  double p_rated_kw = 6.0;  // power drawn while charging

  bool operator==(const DerParams&) const = default;
};

struct DerParamBounds {
  double a_min = 0.0, a_max = 1.0;
  double beta_min = 0.0, beta_max = 200.0;
  double gamma_min = 0.0, gamma_max = 1.0;

  bool operator==(const DerParamBounds&) const = default;
};

struct DerState {
  double soc = 1.0;
  bool charge_enabled = false;  // lockout hysteresis flag (m)
  bool on = false;              // price decision (v)

  bool operator==(const DerState&) const = default;
};

struct Der {
  DerParams params;
  DerState state;
  int class_id = 0;  // dissipation-class label used in reports

  bool operator==(const Der&) const = default;
};

using Population = std::vector<Der>;

/// Throws ConfigError when params fall outside bounds or violate
/// 0 <= soc_set < soc_max <= 1, p_rated > 0.
void validate_params(const DerParams& p, const DerParamBounds& b = {});

/// SOC update: soc' = min(a*soc + gamma*m*v, soc_max). m and v unchanged.
DerState step_soc(const DerState& s, const DerParams& p);

/// Willingness-to-pay: p_max - beta*soc, unclamped (may go negative).
double compute_price(const DerState& s, const DerParams& p);

/// On/off decision: true iff price >= p_clear.
bool decide_on(double price, double p_clear);

/// Lockout hysteresis: 0 when soc >= soc_max, 1 when soc < soc_set,
/// otherwise the previous flag.
bool update_lockout(const DerState& s, const DerParams& p);

/// Sum of m*v(p_clear)*p_rated over the population, v recomputed per DER.
double aggregate_demand(const Population& pop, double p_clear);

struct PopulationTrace {
  std::vector<double> demand_kw;   // per interval
  std::vector<double> soc_sum;     // sum_i soc after the interval update
  std::vector<double> mean_price;  // mean willingness-to-pay before the update
  std::vector<std::vector<double>> soc;  // [interval][der], post-update
  Population final_states;

  /// Sum over intervals of soc_sum: the scheduler's J3 term.
  double soc_total() const;
};

/// Steps the whole population over the price sequence. Per interval:
/// prices, decisions, demand, SOC step, lockout update, in that order.
/// Deterministic given inputs; the input population is not modified.
PopulationTrace simulate_population(const Population& pop,
                                    std::span<const double> price_sequence);

struct ClassSpec {
  double fraction = 1.0;
  DerParams params;

  bool operator==(const ClassSpec&) const = default;
};

struct PopulationSpec {
  int count = 1000;
  std::vector<ClassSpec> classes;
  DerParamBounds bounds;

  bool operator==(const PopulationSpec&) const = default;
};

/// Builds a population with class sizes by largest-remainder apportionment
/// and initial SOC drawn uniformly in [soc_set, soc_max] from the seed.
Population make_population(const PopulationSpec& spec, std::uint64_t seed);

}  // namespace microgrid
