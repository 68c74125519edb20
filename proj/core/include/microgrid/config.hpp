#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "microgrid/der.hpp"
#include "microgrid/dispatch.hpp"
#include "microgrid/market.hpp"
#include "microgrid/milp.hpp"
#include "microgrid/mpc.hpp"
#include "microgrid/res.hpp"

namespace microgrid {

struct ResConfig {
  std::vector<WtModel> wind_units;
  PvModel pv;
  WindPowerMode wind_power_mode = WindPowerMode::Physics;

  bool operator==(const ResConfig&) const = default;
};

/// Full run description. Defaults reproduce the bundled residential preset:
/// 1000 DERs in three dissipation classes, 10 DGs, 50 BESSs, two 2 MW wind
/// turbines and a 3 MW PV plant over a 24 h day.
struct RunConfig {
  int scenario = 1;
  std::uint64_t seed = 1;
  HorizonConfig horizon;
  PopulationSpec population;
  std::vector<UnitClass> unit_classes;
  MarketConfig market;
  ResConfig res;
  ResForecast forecast;
  SolverOptions solver;
  double slack_penalty = 0.0;  // 0 selects the automatic penalty

  bool operator==(const RunConfig&) const = default;
};

/// The bundled preset. Series are synthetic approximations of a clear-sky
/// irradiance day and a night-heavy wind day.
RunConfig default_config();

/// Alternate preset keeping the small nameplate ratings (3 kW wind,
/// 0.1 kW solar) instead of the MW-scale ones.
RunConfig default_config_small_ratings();

/// Validates cross-field consistency; throws ConfigError naming the field.
void validate_config(const RunConfig& cfg);

/// Parses a JSON config. Missing keys fall back to the preset defaults,
/// unknown keys are rejected. An empty or whitespace-only document yields the
/// default preset. Forecast entries may be inline arrays or {"file": path}.
RunConfig parse_config(const std::string& json_text);

/// Loads and validates a config file.
RunConfig load_config(const std::string& path);

/// Serializes a config to JSON (series inline). parse_config(save_config(c))
/// reproduces c exactly.
std::string save_config(const RunConfig& cfg);

/// Reads a two-column delimited series: interval index from 0, value.
/// Header row optional. Throws InputError on gaps, duplicates, or
/// non-numeric values.
std::vector<double> load_series(const std::string& path);

/// Synthetic default series: zero at night, peak near noon.
std::vector<double> synthetic_irradiance(int n_k);
/// Synthetic default series: higher during night hours.
std::vector<double> synthetic_wind(int n_k);
/// Calibrated lower-deviation bounds for the robust scenario.
std::vector<double> synthetic_irr_uncertainty(int n_k);
std::vector<double> synthetic_wind_uncertainty(int n_k);

}  // namespace microgrid
