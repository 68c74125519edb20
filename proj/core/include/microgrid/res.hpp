#pragma once

#include <span>
#include <utility>
#include <vector>

namespace microgrid {

struct WtModel {
  double v_min = 3.5;        // cut-in wind speed, m/s
  double v_max = 25.0;       // rated/cut-out speed, m/s
  double p_max_kw = 2000.0;  // rated power
  double rho = 1.23;         // air density, kg/m^3
  double area_m2 = 8495.0;   // swept area
  double cp = 0.4;           // power coefficient, <= 0.593 (Betz limit)

  bool operator==(const WtModel&) const = default;
};

struct PvModel {
  double irr_min = 100.0;    // minimum operating irradiance, W/m^2
  double irr_max = 1050.0;   // irradiance at rated power, W/m^2
  double p_max_kw = 3000.0;  // rated power
  double i_scs = 7.84;       // short-circuit current at standard conditions, A
  double g_as = 1000.0;      // standard irradiance, W/m^2
  double delta_isc = 0.102;  // temperature coefficient of short-circuit current
  double t_s_c = 25.0;       // standard temperature, Celsius
  double r_s = 0.393;        // series resistance, ohm
  double r_sh = 100.0;       // shunt resistance, ohm
  double ideality = 1.3;     // diode ideality factor
  double i_sat = 0.0;        // diode saturation current, A; 0 = auto-calibrated
  double voc_ref = 0.6;      // per-cell open-circuit target used by calibration

  bool operator==(const PvModel&) const = default;
};

struct ResForecast {
  std::vector<double> irradiance;        // W/m^2 per interval
  std::vector<double> wind_speed;        // m/s per interval
  std::vector<double> irr_uncertainty;   // lower-deviation bounds, empty = none
  std::vector<double> wind_uncertainty;  // lower-deviation bounds, empty = none

  bool has_uncertainty() const {
    return !irr_uncertainty.empty() && !wind_uncertainty.empty();
  }
  bool operator==(const ResForecast&) const = default;
};

void validate_wt(const WtModel& m);
void validate_pv(const PvModel& m);
/// Checks non-negativity and that all non-empty series share one length.
void validate_forecast(const ResForecast& f);

enum class WindPowerMode {
  Physics,       // cubic law in the mid range, capped at rated power
  HoldPrevious,  // literal hold-previous-output mid branch
};

/// Wind power map. Below cut-in: 0. At or above cut-out: rated. Mid-range:
/// the cubic law (Physics) or the caller-held previous value (HoldPrevious).
double wind_power(double v, const WtModel& m,
                  WindPowerMode mode = WindPowerMode::Physics,
                  double prev_kw = 0.0);

/// Solar power map: 0 below irr_min, rated at or above irr_max, linear ramp
/// between. Never exceeds rated power.
double solar_power(double irr, const PvModel& m);

/// Photo-current: i_scs * (g_a / g_as) * (1 + delta_isc * (t - t_s)).
double photo_current(double g_a, double t_c, const PvModel& m);

struct PvCurve {
  std::vector<std::pair<double, double>> points;  // (V, P) pairs
  double v_mpp = 0.0;
  double p_mpp = 0.0;
};

/// Sweeps terminal voltage from 0 to open circuit, solving the implicit
/// single-diode equation at each point by bisection. Throws NumericalError
/// when the root cannot be bracketed.
PvCurve pv_curve(const PvModel& m, double g_a, double t_c, int n_points = 128);

/// PV power via the single-diode curve: rated power scaled by the ratio of
/// the max-power point at (g_a, t) to the max-power point at standard
/// conditions. Alternative to the solar_power ramp.
double pv_power_from_curve(const PvModel& m, double g_a, double t_c);

/// Total available RES power per interval: each wind unit plus the PV unit.
/// With worst_case, inputs are first reduced by the uncertainty bounds,
/// floored at zero.
std::vector<double> res_series(const ResForecast& f,
                               std::span<const WtModel> wind_units,
                               const PvModel& pv, bool worst_case,
                               WindPowerMode mode = WindPowerMode::Physics);

}  // namespace microgrid
