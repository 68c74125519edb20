#include "microgrid/res.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "microgrid/errors.hpp"

namespace microgrid {

namespace {

// Thermal voltage at 25 C; the temperature dependence of kT/q is far below
// the fidelity of the rest of the model.
constexpr double kThermalVolt = 0.025693;

double diode_scale(const PvModel& m) { return m.ideality * kThermalVolt; }

// Saturation current such that the open-circuit voltage sits at voc_ref under
// standard conditions.
double saturation_current(const PvModel& m) {
  if (m.i_sat > 0.0) return m.i_sat;
  const double iph = m.i_scs;
  const double leak = m.voc_ref / m.r_sh;
  const double denom = std::expm1(m.voc_ref / diode_scale(m));
  return std::max((iph - leak) / denom, 1e-30);
}

// Cell current at terminal voltage v: the unique root of
//   f(i) = iph - i_sat*expm1((v + i*r_s)/(n*vt)) - (v + i*r_s)/r_sh - i,
// which is strictly decreasing in i.
double cell_current(const PvModel& m, double iph, double i_sat, double v) {
  const double ns = diode_scale(m);
  auto f = [&](double i) {
    const double vd = v + i * m.r_s;
    return iph - i_sat * std::expm1(vd / ns) - vd / m.r_sh - i;
  };
  double lo = -iph - 1.0;
  double hi = iph + 1.0;
  double flo = f(lo);
  double fhi = f(hi);
  for (int grow = 0; grow < 64 && flo < 0.0; ++grow) {
    lo = lo * 2.0 - 1.0;
    flo = f(lo);
  }
  for (int grow = 0; grow < 64 && fhi > 0.0; ++grow) {
    hi = hi * 2.0 + 1.0;
    fhi = f(hi);
  }
  if (flo < 0.0 || fhi > 0.0)
    throw NumericalError("pv cell current: failed to bracket the diode equation root");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm >= 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-13 * (1.0 + std::abs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

// Open-circuit voltage: cell_current is strictly decreasing in v, root of
// current(v) = 0.
double open_circuit_voltage(const PvModel& m, double iph, double i_sat) {
  if (iph <= 0.0) return 0.0;
  double lo = 0.0;
  double hi = std::max(m.voc_ref, 0.1);
  double ihi = cell_current(m, iph, i_sat, hi);
  int grow = 0;
  while (ihi > 0.0) {
    if (++grow > 64)
      throw NumericalError("pv curve: failed to bracket the open-circuit voltage");
    hi *= 2.0;
    ihi = cell_current(m, iph, i_sat, hi);
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cell_current(m, iph, i_sat, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-13 * (1.0 + hi)) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void validate_wt(const WtModel& m) {
  if (!(m.v_min > 0.0 && m.v_min < m.v_max))
    throw ConfigError("wind model: require 0 < v_min < v_max");
  if (!(m.cp > 0.0 && m.cp <= 0.593))
    throw ConfigError("wind model: power coefficient must lie in (0, 0.593]");
  if (!(m.rho > 0.0 && m.area_m2 > 0.0 && m.p_max_kw > 0.0))
    throw ConfigError("wind model: rho, area, p_max must be positive");
}

void validate_pv(const PvModel& m) {
  if (!(m.irr_min >= 0.0 && m.irr_min < m.irr_max))
    throw ConfigError("pv model: require 0 <= irr_min < irr_max");
  if (!(m.i_scs > 0.0 && m.g_as > 0.0))
    throw ConfigError("pv model: i_scs and g_as must be positive");
  if (!(m.r_s >= 0.0 && m.r_sh > 0.0))
    throw ConfigError("pv model: require r_s >= 0 and r_sh > 0");
  if (!(m.p_max_kw > 0.0)) throw ConfigError("pv model: p_max must be positive");
  if (!(m.ideality > 0.0)) throw ConfigError("pv model: ideality must be positive");
}

void validate_forecast(const ResForecast& f) {
  const std::size_t n = f.irradiance.size();
  if (f.wind_speed.size() != n)
    throw InputError("forecast: irradiance and wind series lengths differ");
  if (!f.irr_uncertainty.empty() && f.irr_uncertainty.size() != n)
    throw InputError("forecast: irradiance uncertainty length differs from series");
  if (!f.wind_uncertainty.empty() && f.wind_uncertainty.size() != n)
    throw InputError("forecast: wind uncertainty length differs from series");
  for (double v : f.irradiance)
    if (v < 0.0) throw InputError("forecast: negative irradiance");
  for (double v : f.wind_speed)
    if (v < 0.0) throw InputError("forecast: negative wind speed");
  for (double v : f.irr_uncertainty)
    if (v < 0.0) throw InputError("forecast: negative irradiance uncertainty bound");
  for (double v : f.wind_uncertainty)
    if (v < 0.0) throw InputError("forecast: negative wind uncertainty bound");
}

double wind_power(double v, const WtModel& m, WindPowerMode mode, double prev_kw) {
  if (v < 0.0) throw InputError("wind speed must be non-negative");
  if (v < m.v_min) return 0.0;
  if (v >= m.v_max) return m.p_max_kw;
  if (mode == WindPowerMode::HoldPrevious)
    return std::clamp(prev_kw, 0.0, m.p_max_kw);
  const double watts = 0.5 * m.rho * m.area_m2 * (v * v * v) * m.cp;
  return std::min(watts / 1000.0, m.p_max_kw);
}

double solar_power(double irr, const PvModel& m) {
  if (irr < 0.0) throw InputError("irradiance must be non-negative");
  if (irr < m.irr_min) return 0.0;
  if (irr >= m.irr_max) return m.p_max_kw;
  return m.p_max_kw * (irr - m.irr_min) / (m.irr_max - m.irr_min);
}

double photo_current(double g_a, double t_c, const PvModel& m) {
  return m.i_scs * (g_a / m.g_as) * (1.0 + m.delta_isc * (t_c - m.t_s_c));
}

PvCurve pv_curve(const PvModel& m, double g_a, double t_c, int n_points) {
  if (g_a < 0.0) throw InputError("irradiance must be non-negative");
  if (n_points < 2) throw InputError("pv curve needs at least two points");
  validate_pv(m);

  const double i_sat = saturation_current(m);
  const double iph = photo_current(g_a, t_c, m);

  PvCurve curve;
  curve.points.reserve(n_points);
  if (iph <= 0.0) {
    // Dark curve: no photo-current, zero power across the sweep.
    for (int i = 0; i < n_points; ++i) {
      const double v = m.voc_ref * i / (n_points - 1);
      curve.points.emplace_back(v, 0.0);
    }
    return curve;
  }

  const double voc = open_circuit_voltage(m, iph, i_sat);
  for (int i = 0; i < n_points; ++i) {
    const double v = voc * i / (n_points - 1);
    const double cur = cell_current(m, iph, i_sat, v);
    const double p = v * cur;
    curve.points.emplace_back(v, p);
    if (p > curve.p_mpp) {
      curve.p_mpp = p;
      curve.v_mpp = v;
    }
  }
  return curve;
}

double pv_power_from_curve(const PvModel& m, double g_a, double t_c) {
  const PvCurve ref = pv_curve(m, m.g_as, m.t_s_c);
  if (ref.p_mpp <= 0.0) return 0.0;
  const PvCurve cur = pv_curve(m, g_a, t_c);
  return std::clamp(m.p_max_kw * cur.p_mpp / ref.p_mpp, 0.0, m.p_max_kw);
}

std::vector<double> res_series(const ResForecast& f,
                               std::span<const WtModel> wind_units,
                               const PvModel& pv, bool worst_case,
                               WindPowerMode mode) {
  validate_forecast(f);
  validate_pv(pv);
  for (const auto& wt : wind_units) validate_wt(wt);

  const std::size_t n = f.irradiance.size();
  std::vector<double> out(n, 0.0);
  std::vector<double> held_wind(wind_units.size(), 0.0);
  double held_solar = 0.0;

  for (std::size_t k = 0; k < n; ++k) {
    double irr = f.irradiance[k];
    double v = f.wind_speed[k];
    if (worst_case) {
      if (!f.irr_uncertainty.empty()) irr = std::max(irr - f.irr_uncertainty[k], 0.0);
      if (!f.wind_uncertainty.empty()) v = std::max(v - f.wind_uncertainty[k], 0.0);
    }
    double total = 0.0;
    for (std::size_t u = 0; u < wind_units.size(); ++u) {
      const double p = wind_power(v, wind_units[u], mode, held_wind[u]);
      held_wind[u] = p;
      total += p;
    }
    double ps;
    if (mode == WindPowerMode::HoldPrevious) {
      // Same hold-previous reading for the solar mid branch.
      if (irr < pv.irr_min)
        ps = 0.0;
      else if (irr >= pv.irr_max)
        ps = pv.p_max_kw;
      else
        ps = std::clamp(held_solar, 0.0, pv.p_max_kw);
    } else {
      ps = solar_power(irr, pv);
    }
    held_solar = ps;
    out[k] = total + ps;
  }
  return out;
}

}  // namespace microgrid
