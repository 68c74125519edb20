#include "microgrid/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "microgrid/errors.hpp"

namespace microgrid {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config " + path + ": " + what);
}

void expect_keys(const json& j, const std::string& path,
                 std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok) fail(path + "." + item.key(), "unknown key");
  }
}

double get_num(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

std::uint64_t get_u64(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !j.is_number_integer()) fail(path, "expected an integer");
  return j.get<std::uint64_t>();
}

bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

std::string get_str(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> get_number_array(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(get_num(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// A series entry is an inline array or {"file": "path"}.
std::vector<double> get_series(const json& j, const std::string& path) {
  if (j.is_array()) return get_number_array(j, path);
  if (j.is_object()) {
    expect_keys(j, path, {"file"});
    if (!j.contains("file")) fail(path, "series object needs a \"file\" key");
    return load_series(get_str(j["file"], path + ".file"));
  }
  fail(path, "expected an array or {\"file\": path}");
}

void parse_der_params(const json& j, const std::string& path, DerParams& p) {
  expect_keys(j, path,
              {"a", "gamma", "beta", "p_max", "soc_set", "soc_max", "p_rated_kw"});
  if (j.contains("a")) p.a = get_num(j["a"], path + ".a");
  if (j.contains("gamma")) p.gamma = get_num(j["gamma"], path + ".gamma");
  if (j.contains("beta")) p.beta = get_num(j["beta"], path + ".beta");
  if (j.contains("p_max")) p.p_max = get_num(j["p_max"], path + ".p_max");
  if (j.contains("soc_set")) p.soc_set = get_num(j["soc_set"], path + ".soc_set");
  if (j.contains("soc_max")) p.soc_max = get_num(j["soc_max"], path + ".soc_max");
  if (j.contains("p_rated_kw")) p.p_rated_kw = get_num(j["p_rated_kw"], path + ".p_rated_kw");
}

void parse_bounds(const json& j, const std::string& path, DerParamBounds& b) {
  expect_keys(j, path, {"a_min", "a_max", "beta_min", "beta_max", "gamma_min", "gamma_max"});
  if (j.contains("a_min")) b.a_min = get_num(j["a_min"], path + ".a_min");
  if (j.contains("a_max")) b.a_max = get_num(j["a_max"], path + ".a_max");
  if (j.contains("beta_min")) b.beta_min = get_num(j["beta_min"], path + ".beta_min");
  if (j.contains("beta_max")) b.beta_max = get_num(j["beta_max"], path + ".beta_max");
  if (j.contains("gamma_min")) b.gamma_min = get_num(j["gamma_min"], path + ".gamma_min");
  if (j.contains("gamma_max")) b.gamma_max = get_num(j["gamma_max"], path + ".gamma_max");
}

void parse_population(const json& j, const std::string& path, PopulationSpec& spec) {
  expect_keys(j, path, {"count", "classes", "bounds"});
  if (j.contains("count")) spec.count = get_int(j["count"], path + ".count");
  if (j.contains("bounds")) parse_bounds(j["bounds"], path + ".bounds", spec.bounds);
  if (j.contains("classes")) {
    if (!j["classes"].is_array()) fail(path + ".classes", "expected an array");
    spec.classes.clear();
    int idx = 0;
    for (const auto& cj : j["classes"]) {
      const std::string cpath = path + ".classes[" + std::to_string(idx++) + "]";
      expect_keys(cj, cpath, {"fraction", "params"});
      ClassSpec cs;
      if (cj.contains("fraction")) cs.fraction = get_num(cj["fraction"], cpath + ".fraction");
      if (cj.contains("params")) parse_der_params(cj["params"], cpath + ".params", cs.params);
      spec.classes.push_back(cs);
    }
  }
}

void parse_unit_class(const json& j, const std::string& path, UnitClass& uc) {
  expect_keys(j, path,
              {"kind", "name", "count", "bid_ladder_kw", "c_energy", "c_start",
               "c_noload", "horizon_energy_budget_kwh"});
  if (j.contains("kind")) {
    const std::string k = get_str(j["kind"], path + ".kind");
    if (k == "dg")
      uc.kind = UnitClass::Kind::DG;
    else if (k == "bess")
      uc.kind = UnitClass::Kind::BESS;
    else
      fail(path + ".kind", "expected \"dg\" or \"bess\"");
  }
  if (j.contains("name")) uc.name = get_str(j["name"], path + ".name");
  if (j.contains("count")) uc.count = get_int(j["count"], path + ".count");
  if (j.contains("bid_ladder_kw"))
    uc.bid_ladder_kw = get_number_array(j["bid_ladder_kw"], path + ".bid_ladder_kw");
  if (j.contains("c_energy")) uc.c_energy = get_num(j["c_energy"], path + ".c_energy");
  if (j.contains("c_start")) uc.c_start = get_num(j["c_start"], path + ".c_start");
  if (j.contains("c_noload")) uc.c_noload = get_num(j["c_noload"], path + ".c_noload");
  if (j.contains("horizon_energy_budget_kwh"))
    uc.horizon_energy_budget_kwh =
        get_num(j["horizon_energy_budget_kwh"], path + ".horizon_energy_budget_kwh");
}

void parse_market(const json& j, const std::string& path, MarketConfig& m, int n_k) {
  expect_keys(j, path, {"p_base", "feeder_capacity_kw", "price_bids"});
  if (j.contains("p_base")) {
    if (j["p_base"].is_number())
      m.p_base.assign(static_cast<std::size_t>(n_k), get_num(j["p_base"], path + ".p_base"));
    else
      m.p_base = get_series(j["p_base"], path + ".p_base");
  }
  if (j.contains("feeder_capacity_kw"))
    m.feeder_capacity_kw = get_num(j["feeder_capacity_kw"], path + ".feeder_capacity_kw");
  if (j.contains("price_bids"))
    m.price_bids = get_number_array(j["price_bids"], path + ".price_bids");
}

void parse_wt(const json& j, const std::string& path, WtModel& m) {
  expect_keys(j, path, {"v_min", "v_max", "p_max_kw", "rho", "area_m2", "cp"});
  if (j.contains("v_min")) m.v_min = get_num(j["v_min"], path + ".v_min");
  if (j.contains("v_max")) m.v_max = get_num(j["v_max"], path + ".v_max");
  if (j.contains("p_max_kw")) m.p_max_kw = get_num(j["p_max_kw"], path + ".p_max_kw");
  if (j.contains("rho")) m.rho = get_num(j["rho"], path + ".rho");
  if (j.contains("area_m2")) m.area_m2 = get_num(j["area_m2"], path + ".area_m2");
  if (j.contains("cp")) m.cp = get_num(j["cp"], path + ".cp");
}

void parse_pv(const json& j, const std::string& path, PvModel& m) {
  expect_keys(j, path,
              {"irr_min", "irr_max", "p_max_kw", "i_scs", "g_as", "delta_isc",
               "t_s_c", "r_s", "r_sh", "ideality", "i_sat", "voc_ref"});
  if (j.contains("irr_min")) m.irr_min = get_num(j["irr_min"], path + ".irr_min");
  if (j.contains("irr_max")) m.irr_max = get_num(j["irr_max"], path + ".irr_max");
  if (j.contains("p_max_kw")) m.p_max_kw = get_num(j["p_max_kw"], path + ".p_max_kw");
  if (j.contains("i_scs")) m.i_scs = get_num(j["i_scs"], path + ".i_scs");
  if (j.contains("g_as")) m.g_as = get_num(j["g_as"], path + ".g_as");
  if (j.contains("delta_isc")) m.delta_isc = get_num(j["delta_isc"], path + ".delta_isc");
  if (j.contains("t_s_c")) m.t_s_c = get_num(j["t_s_c"], path + ".t_s_c");
  if (j.contains("r_s")) m.r_s = get_num(j["r_s"], path + ".r_s");
  if (j.contains("r_sh")) m.r_sh = get_num(j["r_sh"], path + ".r_sh");
  if (j.contains("ideality")) m.ideality = get_num(j["ideality"], path + ".ideality");
  if (j.contains("i_sat")) m.i_sat = get_num(j["i_sat"], path + ".i_sat");
  if (j.contains("voc_ref")) m.voc_ref = get_num(j["voc_ref"], path + ".voc_ref");
}

void parse_res(const json& j, const std::string& path, ResConfig& r) {
  expect_keys(j, path, {"wind_units", "pv", "wind_power_mode"});
  if (j.contains("wind_units")) {
    if (!j["wind_units"].is_array()) fail(path + ".wind_units", "expected an array");
    r.wind_units.clear();
    int idx = 0;
    for (const auto& wj : j["wind_units"]) {
      WtModel m;
      parse_wt(wj, path + ".wind_units[" + std::to_string(idx++) + "]", m);
      r.wind_units.push_back(m);
    }
  }
  if (j.contains("pv")) parse_pv(j["pv"], path + ".pv", r.pv);
  if (j.contains("wind_power_mode")) {
    const std::string m = get_str(j["wind_power_mode"], path + ".wind_power_mode");
    if (m == "physics")
      r.wind_power_mode = WindPowerMode::Physics;
    else if (m == "hold_previous")
      r.wind_power_mode = WindPowerMode::HoldPrevious;
    else
      fail(path + ".wind_power_mode", "expected \"physics\" or \"hold_previous\"");
  }
}

void parse_horizon(const json& j, const std::string& path, HorizonConfig& h) {
  expect_keys(j, path,
              {"n_k", "mode", "fixed_horizon_length", "interval_hours", "j3_weight"});
  if (j.contains("n_k")) h.n_k = get_int(j["n_k"], path + ".n_k");
  if (j.contains("mode")) {
    const std::string m = get_str(j["mode"], path + ".mode");
    if (m == "shrinking")
      h.mode = HorizonConfig::Mode::Shrinking;
    else if (m == "fixed")
      h.mode = HorizonConfig::Mode::Fixed;
    else
      fail(path + ".mode", "expected \"shrinking\" or \"fixed\"");
  }
  if (j.contains("fixed_horizon_length"))
    h.fixed_horizon_length = get_int(j["fixed_horizon_length"], path + ".fixed_horizon_length");
  if (j.contains("interval_hours"))
    h.interval_hours = get_num(j["interval_hours"], path + ".interval_hours");
  if (j.contains("j3_weight")) h.j3_weight = get_num(j["j3_weight"], path + ".j3_weight");
}

void parse_solver(const json& j, const std::string& path, SolverOptions& s) {
  expect_keys(j, path,
              {"feasibility_tol", "integrality_tol", "relative_gap", "node_limit",
               "heuristic_period"});
  if (j.contains("feasibility_tol"))
    s.feasibility_tol = get_num(j["feasibility_tol"], path + ".feasibility_tol");
  if (j.contains("integrality_tol"))
    s.integrality_tol = get_num(j["integrality_tol"], path + ".integrality_tol");
  if (j.contains("relative_gap"))
    s.relative_gap = get_num(j["relative_gap"], path + ".relative_gap");
  if (j.contains("node_limit"))
    s.node_limit = static_cast<std::int64_t>(get_u64(j["node_limit"], path + ".node_limit"));
  if (j.contains("heuristic_period"))
    s.heuristic_period = get_int(j["heuristic_period"], path + ".heuristic_period");
}

}  // namespace

RunConfig default_config() {
  RunConfig cfg;
  cfg.scenario = 1;
  cfg.seed = 1;
  cfg.horizon = HorizonConfig{};

  cfg.population.count = 1000;
  cfg.population.classes.clear();
  for (double a : {0.9, 0.93, 0.96}) {
    ClassSpec cs;
    cs.fraction = 1.0 / 3.0;
    cs.params.a = a;
    cfg.population.classes.push_back(cs);
  }

  UnitClass dg;
  dg.kind = UnitClass::Kind::DG;
  dg.name = "dg";
  dg.count = 10;
  dg.bid_ladder_kw = {50.0, 100.0, 150.0, 200.0};
  dg.c_energy = 1.0;
  dg.c_start = 2.0;
  dg.c_noload = 1.0;
  UnitClass bess;
  bess.kind = UnitClass::Kind::BESS;
  bess.name = "bess";
  bess.count = 50;
  bess.bid_ladder_kw = {10.0, 20.0, 30.0, 40.0};
  bess.c_energy = 0.1;
  bess.c_start = 0.0;
  bess.c_noload = 0.0;
  cfg.unit_classes = {dg, bess};

  cfg.market.p_base.assign(24, 15.0);
  cfg.market.feeder_capacity_kw = 6000.0;
  cfg.market.price_bids = {15.0, 25.0, 35.0};

  cfg.res.wind_units = {WtModel{}, WtModel{}};
  cfg.res.pv = PvModel{};

  cfg.forecast.irradiance = synthetic_irradiance(24);
  cfg.forecast.wind_speed = synthetic_wind(24);
  cfg.forecast.irr_uncertainty = synthetic_irr_uncertainty(24);
  cfg.forecast.wind_uncertainty = synthetic_wind_uncertainty(24);
  return cfg;
}

RunConfig default_config_small_ratings() {
  RunConfig cfg = default_config();
  for (auto& wt : cfg.res.wind_units) wt.p_max_kw = 3.0;
  cfg.res.pv.p_max_kw = 0.1;
  return cfg;
}

std::vector<double> synthetic_irradiance(int n_k) {
  // Clear-sky shape: zero outside the 6h-18h window, peak near noon.
  std::vector<double> out(n_k, 0.0);
  for (int k = 0; k < n_k; ++k) {
    const double t = 24.0 * k / n_k;
    if (t <= 6.0 || t >= 18.0) continue;
    out[k] = 1000.0 * std::sin(kPi * (t - 6.0) / 12.0);
  }
  return out;
}

std::vector<double> synthetic_wind(int n_k) {
  // Higher during night hours, dipping below cut-in around midday, with a
  // calm spell around dawn so the early charging wave needs dispatchable
  // units.
  std::vector<double> out(n_k, 0.0);
  for (int k = 0; k < n_k; ++k) {
    const double t = 24.0 * k / n_k;
    const double swing = 7.25 - 4.0 * std::cos(2.0 * kPi * (t - 12.0) / 24.0);
    const double lull = 1.0 - 0.75 * std::exp(-((t - 6.5) / 1.6) * ((t - 6.5) / 1.6));
    out[k] = swing * lull;
  }
  return out;
}

std::vector<double> synthetic_irr_uncertainty(int n_k) {
  const std::vector<double> irr = synthetic_irradiance(n_k);
  std::vector<double> out(n_k, 0.0);
  for (int k = 0; k < n_k; ++k) out[k] = 0.30 * irr[k];
  return out;
}

std::vector<double> synthetic_wind_uncertainty(int n_k) {
  std::vector<double> out(n_k, 1.5);
  return out;
}

void validate_config(const RunConfig& cfg) {
  if (cfg.scenario < 1 || cfg.scenario > 3)
    throw ConfigError("config scenario: must be 1, 2 or 3");
  validate_horizon(cfg.horizon);

  if (cfg.population.count < 0)
    throw ConfigError("config population.count: must be non-negative");
  if (cfg.population.classes.empty())
    throw ConfigError("config population.classes: must not be empty");
  for (std::size_t i = 0; i < cfg.population.classes.size(); ++i) {
    try {
      validate_params(cfg.population.classes[i].params, cfg.population.bounds);
    } catch (const ConfigError& e) {
      throw ConfigError("config population.classes[" + std::to_string(i) + "]: " + e.what());
    }
  }

  for (std::size_t i = 0; i < cfg.unit_classes.size(); ++i) {
    try {
      validate_unit_class(cfg.unit_classes[i]);
    } catch (const ConfigError& e) {
      throw ConfigError("config unit_classes[" + std::to_string(i) + "]: " + e.what());
    }
    for (std::size_t j = i + 1; j < cfg.unit_classes.size(); ++j)
      if (cfg.unit_classes[i].name == cfg.unit_classes[j].name)
        throw ConfigError("config unit_classes: duplicate name " + cfg.unit_classes[i].name);
  }

  const std::size_t n_k = static_cast<std::size_t>(cfg.horizon.n_k);
  if (cfg.market.p_base.size() != n_k)
    throw ConfigError("config market.p_base: length must equal horizon.n_k");
  if (cfg.market.feeder_capacity_kw <= 0.0)
    throw ConfigError("config market.feeder_capacity_kw: must be positive");
  if (!std::is_sorted(cfg.market.price_bids.begin(), cfg.market.price_bids.end()))
    throw ConfigError("config market.price_bids: must be sorted ascending");
  if (cfg.scenario != 1 && cfg.market.price_bids.empty())
    throw ConfigError("config market.price_bids: scenarios 2 and 3 need price bids");

  for (std::size_t i = 0; i < cfg.res.wind_units.size(); ++i) {
    try {
      validate_wt(cfg.res.wind_units[i]);
    } catch (const ConfigError& e) {
      throw ConfigError("config res.wind_units[" + std::to_string(i) + "]: " + e.what());
    }
  }
  try {
    validate_pv(cfg.res.pv);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config res.pv: ") + e.what());
  }

  try {
    validate_forecast(cfg.forecast);
  } catch (const InputError& e) {
    throw ConfigError(std::string("config forecast: ") + e.what());
  }
  if (cfg.forecast.irradiance.size() != n_k)
    throw ConfigError("config forecast: series length must equal horizon.n_k");
  if (cfg.scenario == 3 && !cfg.forecast.has_uncertainty())
    throw ConfigError("config forecast: scenario 3 requires irradiance and wind uncertainty series");

  if (cfg.solver.feasibility_tol <= 0.0 || cfg.solver.integrality_tol <= 0.0 ||
      cfg.solver.relative_gap < 0.0)
    throw ConfigError("config solver: tolerances must be positive");
  if (cfg.solver.node_limit < 1)
    throw ConfigError("config solver.node_limit: must be at least 1");
  if (cfg.slack_penalty < 0.0)
    throw ConfigError("config slack_penalty: must be non-negative");
}

RunConfig parse_config(const std::string& json_text) {
  bool blank = true;
  for (char c : json_text)
    if (!std::isspace(static_cast<unsigned char>(c))) {
      blank = false;
      break;
    }
  if (blank) {
    RunConfig cfg = default_config();
    validate_config(cfg);
    return cfg;
  }

  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }

  RunConfig cfg = default_config();
  expect_keys(j, "", {"scenario", "seed", "horizon", "population", "unit_classes",
                      "market", "res", "forecast", "solver", "slack_penalty",
                      "preset"});
  if (j.contains("preset")) {
    const std::string p = get_str(j["preset"], "preset");
    if (p == "default")
      cfg = default_config();
    else if (p == "small_ratings")
      cfg = default_config_small_ratings();
    else
      fail("preset", "expected \"default\" or \"small_ratings\"");
  }
  if (j.contains("scenario")) cfg.scenario = get_int(j["scenario"], "scenario");
  if (j.contains("seed")) cfg.seed = get_u64(j["seed"], "seed");
  if (j.contains("horizon")) parse_horizon(j["horizon"], "horizon", cfg.horizon);

  // Market and forecast defaults depend on n_k; regenerate when it changed.
  if (cfg.horizon.n_k != 24) {
    cfg.market.p_base.assign(static_cast<std::size_t>(cfg.horizon.n_k), 15.0);
    cfg.forecast.irradiance = synthetic_irradiance(cfg.horizon.n_k);
    cfg.forecast.wind_speed = synthetic_wind(cfg.horizon.n_k);
    cfg.forecast.irr_uncertainty = synthetic_irr_uncertainty(cfg.horizon.n_k);
    cfg.forecast.wind_uncertainty = synthetic_wind_uncertainty(cfg.horizon.n_k);
  }

  if (j.contains("population")) parse_population(j["population"], "population", cfg.population);
  if (j.contains("unit_classes")) {
    if (!j["unit_classes"].is_array()) fail("unit_classes", "expected an array");
    cfg.unit_classes.clear();
    int idx = 0;
    for (const auto& uj : j["unit_classes"]) {
      UnitClass uc;
      uc.name = "class" + std::to_string(idx);
      parse_unit_class(uj, "unit_classes[" + std::to_string(idx) + "]", uc);
      cfg.unit_classes.push_back(uc);
      ++idx;
    }
  }
  if (j.contains("market")) parse_market(j["market"], "market", cfg.market, cfg.horizon.n_k);
  if (j.contains("res")) parse_res(j["res"], "res", cfg.res);
  if (j.contains("forecast")) {
    const json& f = j["forecast"];
    expect_keys(f, "forecast",
                {"irradiance", "wind_speed", "irr_uncertainty", "wind_uncertainty"});
    if (f.contains("irradiance"))
      cfg.forecast.irradiance = get_series(f["irradiance"], "forecast.irradiance");
    if (f.contains("wind_speed"))
      cfg.forecast.wind_speed = get_series(f["wind_speed"], "forecast.wind_speed");
    if (f.contains("irr_uncertainty"))
      cfg.forecast.irr_uncertainty =
          get_series(f["irr_uncertainty"], "forecast.irr_uncertainty");
    if (f.contains("wind_uncertainty"))
      cfg.forecast.wind_uncertainty =
          get_series(f["wind_uncertainty"], "forecast.wind_uncertainty");
  }
  if (j.contains("solver")) parse_solver(j["solver"], "solver", cfg.solver);
  if (j.contains("slack_penalty"))
    cfg.slack_penalty = get_num(j["slack_penalty"], "slack_penalty");

  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string save_config(const RunConfig& cfg) {
  ordered_json j;
  j["scenario"] = cfg.scenario;
  j["seed"] = cfg.seed;
  j["horizon"] = {
      {"n_k", cfg.horizon.n_k},
      {"mode", cfg.horizon.mode == HorizonConfig::Mode::Shrinking ? "shrinking" : "fixed"},
      {"fixed_horizon_length", cfg.horizon.fixed_horizon_length},
      {"interval_hours", cfg.horizon.interval_hours},
      {"j3_weight", cfg.horizon.j3_weight},
  };
  ordered_json classes = ordered_json::array();
  for (const auto& cs : cfg.population.classes) {
    classes.push_back({{"fraction", cs.fraction},
                       {"params",
                        {{"a", cs.params.a},
                         {"gamma", cs.params.gamma},
                         {"beta", cs.params.beta},
                         {"p_max", cs.params.p_max},
                         {"soc_set", cs.params.soc_set},
                         {"soc_max", cs.params.soc_max},
                         {"p_rated_kw", cs.params.p_rated_kw}}}});
  }
  j["population"] = {
      {"count", cfg.population.count},
      {"classes", classes},
      {"bounds",
       {{"a_min", cfg.population.bounds.a_min},
        {"a_max", cfg.population.bounds.a_max},
        {"beta_min", cfg.population.bounds.beta_min},
        {"beta_max", cfg.population.bounds.beta_max},
        {"gamma_min", cfg.population.bounds.gamma_min},
        {"gamma_max", cfg.population.bounds.gamma_max}}},
  };
  ordered_json units = ordered_json::array();
  for (const auto& uc : cfg.unit_classes) {
    ordered_json u = {{"kind", uc.kind == UnitClass::Kind::DG ? "dg" : "bess"},
                      {"name", uc.name},
                      {"count", uc.count},
                      {"bid_ladder_kw", uc.bid_ladder_kw},
                      {"c_energy", uc.c_energy},
                      {"c_start", uc.c_start},
                      {"c_noload", uc.c_noload}};
    if (uc.horizon_energy_budget_kwh)
      u["horizon_energy_budget_kwh"] = *uc.horizon_energy_budget_kwh;
    units.push_back(u);
  }
  j["unit_classes"] = units;
  j["market"] = {{"p_base", cfg.market.p_base},
                 {"feeder_capacity_kw", cfg.market.feeder_capacity_kw},
                 {"price_bids", cfg.market.price_bids}};
  ordered_json wts = ordered_json::array();
  for (const auto& wt : cfg.res.wind_units) {
    wts.push_back({{"v_min", wt.v_min},
                   {"v_max", wt.v_max},
                   {"p_max_kw", wt.p_max_kw},
                   {"rho", wt.rho},
                   {"area_m2", wt.area_m2},
                   {"cp", wt.cp}});
  }
  j["res"] = {{"wind_units", wts},
              {"pv",
               {{"irr_min", cfg.res.pv.irr_min},
                {"irr_max", cfg.res.pv.irr_max},
                {"p_max_kw", cfg.res.pv.p_max_kw},
                {"i_scs", cfg.res.pv.i_scs},
                {"g_as", cfg.res.pv.g_as},
                {"delta_isc", cfg.res.pv.delta_isc},
                {"t_s_c", cfg.res.pv.t_s_c},
                {"r_s", cfg.res.pv.r_s},
                {"r_sh", cfg.res.pv.r_sh},
                {"ideality", cfg.res.pv.ideality},
                {"i_sat", cfg.res.pv.i_sat},
                {"voc_ref", cfg.res.pv.voc_ref}}},
              {"wind_power_mode",
               cfg.res.wind_power_mode == WindPowerMode::Physics ? "physics"
                                                                 : "hold_previous"}};
  j["forecast"] = {{"irradiance", cfg.forecast.irradiance},
                   {"wind_speed", cfg.forecast.wind_speed},
                   {"irr_uncertainty", cfg.forecast.irr_uncertainty},
                   {"wind_uncertainty", cfg.forecast.wind_uncertainty}};
  j["solver"] = {{"feasibility_tol", cfg.solver.feasibility_tol},
                 {"integrality_tol", cfg.solver.integrality_tol},
                 {"relative_gap", cfg.solver.relative_gap},
                 {"node_limit", cfg.solver.node_limit},
                 {"heuristic_period", cfg.solver.heuristic_period}};
  j["slack_penalty"] = cfg.slack_penalty;
  return j.dump(2) + "\n";
}

std::vector<double> load_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("series: cannot open " + path);

  std::vector<double> values;
  std::string line;
  long line_no = 0;
  long expected = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    for (char& c : line)
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    std::istringstream ls(line);
    std::string a, b;
    if (!(ls >> a)) continue;  // blank line
    if (a[0] == '#') continue;
    ls >> b;

    auto parse_num = [&](const std::string& tok, const char* what) {
      try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        if (std::isnan(v) || std::isinf(v))
          throw InputError("series " + path + " line " + std::to_string(line_no) +
                           ": non-finite " + std::string(what));
        return v;
      } catch (const std::invalid_argument&) {
        throw InputError("series " + path + " line " + std::to_string(line_no) +
                         ": non-numeric " + std::string(what) + " '" + tok + "'");
      } catch (const std::out_of_range&) {
        throw InputError("series " + path + " line " + std::to_string(line_no) +
                         ": out-of-range " + std::string(what) + " '" + tok + "'");
      }
    };

    // Optional header: a non-numeric first row.
    if (first_content) {
      first_content = false;
      try {
        std::size_t used = 0;
        (void)std::stod(a, &used);
        if (used != a.size()) throw std::invalid_argument(a);
      } catch (const std::exception&) {
        continue;  // header row
      }
    }
    if (b.empty())
      throw InputError("series " + path + " line " + std::to_string(line_no) +
                       ": expected two columns (index, value)");

    const double idx_d = parse_num(a, "index");
    const long idx = static_cast<long>(std::llround(idx_d));
    if (std::abs(idx_d - idx) > 1e-9)
      throw InputError("series " + path + " line " + std::to_string(line_no) +
                       ": index must be an integer");
    if (idx < expected)
      throw InputError("series " + path + ": duplicate index " + std::to_string(idx));
    if (idx > expected)
      throw InputError("series " + path + ": missing index " + std::to_string(expected));
    values.push_back(parse_num(b, "value"));
    ++expected;
  }
  return values;
}

}  // namespace microgrid
