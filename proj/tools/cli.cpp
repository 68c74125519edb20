#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "microgrid/config.hpp"
#include "microgrid/errors.hpp"
#include "microgrid/mpc.hpp"
#include "microgrid/report_io.hpp"

namespace microgrid {

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  int scenario = 0;          // 0 = keep config value
  std::int64_t seed = -1;    // <0 = keep config value
  std::string horizon_mode;  // empty = keep config value
  int horizon = 0;           // 0 = keep config value
};

RunConfig resolve_config(const CommonArgs& args) {
  RunConfig cfg =
      args.config_path.empty() ? default_config() : load_config(args.config_path);
  if (args.scenario != 0) cfg.scenario = args.scenario;
  if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
  if (!args.horizon_mode.empty()) {
    if (args.horizon_mode == "shrinking")
      cfg.horizon.mode = HorizonConfig::Mode::Shrinking;
    else if (args.horizon_mode == "fixed")
      cfg.horizon.mode = HorizonConfig::Mode::Fixed;
    else
      throw ConfigError("--horizon-mode must be shrinking or fixed");
  }
  if (args.horizon != 0) cfg.horizon.fixed_horizon_length = args.horizon;
  validate_config(cfg);
  return cfg;
}

void print_summary(const RunReport& r) {
  std::printf("scenario %d: total cost %.4f, DG %.1f kWh, BESS %.1f kWh, "
              "RES available %.1f kWh, unserved %.3f kWh\n",
              r.scenario, r.total_cost, r.dg_energy_kwh, r.bess_energy_kwh,
              r.res_available_total_kwh, r.total_unserved_kwh);
  for (const auto& cs : r.soc_by_class)
    std::printf("  class %d mean SOC %.4f\n", cs.class_id, cs.mean_soc);
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Residential microgrid MPC/MILP scheduling simulator"};
  app.require_subcommand(1);

  CommonArgs run_args;
  CLI::App* run = app.add_subcommand("run", "Run one scenario and emit report files");
  run->add_option("--config", run_args.config_path, "Config file (JSON); defaults to the bundled preset");
  run->add_option("--scenario", run_args.scenario, "Scenario 1, 2 or 3 (overrides config)")
      ->check(CLI::Range(1, 3));
  run->add_option("--out", run_args.out_dir, "Output directory")->capture_default_str();
  run->add_option("--seed", run_args.seed, "Population seed (overrides config)");
  run->add_option("--horizon-mode", run_args.horizon_mode, "shrinking|fixed (overrides config)")
      ->check(CLI::IsMember({"shrinking", "fixed"}));
  run->add_option("--horizon", run_args.horizon, "Fixed horizon length (overrides config)")
      ->check(CLI::PositiveNumber);

  CommonArgs cmp_args;
  CLI::App* cmp = app.add_subcommand("compare", "Run all three scenarios and emit a side-by-side summary");
  cmp->add_option("--config", cmp_args.config_path, "Config file (JSON); defaults to the bundled preset");
  cmp->add_option("--out", cmp_args.out_dir, "Output directory")->capture_default_str();
  cmp->add_option("--seed", cmp_args.seed, "Population seed (overrides config)");

  std::string validate_path;
  CLI::App* val = app.add_subcommand("validate", "Check a config file without running");
  val->add_option("--config", validate_path, "Config file (JSON); defaults to the bundled preset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run->parsed()) {
      const RunConfig cfg = resolve_config(run_args);
      const RunReport report = run_scenario(cfg);
      emit_report(report, run_args.out_dir);
      print_summary(report);
      std::printf("wrote %s\n", run_args.out_dir.c_str());
      return 0;
    }
    if (cmp->parsed()) {
      RunConfig cfg = resolve_config(cmp_args);
      std::vector<RunReport> reports;
      for (int scenario = 1; scenario <= 3; ++scenario) {
        cfg.scenario = scenario;
        validate_config(cfg);
        reports.push_back(run_scenario(cfg));
        const auto dir = std::filesystem::path(cmp_args.out_dir) /
                         ("scenario" + std::to_string(scenario));
        emit_report(reports.back(), dir.string());
        print_summary(reports.back());
      }
      emit_comparison(reports, cmp_args.out_dir);
      std::printf("wrote %s\n", cmp_args.out_dir.c_str());
      return 0;
    }
    if (val->parsed()) {
      const RunConfig cfg =
          validate_path.empty() ? default_config() : load_config(validate_path);
      validate_config(cfg);
      std::printf("config OK: scenario %d, n_k %d, %d DERs, %zu unit classes\n",
                  cfg.scenario, cfg.horizon.n_k, cfg.population.count,
                  cfg.unit_classes.size());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}

}  // namespace microgrid
