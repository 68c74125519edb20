#include "microgrid/report_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "microgrid/errors.hpp"

namespace microgrid {

namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InputError("report: cannot write " + p.string());
  return out;
}

// Cumulative column that stays consistent with the printed per-step values:
// each step cost is quantized to its printed form before accumulating.
std::vector<std::string> printed_cumulative(const RunReport& r) {
  std::vector<std::string> out;
  double acc = 0.0;
  for (const auto& s : r.steps) {
    acc += std::strtod(fmt6(s.j_total).c_str(), nullptr);
    out.push_back(fmt6(acc));
  }
  return out;
}

void write_xy(const fs::path& p, const char* header,
              const std::vector<std::pair<int, std::string>>& rows) {
  auto out = open_out(p);
  out << header << "\n";
  for (const auto& [x, y] : rows) out << x << "," << y << "\n";
}

}  // namespace

std::vector<std::string> emit_report(const RunReport& r, const std::string& out_dir) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  std::vector<std::string> written;

  int n_der_classes = 0;
  for (const auto& s : r.steps)
    n_der_classes = std::max(n_der_classes, static_cast<int>(s.class_mean_soc.size()));

  // steps.csv
  {
    auto out = open_out(dir / "steps.csv");
    out << "k,clearing_price,over_capacity,demand_kw,served_kw,unserved_kw,"
           "res_available_kw,res_deterministic_kw,res_worst_case_kw,res_used_kw,"
           "mean_price,soc_sum,j1,j2,j3,penalty,j_total,cumulative_cost";
    for (const auto& name : r.class_names)
      out << ",power_kw_" << name << ",committed_" << name << ",started_" << name;
    for (int c = 0; c < n_der_classes; ++c) out << ",mean_soc_class" << c;
    out << "\n";
    const auto cum = printed_cumulative(r);
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
      const StepResult& s = r.steps[i];
      out << s.k << "," << fmt6(s.clearing_price) << "," << (s.over_capacity ? 1 : 0)
          << "," << fmt6(s.demand_kw) << "," << fmt6(s.served_kw) << ","
          << fmt6(s.unserved_kw) << "," << fmt6(s.res_available_kw) << ","
          << fmt6(s.res_deterministic_kw) << "," << fmt6(s.res_worst_case_kw) << ","
          << fmt6(s.res_used_kw) << "," << fmt6(s.mean_price) << ","
          << fmt6(s.soc_sum) << "," << fmt6(s.j1) << "," << fmt6(s.j2) << ","
          << fmt6(s.j3) << "," << fmt6(s.penalty) << "," << fmt6(s.j_total) << ","
          << cum[i];
      for (const auto& cd : s.dispatch.classes)
        out << "," << fmt6(cd.power_kw) << "," << cd.committed << "," << cd.started;
      for (int c = 0; c < n_der_classes; ++c) {
        const double v = c < static_cast<int>(s.class_mean_soc.size())
                             ? s.class_mean_soc[c]
                             : 0.0;
        out << "," << fmt6(v);
      }
      out << "\n";
    }
    written.push_back((dir / "steps.csv").string());
  }

  // summary.json
  {
    ordered_json j;
    j["scenario"] = r.scenario;
    j["n_k"] = r.steps.size();
    j["total_cost"] = r.total_cost;
    j["dg_energy_kwh"] = r.dg_energy_kwh;
    j["bess_energy_kwh"] = r.bess_energy_kwh;
    j["res_deterministic_total_kwh"] = r.res_deterministic_total_kwh;
    j["res_worst_total_kwh"] = r.res_worst_total_kwh;
    j["res_available_total_kwh"] = r.res_available_total_kwh;
    j["res_used_total_kwh"] = r.res_used_total_kwh;
    j["total_unserved_kwh"] = r.total_unserved_kwh;
    ordered_json soc = ordered_json::array();
    for (const auto& cs : r.soc_by_class)
      soc.push_back({{"class_id", cs.class_id}, {"mean_soc", cs.mean_soc}});
    j["soc_by_class"] = soc;
    auto out = open_out(dir / "summary.json");
    out << j.dump(2) << "\n";
    written.push_back((dir / "summary.json").string());
  }

  // Plot data: x,y pairs per series.
  {
    std::vector<std::pair<int, std::string>> rows;
    auto emit_series = [&](const std::string& file, const char* header,
                           auto&& value_of) {
      rows.clear();
      for (const auto& s : r.steps) rows.emplace_back(s.k, value_of(s));
      write_xy(dir / file, header, rows);
      written.push_back((dir / file).string());
    };
    emit_series("plot_clearing_price.csv", "k,clearing_price",
                [](const StepResult& s) { return fmt6(s.clearing_price); });
    emit_series("plot_mean_price.csv", "k,mean_price",
                [](const StepResult& s) { return fmt6(s.mean_price); });
    for (int c = 0; c < n_der_classes; ++c) {
      emit_series("plot_soc_class" + std::to_string(c) + ".csv", "k,mean_soc",
                  [c](const StepResult& s) {
                    return fmt6(c < static_cast<int>(s.class_mean_soc.size())
                                    ? s.class_mean_soc[c]
                                    : 0.0);
                  });
    }
    for (std::size_t u = 0; u < r.class_names.size(); ++u) {
      emit_series("plot_dispatch_" + r.class_names[u] + ".csv", "k,power_kw",
                  [u](const StepResult& s) {
                    return fmt6(s.dispatch.classes[u].power_kw);
                  });
    }
    rows.clear();
    const auto cum = printed_cumulative(r);
    for (std::size_t i = 0; i < r.steps.size(); ++i)
      rows.emplace_back(r.steps[i].k, cum[i]);
    write_xy(dir / "plot_cumulative_cost.csv", "k,cumulative_cost", rows);
    written.push_back((dir / "plot_cumulative_cost.csv").string());
  }

  return written;
}

std::vector<std::string> emit_comparison(const std::vector<RunReport>& reports,
                                         const std::string& out_dir) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  std::vector<std::string> written;

  int n_der_classes = 0;
  for (const auto& r : reports)
    n_der_classes = std::max(n_der_classes, static_cast<int>(r.soc_by_class.size()));

  {
    auto out = open_out(dir / "comparison.csv");
    out << "scenario,total_cost,dg_energy_kwh,bess_energy_kwh,"
           "res_available_total_kwh,res_used_total_kwh,total_unserved_kwh";
    for (int c = 0; c < n_der_classes; ++c) out << ",mean_soc_class" << c;
    out << "\n";
    for (const auto& r : reports) {
      out << r.scenario << "," << fmt6(r.total_cost) << "," << fmt6(r.dg_energy_kwh)
          << "," << fmt6(r.bess_energy_kwh) << "," << fmt6(r.res_available_total_kwh)
          << "," << fmt6(r.res_used_total_kwh) << "," << fmt6(r.total_unserved_kwh);
      for (int c = 0; c < n_der_classes; ++c) {
        const double v =
            c < static_cast<int>(r.soc_by_class.size()) ? r.soc_by_class[c].mean_soc : 0.0;
        out << "," << fmt6(v);
      }
      out << "\n";
    }
    written.push_back((dir / "comparison.csv").string());
  }
  {
    ordered_json arr = ordered_json::array();
    for (const auto& r : reports) {
      ordered_json j;
      j["scenario"] = r.scenario;
      j["total_cost"] = r.total_cost;
      j["dg_energy_kwh"] = r.dg_energy_kwh;
      j["bess_energy_kwh"] = r.bess_energy_kwh;
      j["res_available_total_kwh"] = r.res_available_total_kwh;
      j["res_used_total_kwh"] = r.res_used_total_kwh;
      j["total_unserved_kwh"] = r.total_unserved_kwh;
      ordered_json soc = ordered_json::array();
      for (const auto& cs : r.soc_by_class)
        soc.push_back({{"class_id", cs.class_id}, {"mean_soc", cs.mean_soc}});
      j["soc_by_class"] = soc;
      arr.push_back(j);
    }
    auto out = open_out(dir / "comparison.json");
    out << arr.dump(2) << "\n";
    written.push_back((dir / "comparison.json").string());
  }
  return written;
}

}  // namespace microgrid
