#pragma once

#include <string>
#include <vector>

#include "microgrid/mpc.hpp"

namespace microgrid {

/// Writes steps.csv, summary.json and the plot-data files into out_dir
/// (created if needed). Fixed decimal formatting and row order: identical
/// reports produce byte-identical files. The printed cumulative-cost column
/// is the running sum of the per-interval cost column exactly as printed.
/// Returns the paths written.
std::vector<std::string> emit_report(const RunReport& report,
                                     const std::string& out_dir);

/// Side-by-side totals for several scenario runs: comparison.csv and
/// comparison.json in out_dir.
std::vector<std::string> emit_comparison(const std::vector<RunReport>& reports,
                                         const std::string& out_dir);

}  // namespace microgrid
