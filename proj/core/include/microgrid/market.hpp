#pragma once

#include <span>
#include <vector>

#include "microgrid/der.hpp"

namespace microgrid {

/// Price-vs-demand step function built from DER willingness-to-pay.
/// demand_at(p) = total rated load of lockout-enabled DERs whose price >= p.
class DemandCurve {
 public:
  struct Breakpoint {
    double price;      // a distinct willingness-to-pay value
    double demand_kw;  // demand at exactly this price

    bool operator==(const Breakpoint&) const = default;
  };

  DemandCurve() = default;
  /// Breakpoints must have strictly increasing prices and non-increasing,
  /// non-negative demands; throws ConfigError otherwise.
  explicit DemandCurve(std::vector<Breakpoint> breakpoints);

  double demand_at(double price) const;
  double total_demand_kw() const;
  const std::vector<Breakpoint>& breakpoints() const { return pts_; }

  bool operator==(const DemandCurve&) const = default;

 private:
  std::vector<Breakpoint> pts_;  // ascending by price
};

DemandCurve build_demand_curve(const Population& pop);

struct MarketConfig {
  std::vector<double> p_base;            // base price forecast per interval
  double feeder_capacity_kw = 6000.0;
  std::vector<double> price_bids = {15.0, 25.0, 35.0};  // ascending

  bool operator==(const MarketConfig&) const = default;
};

struct ClearingOutcome {
  double price = 0.0;
  bool over_capacity = false;  // no bid kept demand within feeder capacity

  bool operator==(const ClearingOutcome&) const = default;
};

/// Market clearing: p_base when its demand fits the feeder, otherwise the
/// smallest bid whose demand fits; the largest bid with the over-capacity
/// flag when none does. Throws ConfigError if bids are needed but empty or
/// not sorted ascending.
ClearingOutcome clear_price(const DemandCurve& curve, double p_base,
                            double feeder_capacity_kw,
                            std::span<const double> bids);

/// One constant-price candidate plan per bid, each held over the horizon.
std::vector<std::vector<double>> enumerate_price_plans(
    std::span<const double> bids, int horizon);

}  // namespace microgrid
