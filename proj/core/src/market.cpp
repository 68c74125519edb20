#include "microgrid/market.hpp"

#include <algorithm>
#include <map>

#include "microgrid/errors.hpp"

namespace microgrid {

DemandCurve::DemandCurve(std::vector<Breakpoint> breakpoints)
    : pts_(std::move(breakpoints)) {
  for (std::size_t i = 0; i < pts_.size(); ++i) {
    if (pts_[i].demand_kw < 0.0)
      throw ConfigError("demand curve: negative demand");
    if (i > 0) {
      if (pts_[i].price <= pts_[i - 1].price)
        throw ConfigError("demand curve: prices must be strictly increasing");
      if (pts_[i].demand_kw > pts_[i - 1].demand_kw)
        throw ConfigError("demand curve: demand must be non-increasing in price");
    }
  }
}

double DemandCurve::demand_at(double price) const {
  // First breakpoint with price >= the query carries the demand; above the
  // last willingness-to-pay nothing charges.
  auto it = std::lower_bound(
      pts_.begin(), pts_.end(), price,
      [](const Breakpoint& bp, double p) { return bp.price < p; });
  if (it == pts_.end()) return 0.0;
  return it->demand_kw;
}

double DemandCurve::total_demand_kw() const {
  return pts_.empty() ? 0.0 : pts_.front().demand_kw;
}

DemandCurve build_demand_curve(const Population& pop) {
  std::map<double, double> load_at_price;
  for (const Der& d : pop) {
    if (!d.state.charge_enabled) continue;
    load_at_price[compute_price(d.state, d.params)] += d.params.p_rated_kw;
  }
  std::vector<DemandCurve::Breakpoint> pts;
  pts.reserve(load_at_price.size());
  double suffix = 0.0;
  for (auto it = load_at_price.rbegin(); it != load_at_price.rend(); ++it) {
    suffix += it->second;
    pts.push_back({it->first, suffix});
  }
  std::reverse(pts.begin(), pts.end());
  return DemandCurve(std::move(pts));
}

ClearingOutcome clear_price(const DemandCurve& curve, double p_base,
                            double feeder_capacity_kw,
                            std::span<const double> bids) {
  if (!std::is_sorted(bids.begin(), bids.end()))
    throw ConfigError("market: price bids must be sorted ascending");
  if (curve.demand_at(p_base) <= feeder_capacity_kw)
    return {p_base, false};
  if (bids.empty())
    throw ConfigError("market: clearing needs price bids but none are configured");
  for (double bid : bids) {
    if (curve.demand_at(bid) <= feeder_capacity_kw) return {bid, false};
  }
  return {bids.back(), true};
}

std::vector<std::vector<double>> enumerate_price_plans(
    std::span<const double> bids, int horizon) {
  if (horizon < 1) throw InputError("price plans need a horizon of at least 1");
  std::vector<std::vector<double>> plans;
  plans.reserve(bids.size());
  for (double bid : bids)
    plans.emplace_back(static_cast<std::size_t>(horizon), bid);
  return plans;
}

}  // namespace microgrid
