#include "microgrid/der.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "microgrid/errors.hpp"
#include "microgrid/rng.hpp"

namespace microgrid {

void validate_params(const DerParams& p, const DerParamBounds& b) {
  auto fail = [](const std::string& what) { throw ConfigError("DER params: " + what); };
  if (!(b.a_min >= 0.0 && b.a_max <= 1.0 && b.a_min <= b.a_max))
    fail("dissipation bounds must satisfy 0 <= a_min <= a_max <= 1");
  if (p.a < b.a_min || p.a > b.a_max) fail("dissipation rate a out of bounds");
  if (p.beta < b.beta_min || p.beta > b.beta_max) fail("price slope beta out of bounds");
  if (p.gamma < b.gamma_min || p.gamma > b.gamma_max) fail("charge increment gamma out of bounds");
  if (!(p.soc_set >= 0.0 && p.soc_set < p.soc_max && p.soc_max <= 1.0))
    fail("require 0 <= soc_set < soc_max <= 1");
  if (!(p.p_rated_kw > 0.0)) fail("p_rated must be positive");
}

DerState step_soc(const DerState& s, const DerParams& p) {
  // Structural envelope only; config-specific bounds are enforced when the
  // population is built.
  if (!(p.a >= 0.0 && p.a <= 1.0)) throw ConfigError("DER params: dissipation rate a must lie in [0, 1]");
  if (!(p.gamma >= 0.0)) throw ConfigError("DER params: charge increment gamma must be non-negative");
  if (!(p.soc_set >= 0.0 && p.soc_set < p.soc_max && p.soc_max <= 1.0))
    throw ConfigError("DER params: require 0 <= soc_set < soc_max <= 1");
  DerState out = s;
  const double charge = (s.charge_enabled && s.on) ? p.gamma : 0.0;
  out.soc = std::min(p.a * s.soc + charge, p.soc_max);
  if (out.soc < 0.0) out.soc = 0.0;
  return out;
}

double compute_price(const DerState& s, const DerParams& p) {
  return p.p_max - p.beta * s.soc;
}

bool decide_on(double price, double p_clear) { return price >= p_clear; }

bool update_lockout(const DerState& s, const DerParams& p) {
  if (s.soc >= p.soc_max) return false;
  if (s.soc < p.soc_set) return true;
  return s.charge_enabled;
}

double aggregate_demand(const Population& pop, double p_clear) {
  double total = 0.0;
  for (const Der& d : pop) {
    if (!d.state.charge_enabled) continue;
    if (decide_on(compute_price(d.state, d.params), p_clear))
      total += d.params.p_rated_kw;
  }
  return total;
}

double PopulationTrace::soc_total() const {
  double t = 0.0;
  for (double s : soc_sum) t += s;
  return t;
}

PopulationTrace simulate_population(const Population& pop,
                                    std::span<const double> price_sequence) {
  PopulationTrace trace;
  const std::size_t n_k = price_sequence.size();
  trace.demand_kw.resize(n_k, 0.0);
  trace.soc_sum.resize(n_k, 0.0);
  trace.mean_price.resize(n_k, 0.0);
  trace.soc.assign(n_k, std::vector<double>(pop.size(), 0.0));
  Population cur = pop;

  for (std::size_t k = 0; k < n_k; ++k) {
    const double p_clear = price_sequence[k];
    double demand = 0.0;
    double price_sum = 0.0;
    double soc_sum = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      Der& d = cur[i];
      const double price = compute_price(d.state, d.params);
      price_sum += price;
      d.state.on = decide_on(price, p_clear);
      if (d.state.charge_enabled && d.state.on) demand += d.params.p_rated_kw;
      DerState next = step_soc(d.state, d.params);
      next.charge_enabled = update_lockout(next, d.params);
      d.state = next;
      trace.soc[k][i] = d.state.soc;
      soc_sum += d.state.soc;
    }
    trace.demand_kw[k] = demand;
    trace.soc_sum[k] = soc_sum;
    trace.mean_price[k] = cur.empty() ? 0.0 : price_sum / static_cast<double>(cur.size());
  }
  trace.final_states = std::move(cur);
  return trace;
}

Population make_population(const PopulationSpec& spec, std::uint64_t seed) {
  if (spec.count < 0) throw ConfigError("population count must be non-negative");
  if (spec.classes.empty()) throw ConfigError("population needs at least one class");
  double frac_sum = 0.0;
  for (const auto& c : spec.classes) {
    if (c.fraction < 0.0) throw ConfigError("class fractions must be non-negative");
    validate_params(c.params, spec.bounds);
    frac_sum += c.fraction;
  }
  if (frac_sum <= 0.0) throw ConfigError("class fractions sum to zero");

  // Largest-remainder apportionment of spec.count over the classes.
  const int n_classes = static_cast<int>(spec.classes.size());
  std::vector<int> sizes(n_classes, 0);
  std::vector<std::pair<double, int>> remainders;
  int assigned = 0;
  for (int c = 0; c < n_classes; ++c) {
    const double ideal = spec.count * spec.classes[c].fraction / frac_sum;
    sizes[c] = static_cast<int>(std::floor(ideal));
    assigned += sizes[c];
    remainders.emplace_back(ideal - sizes[c], c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& l, const auto& r) { return l.first > r.first; });
  for (int i = 0; i < spec.count - assigned; ++i)
    ++sizes[remainders[static_cast<std::size_t>(i) % remainders.size()].second];

  Rng rng(seed);
  Population pop;
  pop.reserve(spec.count);
  for (int c = 0; c < n_classes; ++c) {
    const DerParams& p = spec.classes[c].params;
    for (int i = 0; i < sizes[c]; ++i) {
      Der d;
      d.params = p;
      d.class_id = c;
      d.state.soc = rng.uniform(p.soc_set, p.soc_max);
      d.state.charge_enabled = update_lockout(d.state, p);
      d.state.on = false;
      pop.push_back(d);
    }
  }
  return pop;
}

}  // namespace microgrid
