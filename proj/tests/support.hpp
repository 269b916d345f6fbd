#pragma once

// Shared test helpers. The oracles here are deliberately naive and
// independent of the library implementations they check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "ldp/instance.hpp"

namespace ldptest {

using ldp::CostInt;
using ldp::CostMode;
using ldp::Instance;
using ldp::LotVec;

// Builds a single-scenario instance from demand rows given in plain units.
inline Instance make_instance(const std::vector<std::vector<double>>& demand, int mult_min,
                              int mult_max, int min_c, int max_c, int min_t, int max_t,
                              std::int64_t supply_min, std::int64_t supply_max, int k) {
  Instance inst;
  const int B = static_cast<int>(demand.size());
  const int S = B > 0 ? static_cast<int>(demand[0].size()) : 1;
  for (int b = 0; b < B; ++b) inst.branch_ids.push_back("b" + std::to_string(b));
  for (int s = 0; s < S; ++s) inst.size_ids.push_back("s" + std::to_string(s));
  inst.mult_min = mult_min;
  inst.mult_max = mult_max;
  inst.min_per_size = min_c;
  inst.max_per_size = max_c;
  inst.min_total = min_t;
  inst.max_total = max_t;
  inst.supply_min = supply_min;
  inst.supply_max = supply_max;
  inst.max_lot_types = k;
  ldp::Scenario sc;
  sc.prob_scaled = inst.prob_scale();
  for (const auto& row : demand)
    for (double d : row) sc.demand_scaled.push_back(std::llround(d * inst.demand_scale()));
  inst.scenarios.push_back(std::move(sc));
  ldp::validate_instance(inst);
  return inst;
}

// Adds a scenario (plain-unit demands). Probabilities of all scenarios are
// rescaled to the given weights, which must sum to the probability scale.
inline void set_probabilities(Instance& inst, const std::vector<std::int64_t>& weights) {
  for (std::size_t i = 0; i < weights.size(); ++i) inst.scenarios[i].prob_scaled = weights[i];
  ldp::validate_instance(inst);
}

inline void add_scenario(Instance& inst, const std::vector<std::vector<double>>& demand) {
  ldp::Scenario sc;
  sc.prob_scaled = 0;
  for (const auto& row : demand)
    for (double d : row) sc.demand_scaled.push_back(std::llround(d * inst.demand_scale()));
  inst.scenarios.push_back(std::move(sc));
}

// Explicit enumeration of the applicable lot-type space, lexicographic order.
inline std::vector<LotVec> enumerate_lot_types(int S, int min_c, int max_c, int min_t, int max_t) {
  std::vector<LotVec> out;
  LotVec cur(S, min_c);
  std::function<void(int, int)> rec = [&](int pos, int sum) {
    if (pos == S) {
      if (sum >= min_t && sum <= max_t) out.push_back(cur);
      return;
    }
    for (int v = min_c; v <= max_c; ++v) {
      cur[pos] = v;
      rec(pos + 1, sum + v);
    }
  };
  rec(0, 0);
  return out;
}

inline std::vector<LotVec> enumerate_lot_types(const Instance& inst) {
  return enumerate_lot_types(inst.num_sizes(), inst.min_per_size, inst.max_per_size,
                             inst.min_total, inst.max_total);
}

// Straight-line recomputation of an assignment cost from raw demands.
inline CostInt naive_assignment_cost(const Instance& inst, CostMode mode, int b,
                                     const LotVec& lot, int m) {
  CostInt total = 0;
  for (int w = 0; w < inst.num_scenarios(); ++w) {
    std::int64_t weight = inst.scenarios[w].prob_scaled;
    if (mode == CostMode::Nominal) weight = (w == inst.nominal_scenario) ? inst.prob_scale() : 0;
    if (weight == 0) continue;
    CostInt dev = 0;
    for (int s = 0; s < inst.num_sizes(); ++s) {
      const std::int64_t supply =
          static_cast<std::int64_t>(m) * lot[s] * inst.demand_scale();
      dev += std::llabs(inst.demand(w, b, s) - supply);
    }
    total += weight * dev;
  }
  return total;
}

// Deterministic 64-bit mixer for reproducible pseudo-random test data.
struct TestRng {
  std::uint64_t state;
  explicit TestRng(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // uniform integer in [lo, hi]
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

}  // namespace ldptest
