#pragma once

// Random instance generation, deterministic across platforms.
//
// RNG: SplitMix64. Every demand value has its own stream selected by mixing
// the seed with the tuple (instance index, attempt, scenario, branch, size),
// one mixing step per component:
//   x = seed; for v in tuple: x = mix64(x + GOLDEN * (v + 1))
// where mix64 is the SplitMix64 finalizer and GOLDEN = 0x9e3779b97f4a7c15.
// Values are drawn by rejection from the top of the 64-bit range, so they
// are exactly uniform and identical on every platform.
//
// Demands are uniform on the scaled-integer grid of [0, max_per_size *
// mult_max]. The supply window is the nominal total demand -10%/+10%
// (rounded outward), widened symmetrically to the minimal width that
// satisfies cardinality consistency when needed; instances failing the full
// consistency check are redrawn under the next attempt number.

#include <cstdint>
#include <string>

#include <json.hpp>

#include "ldp/heuristics.hpp"
#include "ldp/instance.hpp"

namespace ldp {

struct GenSpec {
  int branches = 10;
  int sizes = 4;
  int mults = 5;  // multiplicity interval {1, ..., mults}
  int min_per_size = 0;
  int max_per_size = 2;
  int min_total = 4;
  int max_total = 8;
  int max_lot_types = 3;
  int scenarios = 1;
  std::uint64_t seed = 1;
  int index = 0;      // instance number within a suite
  std::string name;   // optional id stored in metadata
  int max_attempts = 1000;
};

namespace gen_detail {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Stream {
  std::uint64_t state;
  Stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c,
         std::uint64_t d, std::uint64_t e) {
    state = seed;
    for (std::uint64_t v : {a, b, c, d, e}) state = mix64(state + kGolden * (v + 1));
  }
  std::uint64_t next() {
    state += kGolden;
    return mix64(state);
  }
  // exactly uniform on [0, n]; unbiased by rejection
  std::uint64_t below_eq(std::uint64_t n) {
    const std::uint64_t span = n + 1;
    if (span == 0) return next();
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % span;
  }
};

}  // namespace gen_detail

inline Instance gen_random(const GenSpec& spec) {
  if (spec.branches < 1 || spec.sizes < 1 || spec.mults < 1 || spec.scenarios < 1 ||
      spec.min_per_size < 0 || spec.max_per_size < spec.min_per_size ||
      spec.min_total < 0 || spec.max_total < spec.min_total || spec.max_lot_types < 1)
    throw Error(Error::Kind::InvalidInstance, "invalid generator parameters");
  if (static_cast<long long>(spec.sizes) * spec.min_per_size > spec.max_total ||
      static_cast<long long>(spec.sizes) * spec.max_per_size < spec.min_total)
    throw Error(Error::Kind::InvalidInstance,
                "per-size bounds admit no lot-type in the cardinality window");

  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    Instance inst;
    for (int b = 0; b < spec.branches; ++b) inst.branch_ids.push_back("b" + std::to_string(b));
    for (int s = 0; s < spec.sizes; ++s) inst.size_ids.push_back("s" + std::to_string(s));
    inst.mult_min = 1;
    inst.mult_max = spec.mults;
    inst.min_per_size = spec.min_per_size;
    inst.max_per_size = spec.max_per_size;
    inst.min_total = spec.min_total;
    inst.max_total = spec.max_total;
    inst.max_lot_types = spec.max_lot_types;
    inst.nominal_scenario = 0;

    const std::uint64_t top =
        static_cast<std::uint64_t>(spec.max_per_size) * spec.mults * inst.demand_scale();
    for (int w = 0; w < spec.scenarios; ++w) {
      Scenario sc;
      sc.demand_scaled.reserve(static_cast<std::size_t>(spec.branches) * spec.sizes);
      for (int b = 0; b < spec.branches; ++b)
        for (int s = 0; s < spec.sizes; ++s) {
          gen_detail::Stream st(spec.seed, static_cast<std::uint64_t>(spec.index),
                                static_cast<std::uint64_t>(attempt),
                                static_cast<std::uint64_t>(w), static_cast<std::uint64_t>(b),
                                static_cast<std::uint64_t>(s));
          sc.demand_scaled.push_back(static_cast<std::int64_t>(st.below_eq(top)));
        }
      inst.scenarios.push_back(std::move(sc));
    }
    // equal scenario weights, summing exactly to the probability scale
    const std::int64_t base = inst.prob_scale() / spec.scenarios;
    const std::int64_t rem = inst.prob_scale() % spec.scenarios;
    for (int w = 0; w < spec.scenarios; ++w)
      inst.scenarios[w].prob_scaled = base + (w < rem ? 1 : 0);

    std::int64_t total = 0;  // scaled nominal demand
    for (std::int64_t v : inst.scenarios[0].demand_scaled) total += v;
    const std::int64_t scale = inst.demand_scale();
    std::int64_t lower = (9 * total) / (10 * scale);
    std::int64_t upper = (11 * total + 10 * scale - 1) / (10 * scale);

    bool widened = false;
    const std::int64_t min_width = spec.max_total - spec.min_total;
    if (upper - lower < min_width) {
      const std::int64_t deficit = min_width - (upper - lower);
      std::int64_t down = deficit / 2;
      if (lower < down) down = lower;  // keep the lower bound non-negative
      lower -= down;
      upper += deficit - down;
      widened = true;
    }
    inst.supply_min = lower;
    inst.supply_max = upper;

    nlohmann::json meta;
    meta["generator"] = "uniform-v1";
    meta["seed"] = spec.seed;
    meta["index"] = spec.index;
    meta["attempt"] = attempt;
    meta["window_widened"] = widened;
    meta["params"] = {{"branches", spec.branches}, {"sizes", spec.sizes},
                      {"mults", spec.mults},       {"min_per_size", spec.min_per_size},
                      {"max_per_size", spec.max_per_size}, {"min_total", spec.min_total},
                      {"max_total", spec.max_total},       {"k", spec.max_lot_types},
                      {"scenarios", spec.scenarios}};
    meta["id"] = spec.name.empty()
                     ? "rnd-b" + std::to_string(spec.branches) + "-s" +
                           std::to_string(spec.sizes) + "-k" +
                           std::to_string(spec.max_lot_types) + "-seed" +
                           std::to_string(spec.seed) + "-i" + std::to_string(spec.index)
                     : spec.name;
    inst.metadata_json = meta.dump();

    validate_instance(inst);
    if (check_consistency(inst).consistent) return inst;
  }
  throw Error(Error::Kind::InvalidInstance,
              "no consistent instance after " + std::to_string(spec.max_attempts) +
                  " attempts; the parameters leave the supply window unreachable");
}

}  // namespace ldp
