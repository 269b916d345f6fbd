#pragma once

// Core data model for the (stochastic) lot-type design problem: instances,
// lot-types, assignments, exact scaled-integer cost evaluation and the
// value-of-stochastic-solution metrics.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ldp {

class Error : public std::runtime_error {
 public:
  enum class Kind {
    InvalidInstance,  // malformed data, bad dimensions, overflow risk
    Inconsistent,     // instance fails a consistency clause
    Guard,            // refused: outside a documented size guard
    Backend,          // LP/MILP engine failure
    Io,               // file/format problems
    Internal,         // broken invariant; indicates a bug
  };

  Error(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Pieces per size. A lot-type is applicable when every component lies in
// [min_per_size, max_per_size] and the component sum lies in
// [min_total, max_total].
using LotVec = std::vector<int>;

using CostInt = std::int64_t;  // cost in units of 10^-(demand+prob decimals)

constexpr double kEps = 1e-9;  // global zero tolerance

enum class CostMode { Nominal, Expected };

inline const char* cost_mode_name(CostMode m) {
  return m == CostMode::Nominal ? "nominal" : "sldp";
}

struct Scenario {
  std::int64_t prob_scaled = 0;              // probability * 10^prob_decimals
  std::vector<std::int64_t> demand_scaled;   // row-major [branch*S + size]
};

struct Instance {
  std::vector<std::string> branch_ids;
  std::vector<std::string> size_ids;

  int mult_min = 1;       // smallest admissible lot multiplicity
  int mult_max = 1;       // largest admissible lot multiplicity
  int min_per_size = 0;   // lower bound on each lot-type component
  int max_per_size = 0;   // upper bound on each lot-type component
  int min_total = 0;      // lower bound on lot-type cardinality
  int max_total = 0;      // upper bound on lot-type cardinality

  std::int64_t supply_min = 0;  // total delivered pieces window, lower end
  std::int64_t supply_max = 0;  // total delivered pieces window, upper end

  int max_lot_types = 1;  // at most this many distinct lot-types may be used

  int nominal_scenario = 0;
  int demand_decimals = 4;
  int prob_decimals = 6;

  std::vector<Scenario> scenarios;

  // Free-form provenance block preserved through load/save (e.g. generator
  // settings). Stored as serialized JSON text to keep this header light.
  std::string metadata_json;

  int num_branches() const { return static_cast<int>(branch_ids.size()); }
  int num_sizes() const { return static_cast<int>(size_ids.size()); }
  int num_mults() const { return mult_max - mult_min + 1; }
  int num_scenarios() const { return static_cast<int>(scenarios.size()); }

  std::int64_t demand_scale() const { return pow10(demand_decimals); }
  std::int64_t prob_scale() const { return pow10(prob_decimals); }

  std::int64_t demand(int scenario, int branch, int size) const {
    return scenarios[scenario].demand_scaled[static_cast<std::size_t>(branch) * num_sizes() + size];
  }

  double demand_value(int scenario, int branch, int size) const {
    return static_cast<double>(demand(scenario, branch, size)) / static_cast<double>(demand_scale());
  }

  double probability(int scenario) const {
    return static_cast<double>(scenarios[scenario].prob_scaled) / static_cast<double>(prob_scale());
  }

  // One cost unit expressed in demand units.
  double cost_unit() const {
    return 1.0 / (static_cast<double>(demand_scale()) * static_cast<double>(prob_scale()));
  }

  double cost_value(CostInt c) const { return static_cast<double>(c) * cost_unit(); }

  static std::int64_t pow10(int d) {
    std::int64_t v = 1;
    for (int i = 0; i < d; ++i) v *= 10;
    return v;
  }
};

inline bool is_applicable(const Instance& inst, const LotVec& lot) {
  if (static_cast<int>(lot.size()) != inst.num_sizes()) return false;
  long long total = 0;
  for (int v : lot) {
    if (v < inst.min_per_size || v > inst.max_per_size) return false;
    total += v;
  }
  return total >= inst.min_total && total <= inst.max_total;
}

inline long long lot_size(const LotVec& lot) {
  return std::accumulate(lot.begin(), lot.end(), 0LL);
}

struct Assignment {
  LotVec lot;
  int mult = 1;
};

struct Solution {
  std::vector<Assignment> per_branch;  // index aligned with Instance branches

  bool empty() const { return per_branch.empty(); }
};

inline std::int64_t total_pieces(const Solution& sol) {
  std::int64_t total = 0;
  for (const auto& a : sol.per_branch) total += static_cast<std::int64_t>(a.mult) * lot_size(a.lot);
  return total;
}

inline std::vector<LotVec> used_lot_types(const Solution& sol) {
  std::vector<LotVec> used;
  for (const auto& a : sol.per_branch) {
    if (std::find(used.begin(), used.end(), a.lot) == used.end()) used.push_back(a.lot);
  }
  std::sort(used.begin(), used.end());
  return used;
}

// ---------------------------------------------------------------------------
// Validation

inline void validate_instance(const Instance& inst) {
  auto fail = [](const std::string& why) { throw Error(Error::Kind::InvalidInstance, why); };

  if (inst.size_ids.empty()) fail("instance needs at least one size");
  if (inst.mult_min < 1) fail("mult_min must be >= 1");
  if (inst.mult_max < inst.mult_min) fail("mult_max < mult_min");
  if (inst.min_per_size < 0) fail("min_c must be >= 0");
  if (inst.max_per_size < inst.min_per_size) fail("max_c < min_c");
  if (inst.min_total < 0) fail("min_t must be >= 0");
  if (inst.max_total < inst.min_total) fail("max_t < min_t");
  if (inst.supply_min < 0) fail("I_lower must be >= 0");
  if (inst.supply_max < inst.supply_min) fail("I_upper < I_lower");
  if (inst.max_lot_types < 1) fail("k must be >= 1");
  if (inst.scenarios.empty()) fail("instance needs at least one scenario");
  if (inst.nominal_scenario < 0 || inst.nominal_scenario >= inst.num_scenarios())
    fail("nominal_scenario out of range");
  if (inst.demand_decimals < 0 || inst.demand_decimals > 6) fail("demand_decimals outside [0,6]");
  if (inst.prob_decimals < 0 || inst.prob_decimals > 9) fail("prob_decimals outside [0,9]");

  const std::size_t cells = static_cast<std::size_t>(inst.num_branches()) * inst.num_sizes();
  std::int64_t max_demand = 0;
  std::int64_t prob_sum = 0;
  for (const auto& sc : inst.scenarios) {
    if (sc.demand_scaled.size() != cells) fail("demand matrix has wrong shape");
    if (sc.prob_scaled < 0) fail("negative scenario probability");
    prob_sum += sc.prob_scaled;
    for (std::int64_t d : sc.demand_scaled) {
      if (d < 0) fail("negative demand");
      max_demand = std::max(max_demand, d);
    }
  }
  const double sum_value = static_cast<double>(prob_sum) / static_cast<double>(inst.prob_scale());
  if (std::abs(sum_value - 1.0) > kEps) fail("scenario probabilities do not sum to 1");

  // Exact cost accumulation must stay within int64: bound the largest total.
  const long double max_supply_cell = static_cast<long double>(inst.mult_max) *
                                      inst.max_per_size * inst.demand_scale();
  const long double max_dev = static_cast<long double>(max_demand) + max_supply_cell;
  const long double worst = max_dev * inst.num_sizes() *
                            std::max(1, inst.num_branches()) *
                            static_cast<long double>(inst.prob_scale());
  if (worst > 4.0e18L) fail("cost range would overflow exact arithmetic; reduce decimals");
}

// ---------------------------------------------------------------------------
// Cost evaluation
//
// All costs are exact integers in units of
// 10^-(demand_decimals + prob_decimals). Nominal mode charges the nominal
// scenario with full weight; expected mode weights each scenario with its
// scaled probability.

namespace detail {

inline CostInt scenario_assignment_cost(const Instance& inst, int scenario, int branch,
                                        const LotVec& lot, int mult) {
  const std::int64_t scale = inst.demand_scale();
  const int S = inst.num_sizes();
  CostInt dev = 0;
  for (int s = 0; s < S; ++s) {
    const std::int64_t supply = static_cast<std::int64_t>(mult) * lot[s] * scale;
    const std::int64_t d = inst.demand(scenario, branch, s);
    dev += std::abs(d - supply);
  }
  return dev;
}

}  // namespace detail

// Unchecked core; callers must pass an applicable lot and in-range mult.
inline CostInt assignment_cost_scaled(const Instance& inst, CostMode mode, int branch,
                                      const LotVec& lot, int mult) {
  if (mode == CostMode::Nominal) {
    return inst.prob_scale() *
           detail::scenario_assignment_cost(inst, inst.nominal_scenario, branch, lot, mult);
  }
  CostInt total = 0;
  for (int w = 0; w < inst.num_scenarios(); ++w) {
    total += inst.scenarios[w].prob_scaled *
             detail::scenario_assignment_cost(inst, w, branch, lot, mult);
  }
  return total;
}

inline CostInt assignment_cost_checked(const Instance& inst, CostMode mode, int branch,
                                       const LotVec& lot, int mult) {
  if (branch < 0 || branch >= inst.num_branches())
    throw Error(Error::Kind::InvalidInstance, "branch index out of range");
  if (!is_applicable(inst, lot))
    throw Error(Error::Kind::InvalidInstance, "lot-type is not applicable");
  if (mult < inst.mult_min || mult > inst.mult_max)
    throw Error(Error::Kind::InvalidInstance, "multiplicity out of range");
  return assignment_cost_scaled(inst, mode, branch, lot, mult);
}

inline double assignment_cost(const Instance& inst, CostMode mode, int branch,
                              const LotVec& lot, int mult) {
  return inst.cost_value(assignment_cost_checked(inst, mode, branch, lot, mult));
}

// Returns (cost, total pieces). Empty solutions cost nothing.
inline std::pair<CostInt, std::int64_t> solution_cost_scaled(const Instance& inst, CostMode mode,
                                                             const Solution& sol) {
  if (static_cast<int>(sol.per_branch.size()) != inst.num_branches())
    throw Error(Error::Kind::InvalidInstance, "solution covers wrong number of branches");
  CostInt cost = 0;
  std::int64_t pieces = 0;
  for (int b = 0; b < inst.num_branches(); ++b) {
    const auto& a = sol.per_branch[b];
    cost += assignment_cost_checked(inst, mode, b, a.lot, a.mult);
    pieces += static_cast<std::int64_t>(a.mult) * lot_size(a.lot);
  }
  return {cost, pieces};
}

inline std::pair<double, std::int64_t> solution_cost(const Instance& inst, CostMode mode,
                                                     const Solution& sol) {
  auto [c, pieces] = solution_cost_scaled(inst, mode, sol);
  return {inst.cost_value(c), pieces};
}

// Structural feasibility of a solution against the instance.
struct SolutionCheck {
  bool ok = true;
  std::string why;
};

inline SolutionCheck check_solution(const Instance& inst, const Solution& sol) {
  SolutionCheck r;
  auto reject = [&](const std::string& why) {
    r.ok = false;
    r.why = why;
    return r;
  };
  if (static_cast<int>(sol.per_branch.size()) != inst.num_branches())
    return reject("wrong number of branch assignments");
  for (int b = 0; b < inst.num_branches(); ++b) {
    const auto& a = sol.per_branch[b];
    if (!is_applicable(inst, a.lot)) return reject("branch " + std::to_string(b) + ": lot-type not applicable");
    if (a.mult < inst.mult_min || a.mult > inst.mult_max)
      return reject("branch " + std::to_string(b) + ": multiplicity out of range");
  }
  if (static_cast<int>(used_lot_types(sol).size()) > inst.max_lot_types)
    return reject("more than k distinct lot-types used");
  const std::int64_t pieces = total_pieces(sol);
  if (pieces < inst.supply_min || pieces > inst.supply_max)
    return reject("total pieces " + std::to_string(pieces) + " outside supply window");
  return r;
}

// ---------------------------------------------------------------------------
// Value-of-stochastic-solution metrics

struct VssMetrics {
  double ldp = 0.0;       // nominal cost of the nominal-optimal solution
  double eldp = 0.0;      // expected cost of the nominal-optimal solution
  double sldp = 0.0;      // optimal expected cost
  double vss = 0.0;       // eldp - sldp
  double rel_vss = 0.0;   // vss / eldp
  double gap_eldp = 0.0;  // (eldp - ldp) / eldp
  bool degenerate = false;  // eldp == 0; relative metrics forced to 0
};

inline VssMetrics vss_metrics(const Instance& inst, const Solution& nominal_solution,
                              double sldp_cost) {
  VssMetrics m;
  m.ldp = solution_cost(inst, CostMode::Nominal, nominal_solution).first;
  m.eldp = solution_cost(inst, CostMode::Expected, nominal_solution).first;
  m.sldp = sldp_cost;
  m.vss = m.eldp - m.sldp;
  if (m.eldp <= kEps) {
    m.degenerate = true;
    m.rel_vss = 0.0;
    m.gap_eldp = 0.0;
  } else {
    m.rel_vss = m.vss / m.eldp;
    m.gap_eldp = (m.eldp - m.ldp) / m.eldp;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Per-branch cost tables
//
// Deviation costs separate by size: cost(b,l,m) = sum_s g_{b,s}(m * l_s)
// where g weights per-scenario absolute deviations. The tables below cache
// g for every (size, multiplicity, component value) so lot-type searches can
// evaluate candidates and single-size minima in O(|S|).

class CostModel {
 public:
  CostModel(const Instance& inst, CostMode mode)
      : inst_(&inst),
        mode_(mode),
        S_(inst.num_sizes()),
        M_(inst.num_mults()),
        V_(inst.max_per_size - inst.min_per_size + 1),
        tables_(static_cast<std::size_t>(inst.num_branches())),
        suffix_(static_cast<std::size_t>(inst.num_branches())) {}

  const Instance& instance() const { return *inst_; }
  CostMode mode() const { return mode_; }

  // g_{b,s}(m*v) with v an absolute component value in [min_c, max_c].
  CostInt size_cost(int b, int s, int m, int v) const {
    ensure(b);
    return tables_[b][idx(s, m - inst_->mult_min, v - inst_->min_per_size)];
  }

  CostInt lot_cost(int b, const LotVec& lot, int m) const {
    ensure(b);
    const auto& t = tables_[b];
    const int mi = m - inst_->mult_min;
    CostInt c = 0;
    for (int s = 0; s < S_; ++s) c += t[idx(s, mi, lot[s] - inst_->min_per_size)];
    return c;
  }

  // Sum over sizes s >= s_from of min_v g_{b,s}(m*v).
  CostInt suffix_best(int b, int m, int s_from) const {
    ensure(b);
    return suffix_[b][static_cast<std::size_t>(m - inst_->mult_min) * (S_ + 1) + s_from];
  }

  CostInt best_size_cost(int b, int s, int m) const {
    return suffix_best(b, m, s) - suffix_best(b, m, s + 1);
  }

  // Locally optimal multiplicity: minimize cost(b,lot,m) over the whole
  // multiplicity interval, ties broken by the smaller multiplicity.
  std::pair<int, CostInt> best_multiplicity(int b, const LotVec& lot) const {
    int best_m = inst_->mult_min;
    CostInt best_c = lot_cost(b, lot, inst_->mult_min);
    for (int m = inst_->mult_min + 1; m <= inst_->mult_max; ++m) {
      const CostInt c = lot_cost(b, lot, m);
      if (c < best_c) {
        best_c = c;
        best_m = m;
      }
    }
    return {best_m, best_c};
  }

 private:
  std::size_t idx(int s, int mi, int vi) const {
    return (static_cast<std::size_t>(s) * M_ + mi) * V_ + vi;
  }

  void ensure(int b) const {
    if (!tables_[b].empty()) return;
    auto& t = tables_[b];
    t.assign(static_cast<std::size_t>(S_) * M_ * V_, 0);
    const std::int64_t scale = inst_->demand_scale();
    for (int s = 0; s < S_; ++s) {
      for (int mi = 0; mi < M_; ++mi) {
        const int m = inst_->mult_min + mi;
        for (int vi = 0; vi < V_; ++vi) {
          const int v = inst_->min_per_size + vi;
          const std::int64_t supply = static_cast<std::int64_t>(m) * v * scale;
          CostInt g = 0;
          if (mode_ == CostMode::Nominal) {
            g = inst_->prob_scale() *
                std::abs(inst_->demand(inst_->nominal_scenario, b, s) - supply);
          } else {
            for (int w = 0; w < inst_->num_scenarios(); ++w) {
              g += inst_->scenarios[w].prob_scaled *
                   std::abs(inst_->demand(w, b, s) - supply);
            }
          }
          t[idx(s, mi, vi)] = g;
        }
      }
    }
    auto& suf = suffix_[b];
    suf.assign(static_cast<std::size_t>(M_) * (S_ + 1), 0);
    for (int mi = 0; mi < M_; ++mi) {
      for (int s = S_ - 1; s >= 0; --s) {
        CostInt best = std::numeric_limits<CostInt>::max();
        for (int vi = 0; vi < V_; ++vi) best = std::min(best, t[idx(s, mi, vi)]);
        suf[static_cast<std::size_t>(mi) * (S_ + 1) + s] =
            suf[static_cast<std::size_t>(mi) * (S_ + 1) + s + 1] + best;
      }
    }
  }

  const Instance* inst_;
  CostMode mode_;
  int S_, M_, V_;
  mutable std::vector<std::vector<CostInt>> tables_;
  mutable std::vector<std::vector<CostInt>> suffix_;
};

}  // namespace ldp
