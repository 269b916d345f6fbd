#pragma once

// Primal heuristics and consistency checking.
//
// alh() builds a feasible solution from at most two "average" lot-types
// assigned sequentially under window guards. The classic construction uses
// multiplicity 1 everywhere; that cannot reach supply windows calibrated to
// demands that need several lots per branch, so we pick one shared
// multiplicity first: the smallest m whose window certificate
//   |B|*m*|lo| <= I_upper,  |B|*m*|hi| >= I_lower,
//   I_upper - I_lower >= m*(|hi| - |lo|)
// holds, which guarantees the sequential assignment lands in the window.
// With m = 1 certified this is exactly the classic construction.
//
// sfa() is score - fix - adjust: traverse k-subsets of the scored lot-types
// in score order, fix each branch to its in-subset best pair, repair window
// violations by single-branch reassignments of minimum cost increase per
// piece moved, keep the best incumbent. Budgets are deterministic work
// counts (a nominal evaluations-per-second rate times the time limit), so
// equal inputs give byte-equal results regardless of machine speed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ldp/instance.hpp"
#include "ldp/lotspace.hpp"

namespace ldp {

// ---------------------------------------------------------------------------
// Average lot-type construction

struct AlhState {
  LotVec lo_lot, hi_lot;  // floor/ceil average lot-types, repaired applicable
  int mult = 1;           // shared multiplicity
  bool certified = false; // window guarantee held before assignment
  Solution solution;
};

namespace heur_detail {

// floor/ceil of the clamped per-size average demand for multiplicity m
inline std::pair<int, int> avg_component(const Instance& inst, std::int64_t demand_scaled,
                                         int m) {
  const std::int64_t den = static_cast<std::int64_t>(inst.num_branches()) *
                           inst.demand_scale() * m * inst.num_sizes();
  // clamp the per-branch average total into [min_total, max_total] first
  const std::int64_t tden = static_cast<std::int64_t>(inst.num_branches()) *
                            inst.demand_scale() * m;
  std::int64_t tnum = demand_scaled;
  if (tnum < inst.min_total * tden) tnum = inst.min_total * tden;
  if (tnum > inst.max_total * tden) tnum = inst.max_total * tden;
  // per-size average, clamped into [min_per_size, max_per_size]
  const std::int64_t num = tnum;
  if (num <= inst.min_per_size * den) return {inst.min_per_size, inst.min_per_size};
  if (num >= inst.max_per_size * den) return {inst.max_per_size, inst.max_per_size};
  const std::int64_t fl = num / den;
  const std::int64_t ce = (num + den - 1) / den;
  return {static_cast<int>(fl), static_cast<int>(ce)};
}

inline long long lot_total(const LotVec& l) {
  long long t = 0;
  for (int v : l) t += v;
  return t;
}

// raise |lot| to at least min_total / lower it to at most max_total,
// lowest size index first
inline bool repair_up(const Instance& inst, LotVec& lot) {
  long long total = lot_total(lot);
  while (total < inst.min_total) {
    bool moved = false;
    for (std::size_t s = 0; s < lot.size() && total < inst.min_total; ++s)
      while (lot[s] < inst.max_per_size && total < inst.min_total) {
        ++lot[s];
        ++total;
        moved = true;
      }
    if (!moved) return false;
  }
  return true;
}

inline bool repair_down(const Instance& inst, LotVec& lot) {
  long long total = lot_total(lot);
  while (total > inst.max_total) {
    bool moved = false;
    for (std::size_t s = 0; s < lot.size() && total > inst.max_total; ++s)
      while (lot[s] > inst.min_per_size && total > inst.max_total) {
        --lot[s];
        --total;
        moved = true;
      }
    if (!moved) return false;
  }
  return true;
}

}  // namespace heur_detail

// Non-throwing core; nullopt when the construction cannot land in the window.
inline std::optional<AlhState> alh_construct(const Instance& inst) {
  const int B = inst.num_branches();
  const int S = inst.num_sizes();
  const int w = inst.nominal_scenario;
  std::int64_t total_demand = 0;  // scaled
  std::vector<std::int64_t> branch_demand(B, 0);
  for (int b = 0; b < B; ++b) {
    for (int s = 0; s < S; ++s) branch_demand[b] += inst.demand(w, b, s);
    total_demand += branch_demand[b];
  }

  struct Candidate {
    int m;
    LotVec lo, hi;
    bool certified;
    std::int64_t distance;  // scaled distance of the average to the reachable range
  };
  std::vector<Candidate> cands;
  for (int m = inst.mult_min; m <= inst.mult_max; ++m) {
    const auto [fl, ce] = heur_detail::avg_component(inst, total_demand, m);
    LotVec lo(S, fl), hi(S, ce);
    if (!heur_detail::repair_up(inst, lo)) continue;
    if (!heur_detail::repair_down(inst, hi)) continue;
    // repairs only move totals toward the window; both lots stay applicable
    const long long wlo = static_cast<long long>(m) * heur_detail::lot_total(lo);
    const long long whi = static_cast<long long>(m) * heur_detail::lot_total(hi);
    const bool cert = static_cast<long long>(B) * wlo <= inst.supply_max &&
                      static_cast<long long>(B) * whi >= inst.supply_min &&
                      inst.supply_max - inst.supply_min >= whi - wlo;
    const std::int64_t reach_lo = static_cast<std::int64_t>(B) * m * inst.min_total *
                                  inst.demand_scale();
    const std::int64_t reach_hi = static_cast<std::int64_t>(B) * m * inst.max_total *
                                  inst.demand_scale();
    std::int64_t dist = 0;
    if (total_demand < reach_lo) dist = reach_lo - total_demand;
    if (total_demand > reach_hi) dist = total_demand - reach_hi;
    cands.push_back({m, std::move(lo), std::move(hi), cert, dist});
  }
  if (cands.empty()) return std::nullopt;

  const Candidate* pick = nullptr;
  for (const auto& c : cands)  // smallest certified multiplicity wins
    if (c.certified) {
      pick = &c;
      break;
    }
  if (!pick) {  // best effort: closest reachable range, then smaller m
    pick = &cands[0];
    for (const auto& c : cands)
      if (c.distance < pick->distance) pick = &c;
  }

  AlhState st;
  st.lo_lot = pick->lo;
  st.hi_lot = pick->hi;
  st.mult = pick->m;
  st.certified = pick->certified;

  const long long wlo = static_cast<long long>(st.mult) * heur_detail::lot_total(st.lo_lot);
  const long long whi = static_cast<long long>(st.mult) * heur_detail::lot_total(st.hi_lot);
  const std::int64_t scale = inst.demand_scale();
  long long assigned = 0;       // pieces
  std::int64_t seen_demand = 0; // scaled
  st.solution.per_branch.resize(B);
  for (int b = 0; b < B; ++b) {
    const long long rest = B - 1 - b;
    bool take_hi;
    if (assigned + wlo + rest * whi <= inst.supply_min) {
      take_hi = true;  // anything less can no longer reach the lower bound
    } else if (assigned + whi + rest * wlo >= inst.supply_max) {
      take_hi = false;  // anything more can no longer stay under the upper bound
    } else {
      // track the aggregated demand: 2*scale*(n + (wlo+whi)/2) > 2*(D + d_b)
      take_hi = 2 * assigned * scale + (wlo + whi) * scale <=
                2 * (seen_demand + branch_demand[b]);
    }
    const LotVec& lot = take_hi ? st.hi_lot : st.lo_lot;
    st.solution.per_branch[b] = {lot, st.mult};
    assigned += static_cast<long long>(st.mult) * heur_detail::lot_total(lot);
    seen_demand += branch_demand[b];
  }
  if (assigned < inst.supply_min || assigned > inst.supply_max) return std::nullopt;
  return st;
}

// ---------------------------------------------------------------------------
// Consistency

struct ConsistencyReport {
  bool feasible = false;             // certified by construction / k=1 scan
  bool demand_consistent = false;    // nominal total demand inside the window
  bool cardinality_consistent = false;  // window at least as wide as [min_t,max_t]
  bool consistent = false;
  std::string detail;                // names of violated clauses, if any
  std::optional<Solution> witness;   // feasible construction when found
};

namespace heur_detail {

// k=1: one lot-type shared by all branches, per-branch multiplicities free.
// The supply only depends on |l| and the multiplicity sum, which ranges over
// every integer in [B*mult_min, B*mult_max].
inline std::optional<Solution> single_lottype_witness(const Instance& inst) {
  const int B = inst.num_branches();
  for (int t = inst.min_total; t <= inst.max_total; ++t) {
    LotSpace slice(inst.num_sizes(), inst.min_per_size, inst.max_per_size, t, t);
    if (slice.size() == 0) continue;
    const std::int64_t lo = static_cast<std::int64_t>(B) * inst.mult_min;
    const std::int64_t hi = static_cast<std::int64_t>(B) * inst.mult_max;
    if (t == 0) {
      if (inst.supply_min > 0) continue;
      Solution sol;
      sol.per_branch.assign(B, {slice.unrank(0), inst.mult_min});
      return sol;
    }
    // smallest multiplicity sum whose supply reaches the window
    std::int64_t msum = std::max(lo, (inst.supply_min + t - 1) / t);
    if (msum > hi || msum * t > inst.supply_max) continue;
    Solution sol;
    sol.per_branch.assign(B, {slice.unrank(0), inst.mult_min});
    std::int64_t extra = msum - lo;
    for (int b = 0; b < B && extra > 0; ++b) {
      const int add = static_cast<int>(std::min<std::int64_t>(
          extra, inst.mult_max - inst.mult_min));
      sol.per_branch[b].mult += add;
      extra -= add;
    }
    return sol;
  }
  return std::nullopt;
}

}  // namespace heur_detail

inline ConsistencyReport check_consistency(const Instance& inst) {
  ConsistencyReport rep;
  std::int64_t total_demand = 0;
  for (int b = 0; b < inst.num_branches(); ++b)
    for (int s = 0; s < inst.num_sizes(); ++s)
      total_demand += inst.demand(inst.nominal_scenario, b, s);
  rep.demand_consistent = inst.supply_min * inst.demand_scale() <= total_demand &&
                          total_demand <= inst.supply_max * inst.demand_scale();
  rep.cardinality_consistent =
      inst.supply_max - inst.supply_min >= inst.max_total - inst.min_total;

  if (inst.max_lot_types == 1) {
    auto witness = heur_detail::single_lottype_witness(inst);
    rep.feasible = witness.has_value();
    rep.witness = std::move(witness);
  } else {
    auto st = alh_construct(inst);
    rep.feasible = st.has_value();
    if (st) rep.witness = std::move(st->solution);
  }

  rep.consistent = rep.feasible && rep.demand_consistent && rep.cardinality_consistent;
  if (!rep.consistent) {
    std::string why;
    if (!rep.feasible) why += "feasibility";
    if (!rep.demand_consistent) why += std::string(why.empty() ? "" : ", ") + "demand consistency";
    if (!rep.cardinality_consistent)
      why += std::string(why.empty() ? "" : ", ") + "cardinality consistency";
    rep.detail = "violated: " + why;
  }
  return rep;
}

inline void require_consistent(const Instance& inst) {
  const ConsistencyReport rep = check_consistency(inst);
  if (!rep.consistent) throw Error(Error::Kind::Inconsistent, "inconsistent instance; " + rep.detail);
}

// Feasible two-lot-type solution; throws on k=1 or inconsistent input.
inline Solution alh(const Instance& inst) {
  if (inst.max_lot_types == 1)
    throw Error(Error::Kind::Guard, "the average construction needs k > 1; use sfa for k = 1");
  const ConsistencyReport rep = check_consistency(inst);
  if (!rep.consistent) throw Error(Error::Kind::Inconsistent, "inconsistent instance; " + rep.detail);
  auto st = alh_construct(inst);
  if (!st)  // cannot happen after the report above; keep the contract anyway
    throw Error(Error::Kind::Inconsistent, "inconsistent instance; violated: feasibility");
  return std::move(st->solution);
}

// ---------------------------------------------------------------------------
// Score - fix - adjust

struct SfaParams {
  // 0 = auto: max(1, ln|L|/10) nominal seconds, the classic choice
  double time_limit_seconds = 0;
  // deterministic budget: work units (branch-pair evaluations) per nominal second
  long long work_rate = 2000000;
  // candidate-list cap for the exhaustive k=1 sweep
  Count full_scan_cap = 200000;
};

struct SfaResult {
  Solution solution;
  CostInt cost_scaled = 0;
  long long subsets_tried = 0;
  long long work = 0;
  bool seeded_by_alh = false;
};

namespace heur_detail {

struct PairCache {
  const CostModel& cm;
  std::vector<std::vector<std::pair<CostInt, int>>> best;  // [cand][branch] = (cost, m)
  std::vector<const LotVec*> lots;
  long long evals = 0;

  explicit PairCache(const CostModel& cm_) : cm(cm_) {}

  int add(const LotVec* lot) {
    lots.push_back(lot);
    best.emplace_back();
    return static_cast<int>(lots.size()) - 1;
  }

  const std::pair<CostInt, int>& pair_for(int cand, int b) {
    auto& row = best[cand];
    if (row.empty()) {
      const Instance& inst = cm.instance();
      row.resize(inst.num_branches());
      for (int bb = 0; bb < inst.num_branches(); ++bb) {
        auto [m, c] = cm.best_multiplicity(bb, *lots[cand]);
        row[bb] = {c, m};
      }
      evals += static_cast<long long>(inst.num_branches()) * inst.num_mults();
    }
    return row[b];
  }
};

// exact multiplicity assignment for a single shared lot-type: DP over the
// multiplicity sum; used for k=1 where the subset heuristic must be optimal
inline std::optional<std::pair<CostInt, std::vector<int>>> best_mults_for_lot(
    const CostModel& cm, const LotVec& lot, long long* work) {
  const Instance& inst = cm.instance();
  const int B = inst.num_branches();
  const int M = inst.num_mults();
  const long long t = heur_detail::lot_total(lot);
  const std::int64_t lo_sum = static_cast<std::int64_t>(B) * inst.mult_min;
  const std::int64_t hi_sum = static_cast<std::int64_t>(B) * inst.mult_max;
  std::int64_t need_lo = lo_sum, need_hi = hi_sum;
  if (t == 0) {
    if (inst.supply_min > 0) return std::nullopt;
  } else {
    need_lo = std::max<std::int64_t>(lo_sum, (inst.supply_min + t - 1) / t);
    need_hi = std::min<std::int64_t>(hi_sum, inst.supply_max / t);
    if (need_lo > need_hi) return std::nullopt;
  }
  const int states = static_cast<int>(hi_sum - lo_sum) + 1;
  const CostInt inf = std::numeric_limits<CostInt>::max();
  std::vector<CostInt> dp(states, inf);
  std::vector<std::vector<int>> choice(B, std::vector<int>(states, -1));
  dp[0] = 0;
  for (int b = 0; b < B; ++b) {
    std::vector<CostInt> nx(states, inf);
    for (int sig = 0; sig <= b * (M - 1); ++sig) {
      if (dp[sig] == inf) continue;
      for (int mi = 0; mi < M; ++mi) {
        const CostInt c = dp[sig] + cm.lot_cost(b, lot, inst.mult_min + mi);
        const int ns = sig + mi;
        if (c < nx[ns]) {
          nx[ns] = c;
          choice[b][ns] = mi;
        }
      }
    }
    dp.swap(nx);
    *work += static_cast<long long>(b * (M - 1) + 1) * M;
  }
  CostInt bestc = inf;
  int best_sig = -1;
  for (int sig = 0; sig < states; ++sig) {
    const std::int64_t msum = lo_sum + sig;
    if (msum < need_lo || (t > 0 && msum > need_hi)) continue;
    if (dp[sig] < bestc) {
      bestc = dp[sig];
      best_sig = sig;
    }
  }
  if (best_sig < 0) return std::nullopt;
  std::vector<int> mults(B);
  int sig = best_sig;
  for (int b = B - 1; b >= 0; --b) {
    const int mi = choice[b][sig];
    mults[b] = inst.mult_min + mi;
    sig -= mi;
  }
  return std::make_pair(bestc, std::move(mults));
}

}  // namespace heur_detail

inline SfaResult sfa(const Instance& inst, CostMode mode, const GlbResult& glb,
                     const SfaParams& params = {}) {
  const ConsistencyReport rep = check_consistency(inst);
  if (!rep.consistent) throw Error(Error::Kind::Inconsistent, "inconsistent instance; " + rep.detail);

  CostModel cm(inst, mode);
  LotSpace space(inst);
  const int B = inst.num_branches();
  const int k = std::max(1, inst.max_lot_types);

  SfaResult out;
  bool have_incumbent = false;
  CostInt best_cost = 0;

  auto consider = [&](const Solution& sol, CostInt cost) {
    if (!have_incumbent || cost < best_cost) {
      out.solution = sol;
      best_cost = cost;
      have_incumbent = true;
    }
  };

  if (k > 1) {
    auto st = alh_construct(inst);
    if (st) {
      consider(st->solution, solution_cost_scaled(inst, mode, st->solution).first);
      out.seeded_by_alh = true;
    }
  }

  double limit = params.time_limit_seconds;
  if (limit <= 0) limit = std::max(1.0, std::log(static_cast<double>(space.size())) / 10.0);
  const long long budget =
      static_cast<long long>(limit * static_cast<double>(params.work_rate));

  // candidate lot-types: scored table first (already score-sorted), then for
  // k=1 the rest of the space in rank order so tiny spaces are swept fully
  std::vector<LotVec> cand_lots;
  for (const auto& e : glb.table.entries) cand_lots.push_back(e.lot);
  if (k == 1) {
    if (space.size() <= params.full_scan_cap) {
      std::vector<bool> seen(static_cast<std::size_t>(space.size()), false);
      for (const auto& e : glb.table.entries) seen[static_cast<std::size_t>(e.rank)] = true;
      for (Count r = 0; r < space.size(); ++r)
        if (!seen[static_cast<std::size_t>(r)]) cand_lots.push_back(space.unrank(r));
    } else if (rep.witness) {
      // feasibility certificate's lot-type guarantees at least one feasible sweep
      const LotVec& wl = rep.witness->per_branch.front().lot;
      bool dup = false;
      for (const auto& l : cand_lots) dup = dup || l == wl;
      if (!dup) cand_lots.push_back(wl);
    }
  }
  if (k > 1 && static_cast<int>(cand_lots.size()) < k) {
    // pad from a demand-average pseudo branch so subsets of size k exist
    Instance pseudo = inst;
    pseudo.branch_ids = {"aggregate"};
    for (auto& sc : pseudo.scenarios) {
      std::vector<std::int64_t> avg(inst.num_sizes(), 0);
      for (int b = 0; b < B; ++b)
        for (int s = 0; s < inst.num_sizes(); ++s)
          avg[s] += sc.demand_scaled[static_cast<std::size_t>(b) * inst.num_sizes() + s];
      for (auto& v : avg) v /= B;
      sc.demand_scaled = std::move(avg);
    }
    CostModel pcm(pseudo, mode);
    const int want = std::min<int>(k + 8, static_cast<int>(std::min<Count>(space.size(), 64)));
    for (const auto& e : find_loc_best_lottypes(pcm, 0, want)) {
      bool dup = false;
      for (const auto& l : cand_lots) dup = dup || l == e.lot;
      if (!dup) cand_lots.push_back(e.lot);
      if (static_cast<int>(cand_lots.size()) >= k) break;
    }
  }

  const int N = static_cast<int>(cand_lots.size());
  const int kk = std::min(k, N);
  if (kk == 0) {
    if (!have_incumbent) throw Error(Error::Kind::Internal, "no candidate lot-types");
    out.cost_scaled = best_cost;
    return out;
  }

  heur_detail::PairCache cache(cm);
  for (const auto& l : cand_lots) cache.add(&l);

  std::vector<int> sel(kk);
  for (int i = 0; i < kk; ++i) sel[i] = i;

  std::vector<int> assign_cand(B);
  std::vector<int> assign_m(B);
  std::vector<CostInt> assign_cost(B);

  bool more = true;
  while (more) {
    // the budget never cuts the search before a first feasible incumbent
    if (have_incumbent && cache.evals + out.work >= budget) break;
    ++out.subsets_tried;

    if (kk == 1) {
      // exact multiplicity allocation keeps the k=1 sweep optimal
      const LotVec& lot = cand_lots[sel[0]];
      auto res = heur_detail::best_mults_for_lot(cm, lot, &out.work);
      if (res) {
        Solution sol;
        sol.per_branch.resize(B);
        for (int b = 0; b < B; ++b) sol.per_branch[b] = {lot, res->second[b]};
        consider(sol, res->first);
      }
    } else {
      // fix: in-subset best pair per branch
      std::int64_t pieces = 0;
      for (int b = 0; b < B; ++b) {
        int bc = -1, bm = 0;
        CostInt bcost = 0;
        for (int j : sel) {
          const auto& [c, m] = cache.pair_for(j, b);
          if (bc < 0 || c < bcost) {
            bc = j;
            bm = m;
            bcost = c;
          }
        }
        assign_cand[b] = bc;
        assign_m[b] = bm;
        assign_cost[b] = bcost;
        pieces += static_cast<std::int64_t>(bm) * heur_detail::lot_total(cand_lots[bc]);
      }
      out.work += static_cast<long long>(B) * kk;

      // adjust: cheapest single-branch reassignment per piece moved
      bool stuck = false;
      while (pieces < inst.supply_min || pieces > inst.supply_max) {
        const bool under = pieces < inst.supply_min;
        int mb = -1, mc = -1, mm = 0;
        CostInt mdelta = 0;
        std::int64_t msize = 1;
        for (int b = 0; b < B; ++b) {
          const std::int64_t cur =
              static_cast<std::int64_t>(assign_m[b]) *
              heur_detail::lot_total(cand_lots[assign_cand[b]]);
          for (int j : sel) {
            const std::int64_t lt = heur_detail::lot_total(cand_lots[j]);
            for (int m = inst.mult_min; m <= inst.mult_max; ++m) {
              const std::int64_t delta = static_cast<std::int64_t>(m) * lt - cur;
              if (under) {
                if (delta <= 0 || pieces + delta > inst.supply_max) continue;
              } else {
                if (delta >= 0 || pieces + delta < inst.supply_min) continue;
              }
              const CostInt dcost = cm.lot_cost(b, cand_lots[j], m) - assign_cost[b];
              const std::int64_t dsz = std::llabs(delta);
              // dcost/dsz < mdelta/msize, exact comparison
              const bool better =
                  mb < 0 || static_cast<__int128>(dcost) * msize <
                                static_cast<__int128>(mdelta) * dsz;
              if (better) {
                mb = b;
                mc = j;
                mm = m;
                mdelta = dcost;
                msize = dsz;
              }
            }
          }
        }
        out.work += static_cast<long long>(B) * kk * inst.num_mults();
        if (mb < 0) {
          stuck = true;
          break;
        }
        const std::int64_t cur =
            static_cast<std::int64_t>(assign_m[mb]) *
            heur_detail::lot_total(cand_lots[assign_cand[mb]]);
        pieces += static_cast<std::int64_t>(mm) * heur_detail::lot_total(cand_lots[mc]) - cur;
        assign_cand[mb] = mc;
        assign_m[mb] = mm;
        assign_cost[mb] = cm.lot_cost(mb, cand_lots[mc], mm);
      }

      if (!stuck) {
        CostInt total = 0;
        for (int b = 0; b < B; ++b) total += assign_cost[b];
        if (!have_incumbent || total < best_cost) {
          Solution sol;
          sol.per_branch.resize(B);
          for (int b = 0; b < B; ++b)
            sol.per_branch[b] = {cand_lots[assign_cand[b]], assign_m[b]};
          consider(sol, total);
        }
      }
    }

    // next k-combination in lexicographic order
    int i = kk - 1;
    while (i >= 0 && sel[i] == N - kk + i) --i;
    if (i < 0) {
      more = false;
    } else {
      ++sel[i];
      for (int j = i + 1; j < kk; ++j) sel[j] = sel[j - 1] + 1;
    }
  }

  out.work += cache.evals;
  if (!have_incumbent)
    throw Error(Error::Kind::Inconsistent, "inconsistent instance; violated: feasibility");
  out.cost_scaled = best_cost;
  return out;
}

}  // namespace ldp
