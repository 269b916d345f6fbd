#pragma once

// Pricing for the branch-and-price solver. Given optimal duals of the pool
// relaxation, finds coordinated sets of columns whose negative reduced costs
// no feasible extension of the duals can pay for. Three scans run in order,
// each only when the previous one came up empty:
//
//   1. new multiplicities on pooled (branch, lot-type) pairs; their reduced
//      cost is exact, so each one is a promising singleton,
//   2. pooled lot-types priced into branches that do not carry them yet;
//      a lot-type qualifies when its check value (the sum of the negative
//      clamped per-branch minima) undercuts what its selector row earns,
//   3. lot-types the pool does not hold at all, found by a depth-first
//      search over the design space with an admissible per-node bound.
//
// A pass that reaches scan 3 has seen every index the dual-shift bound
// needs, so only those passes produce a valid lower bound on the full
// relaxation value.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "ldp/instance.hpp"
#include "ldp/lotspace.hpp"
#include "ldp/master.hpp"

namespace ldp {

// One coordinated set of columns to enter the pool together. `add_selector`
// marks lot-types the pool does not hold yet (their selector column and
// reverse row come first).
struct PromisingSet {
  LotVec lot;
  bool add_selector = false;
  std::vector<std::pair<int, int>> cols;  // (branch, multiplicity)
  double value = 0.0;                     // the measure that ranked the set
};

struct PricingParams {
  int max_lot_sets = 10;  // cap on scan-2 sets per pass, smallest check value first
  int max_new_lots = 3;   // cap on scan-3 lot-types per pass
  double eps = 1e-9;      // violation margin below which a set is not worth emitting
};

struct PricingOutcome {
  std::vector<PromisingSet> sets;
  int tier = 0;                // deepest scan that ran: 1, 2 or 3
  bool complete = false;       // scan 3 ran, so the shift bound below is valid
  double cbar_star_sum = 0.0;  // sum over branches of the clamped minimal reduced cost
  double dbar_star = 0.0;      // clamped worst selector-row violation, complete passes only
  double z_csb = -kInf;        // z_rmp + cbar_star_sum + k * dbar_star, complete passes only
  long long bb_nodes = 0;      // nodes expanded by the new-lot search
};

struct PricingContext {
  const ColumnPool* pool = nullptr;
  const DualSolution* duals = nullptr;

  const Instance& inst() const { return pool->instance(); }
  const CostModel& cm() const { return pool->cost_model(); }

  // Reduced cost of x_{b,l,m} under the zero-filled duals: beta and delta
  // are the pair and selector duals where those rows exist and 0 otherwise.
  double cbar(int b, const LotVec& lot, long long pieces, int m, double beta,
              double delta) const {
    return inst().cost_value(cm().lot_cost(b, lot, m)) - duals->alpha[static_cast<std::size_t>(b)] +
           beta - delta -
           static_cast<double>(m) * static_cast<double>(pieces) * (duals->phi - duals->psi);
  }

  // Minimum over the whole multiplicity interval, ties toward smaller m.
  double min_cbar(int b, const LotVec& lot, long long pieces, double beta, double delta,
                  int* argmin) const {
    const Instance& in = inst();
    double best = cbar(b, lot, pieces, in.mult_min, beta, delta);
    int best_m = in.mult_min;
    for (int m = in.mult_min + 1; m <= in.mult_max; ++m) {
      const double v = cbar(b, lot, pieces, m, beta, delta);
      if (v < best) {
        best = v;
        best_m = m;
      }
    }
    if (argmin != nullptr) *argmin = best_m;
    return best;
  }
};

// ---------------------------------------------------------------------------
// Scan 1: missing multiplicities on pooled pairs

struct PairScan {
  std::vector<PromisingSet> sets;
  std::vector<double> branch_min;  // per branch: exact min reduced cost over its
                                   // pooled pairs and all multiplicities
};

inline PairScan scan_pooled_pairs(const PricingContext& ctx, double eps) {
  PairScan out;
  out.branch_min.assign(static_cast<std::size_t>(ctx.inst().num_branches()),
                        std::numeric_limits<double>::infinity());
  for (const PoolLot& pl : ctx.pool->lots()) {
    const double delta = ctx.duals->delta(pl);
    for (const BranchCols& bc : pl.branches) {
      int best_m = 0;
      const double v = ctx.min_cbar(bc.branch, pl.lot, pl.pieces, ctx.duals->beta(bc), delta,
                                    &best_m);
      double& bm = out.branch_min[static_cast<std::size_t>(bc.branch)];
      bm = std::min(bm, v);
      // a pooled minimizer with v < 0 is solver noise; the pair is left alone
      if (v < -eps && bc.find_mult(best_m) < 0)
        out.sets.push_back({pl.lot, false, {{bc.branch, best_m}}, v});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scan 2: pooled lot-types for their missing branches

struct LotScan {
  std::vector<PromisingSet> sets;   // capped, ordered by (check value, lot)
  double worst_violation = 0.0;     // min over scanned lots of check - threshold, clamped
};

inline LotScan scan_pooled_lots(const PricingContext& ctx, int cap, double eps) {
  LotScan out;
  const Instance& inst = ctx.inst();
  const int B = inst.num_branches();
  struct Cand {
    double check;
    int lot_id;
  };
  std::vector<Cand> picked;  // sorted by (check, lot lex), at most cap entries
  const auto& lots = ctx.pool->lots();
  auto lex_before = [&](int a, int b) { return lots[static_cast<std::size_t>(a)].lot < lots[static_cast<std::size_t>(b)].lot; };

  for (int id = 0; id < static_cast<int>(lots.size()); ++id) {
    const PoolLot& pl = lots[static_cast<std::size_t>(id)];
    if (static_cast<int>(pl.branches.size()) == B) continue;  // pooled everywhere
    const double delta = ctx.duals->delta(pl);
    const double mu_l = pl.covered ? 0.0 : ctx.duals->mu;
    double sum_beta = 0.0;
    for (const BranchCols& bc : pl.branches) sum_beta += ctx.duals->beta(bc);
    double check = 0.0;
    auto bc_it = pl.branches.begin();
    for (int b = 0; b < B; ++b) {
      if (bc_it != pl.branches.end() && bc_it->branch == b) {
        ++bc_it;
        continue;
      }
      check += std::min(0.0, ctx.min_cbar(b, pl.lot, pl.pieces, 0.0, delta, nullptr));
    }
    const double threshold = sum_beta - ctx.duals->gamma - delta + mu_l;
    out.worst_violation = std::min(out.worst_violation, check - threshold);
    if (!(check < threshold - eps)) continue;
    if (static_cast<int>(picked.size()) == cap) {
      const Cand& w = picked.back();
      if (check > w.check || (check == w.check && !lex_before(id, w.lot_id))) continue;
    }
    Cand c{check, id};
    auto pos = std::upper_bound(picked.begin(), picked.end(), c, [&](const Cand& a, const Cand& x) {
      return a.check < x.check || (a.check == x.check && lex_before(a.lot_id, x.lot_id));
    });
    picked.insert(pos, c);
    if (static_cast<int>(picked.size()) > cap) picked.pop_back();
  }

  for (const Cand& c : picked) {
    const PoolLot& pl = lots[static_cast<std::size_t>(c.lot_id)];
    const double delta = ctx.duals->delta(pl);
    PromisingSet set;
    set.lot = pl.lot;
    set.value = c.check;
    auto bc_it = pl.branches.begin();
    for (int b = 0; b < B; ++b) {
      if (bc_it != pl.branches.end() && bc_it->branch == b) {
        ++bc_it;
        continue;
      }
      int best_m = 0;
      if (ctx.min_cbar(b, pl.lot, pl.pieces, 0.0, delta, &best_m) < 0.0)
        set.cols.push_back({b, best_m});
    }
    out.sets.push_back(std::move(set));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scan 3: lot-types outside the pool

struct NewLotScan {
  std::vector<PromisingSet> sets;  // capped, ordered by (check value, lot)
  double worst_violation = 0.0;    // min over new lots of check + gamma - mu, clamped
  long long nodes = 0;
};

namespace pricing_detail {

// Depth-first search over the design space. Every node carries, per branch
// and multiplicity, the exact partial cost of the fixed components; the node
// bound adds the cheapest completion per size, relaxes the supply term over
// the reachable cardinality window, and aggregates the per-branch minima the
// same way the check value does, so it never exceeds the check value of any
// completion. Survivors need a bound strictly under the selector threshold
// and, once the list is full, no worse than the current worst entry (equal
// bounds are still explored, so ties resolve exactly).
struct NewLotSearch {
  const PricingContext& ctx;
  const Instance& inst;
  std::size_t cap;
  double eps;
  int S, M, B;
  double thr;        // what a fresh selector earns: mu - gamma
  double pos, neg;   // split of the net supply dual phi - psi
  std::vector<CostInt> partial;  // [branch * M + mult offset]
  LotVec prefix;
  long long prefix_sz = 0;
  std::vector<PromisingSet> list;
  double cmin = std::numeric_limits<double>::infinity();
  long long nodes = 0;

  NewLotSearch(const PricingContext& c, std::size_t cap_, double eps_)
      : ctx(c), inst(c.inst()), cap(cap_), eps(eps_) {
    S = inst.num_sizes();
    M = inst.num_mults();
    B = inst.num_branches();
    thr = ctx.duals->mu - ctx.duals->gamma;
    const double pd = ctx.duals->phi - ctx.duals->psi;
    pos = std::max(pd, 0.0);
    neg = std::max(-pd, 0.0);
    partial.assign(static_cast<std::size_t>(B) * M, 0);
    prefix.reserve(static_cast<std::size_t>(S));
  }

  bool full() const { return list.size() >= cap; }
  double worst_value() const { return list.back().value; }

  void push(int depth, int v) {
    for (int b = 0; b < B; ++b)
      for (int mi = 0; mi < M; ++mi)
        partial[static_cast<std::size_t>(b) * M + mi] +=
            ctx.cm().size_cost(b, depth, inst.mult_min + mi, v);
    prefix.push_back(v);
    prefix_sz += v;
  }

  void pop(int depth) {
    const int v = prefix.back();
    prefix.pop_back();
    prefix_sz -= v;
    for (int b = 0; b < B; ++b)
      for (int mi = 0; mi < M; ++mi)
        partial[static_cast<std::size_t>(b) * M + mi] -=
            ctx.cm().size_cost(b, depth, inst.mult_min + mi, v);
  }

  // Admissible bound on the check value of any completion of the prefix.
  double bound(int depth) const {
    const long long rest = S - depth;
    const long long maxsz =
        prefix_sz + std::min(rest * inst.max_per_size,
                             static_cast<long long>(inst.max_total) - prefix_sz);
    const long long minsz =
        prefix_sz + std::max(rest * inst.min_per_size,
                             static_cast<long long>(inst.min_total) - prefix_sz);
    double sum_neg = 0.0;
    double min_b = std::numeric_limits<double>::infinity();
    for (int b = 0; b < B; ++b) {
      double lb = std::numeric_limits<double>::infinity();
      for (int mi = 0; mi < M; ++mi) {
        const int m = inst.mult_min + mi;
        const double lam =
            inst.cost_value(partial[static_cast<std::size_t>(b) * M + mi] +
                            ctx.cm().suffix_best(b, m, depth)) -
            ctx.duals->alpha[static_cast<std::size_t>(b)] -
            static_cast<double>(m) * (static_cast<double>(maxsz) * pos -
                                      static_cast<double>(minsz) * neg);
        lb = std::min(lb, lam);
      }
      sum_neg += std::min(0.0, lb);
      min_b = std::min(min_b, lb);
    }
    return sum_neg + std::max(0.0, min_b);
  }

  void leaf() {
    if (ctx.pool->find_lot(prefix) >= 0) return;  // pooled lots belong to scans 1 and 2
    const double pd = pos - neg;
    double check = 0.0;
    double min_b = std::numeric_limits<double>::infinity();
    std::vector<std::pair<int, int>> cols;
    for (int b = 0; b < B; ++b) {
      double v = std::numeric_limits<double>::infinity();
      int best_m = inst.mult_min;
      for (int mi = 0; mi < M; ++mi) {
        const int m = inst.mult_min + mi;
        const double c = inst.cost_value(partial[static_cast<std::size_t>(b) * M + mi]) -
                         ctx.duals->alpha[static_cast<std::size_t>(b)] -
                         static_cast<double>(m) * static_cast<double>(prefix_sz) * pd;
        if (c < v) {
          v = c;
          best_m = m;
        }
      }
      check += std::min(0.0, v);
      min_b = std::min(min_b, v);
      if (v < 0.0) cols.push_back({b, best_m});
    }
    check += std::max(0.0, min_b);
    cmin = std::min(cmin, check);
    if (!(check < thr - eps)) return;
    if (full()) {
      const PromisingSet& w = list.back();
      if (check > w.value || (check == w.value && !(prefix < w.lot))) return;
    }
    PromisingSet set{prefix, true, std::move(cols), check};
    auto cpos = std::upper_bound(list.begin(), list.end(), set,
                                 [](const PromisingSet& a, const PromisingSet& x) {
                                   return a.value < x.value ||
                                          (a.value == x.value && a.lot < x.lot);
                                 });
    list.insert(cpos, std::move(set));
    if (list.size() > cap) list.pop_back();
  }

  void recurse(int depth, int n_min, int n_max) {
    ++nodes;
    if (depth == S) {
      leaf();
      return;
    }
    const int lo = std::max(inst.min_per_size, n_min);
    const int hi = std::min(inst.max_per_size, n_max);
    if (lo > hi) return;
    std::vector<std::pair<double, int>> kids;
    kids.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (int v = lo; v <= hi; ++v) {
      push(depth, v);
      kids.emplace_back(bound(depth + 1), v);
      pop(depth);
    }
    std::sort(kids.begin(), kids.end());
    for (const auto& [bnd, v] : kids) {
      if (bnd >= thr) continue;
      if (full() && bnd > worst_value()) continue;  // equal bounds still explored
      push(depth, v);
      recurse(depth + 1, n_min + (inst.max_per_size - v), n_max - (v - inst.min_per_size));
      pop(depth);
    }
  }
};

}  // namespace pricing_detail

inline NewLotScan scan_new_lot_types(const PricingContext& ctx, int cap, double eps) {
  const Instance& inst = ctx.inst();
  pricing_detail::NewLotSearch search(ctx, static_cast<std::size_t>(cap), eps);
  const int S = inst.num_sizes();
  search.recurse(0, inst.min_total - (S - 1) * inst.max_per_size,
                 inst.max_total - (S - 1) * inst.min_per_size);
  NewLotScan out;
  out.sets = std::move(search.list);
  out.nodes = search.nodes;
  // subtrees cut off by the threshold only hide lot-types whose selector row
  // is satisfied, so the clamped minimum stays exact
  if (search.cmin < std::numeric_limits<double>::infinity())
    out.worst_violation = std::min(0.0, search.cmin + ctx.duals->gamma - ctx.duals->mu);
  return out;
}

// ---------------------------------------------------------------------------
// One pricing pass

inline PricingOutcome solve_pp(const PricingContext& ctx, const PricingParams& params) {
  if (params.max_lot_sets < 1 || params.max_new_lots < 1)
    throw Error(Error::Kind::InvalidInstance, "pricing caps must be >= 1");
  PricingOutcome out;
  PairScan t1 = scan_pooled_pairs(ctx, params.eps);
  for (double v : t1.branch_min)
    if (v < 0.0) out.cbar_star_sum += v;
  out.tier = 1;
  if (!t1.sets.empty()) {
    out.sets = std::move(t1.sets);
    return out;
  }
  LotScan t2 = scan_pooled_lots(ctx, params.max_lot_sets, params.eps);
  out.tier = 2;
  if (!t2.sets.empty()) {
    out.sets = std::move(t2.sets);
    return out;
  }
  NewLotScan t3 = scan_new_lot_types(ctx, params.max_new_lots, params.eps);
  out.tier = 3;
  out.complete = true;
  out.bb_nodes = t3.nodes;
  out.dbar_star = std::min(t2.worst_violation, t3.worst_violation);
  out.z_csb = ctx.duals->z_rmp + out.cbar_star_sum +
              static_cast<double>(ctx.inst().max_lot_types) * out.dbar_star;
  out.sets = std::move(t3.sets);
  return out;
}

}  // namespace ldp
