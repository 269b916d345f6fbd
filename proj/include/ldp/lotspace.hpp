#pragma once

// Lot-type space combinatorics: counting, lexicographic ranking, and the
// depth-first search for each branch's locally best lot-types.
//
// The search fixes components one size at a time. A partial lot-type with
// the first j components fixed admits a completion iff the next component n
// stays inside the running window
//   n_min = min_total - prefix - (S-j-1)*max_per_size
//   n_max = max_total - prefix - (S-j-1)*min_per_size
// intersected with [min_per_size, max_per_size]. The completion bound
// lambda(prefix, m) = partial cost + sum over open sizes of the single-size
// minimum is a lower bound on the cost of any completion at multiplicity m;
// it is exact once the prefix is complete.

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ldp/instance.hpp"

namespace ldp {

using Count = std::int64_t;

class LotSpace {
 public:
  explicit LotSpace(const Instance& inst)
      : S_(inst.num_sizes()),
        lo_(inst.min_per_size),
        hi_(inst.max_per_size),
        tlo_(inst.min_total),
        thi_(inst.max_total) {
    build();
  }

  LotSpace(int sizes, int min_per_size, int max_per_size, int min_total, int max_total)
      : S_(sizes), lo_(min_per_size), hi_(max_per_size), tlo_(min_total), thi_(max_total) {
    build();
  }

  int sizes() const { return S_; }

  // |L|: number of applicable lot-types.
  Count size() const { return count_from(0, 0); }

  bool contains(const LotVec& lot) const {
    if (static_cast<int>(lot.size()) != S_) return false;
    long long total = 0;
    for (int v : lot) {
      if (v < lo_ || v > hi_) return false;
      total += v;
    }
    return total >= tlo_ && total <= thi_;
  }

  // Lexicographic 0-based rank among applicable lot-types.
  Count rank(const LotVec& lot) const {
    if (!contains(lot)) throw Error(Error::Kind::InvalidInstance, "lot-type not applicable");
    Count r = 0;
    int prefix = 0;
    for (int j = 0; j < S_; ++j) {
      for (int v = lo_; v < lot[j]; ++v) r += count_from(j + 1, prefix + v);
      prefix += lot[j];
    }
    return r;
  }

  LotVec unrank(Count r) const {
    if (r < 0 || r >= size())
      throw Error(Error::Kind::InvalidInstance, "lot-type rank out of range");
    LotVec lot(S_);
    int prefix = 0;
    for (int j = 0; j < S_; ++j) {
      for (int v = lo_; v <= hi_; ++v) {
        const Count c = count_from(j + 1, prefix + v);
        if (r < c) {
          lot[j] = v;
          prefix += v;
          break;
        }
        r -= c;
      }
    }
    return lot;
  }

 private:
  void build() {
    if (S_ < 1 || lo_ < 0 || hi_ < lo_ || tlo_ < 0 || thi_ < tlo_)
      throw Error(Error::Kind::InvalidInstance, "bad lot-type parameters");
    // counts_[j] holds, for each feasible prefix sum at depth j, the number
    // of completions of sizes j..S-1 landing in the cardinality window.
    counts_.assign(S_ + 1, {});
    offsets_.assign(S_ + 1, 0);
    for (int j = S_; j >= 0; --j) {
      const int smin = j * lo_;  // attainable prefix-sum range at depth j
      const int smax = j * hi_;
      offsets_[j] = smin;
      counts_[j].assign(smax - smin + 1, 0);
      for (int sum = smin; sum <= smax; ++sum) {
        Count total = 0;
        if (j == S_) {
          total = (sum >= tlo_ && sum <= thi_) ? 1 : 0;
        } else {
          for (int v = lo_; v <= hi_; ++v) {
            const Count c = count_from(j + 1, sum + v);
            if (__builtin_add_overflow(total, c, &total))
              throw Error(Error::Kind::Guard, "lot-type space too large to count");
          }
        }
        counts_[j][sum - smin] = total;
      }
    }
  }

  Count count_from(int j, int sum) const {
    const int off = offsets_[j];
    if (sum < off || sum >= off + static_cast<int>(counts_[j].size())) return 0;
    return counts_[j][sum - off];
  }

  int S_, lo_, hi_, tlo_, thi_;
  std::vector<std::vector<Count>> counts_;
  std::vector<int> offsets_;
};

// ---------------------------------------------------------------------------
// Completion bounds

// lambda(b, prefix, m): lower bound on cost(b, l, m) over completions l of
// the prefix (first prefix.size() components fixed).
inline CostInt completion_bound(const CostModel& cm, int b, const LotVec& prefix, int m) {
  CostInt c = 0;
  for (std::size_t s = 0; s < prefix.size(); ++s)
    c += cm.size_cost(b, static_cast<int>(s), m, prefix[s]);
  return c + cm.suffix_best(b, m, static_cast<int>(prefix.size()));
}

// min over the whole multiplicity interval; not convex in m, so enumerate.
inline CostInt completion_bound_best(const CostModel& cm, int b, const LotVec& prefix) {
  const Instance& inst = cm.instance();
  CostInt best = completion_bound(cm, b, prefix, inst.mult_min);
  for (int m = inst.mult_min + 1; m <= inst.mult_max; ++m)
    best = std::min(best, completion_bound(cm, b, prefix, m));
  return best;
}

// ---------------------------------------------------------------------------
// Locally best lot-types per branch

struct LocalBest {
  LotVec lot;
  int mult = 1;      // locally optimal multiplicity (ties: smallest)
  CostInt cost = 0;  // cost(b, lot, mult)
};

using LocalBestList = std::vector<LocalBest>;  // sorted by (cost, lot lex)

struct SearchStats {
  long long nodes = 0;
  long long leaves = 0;
};

namespace lotspace_detail {

struct LocSearch {
  const CostModel& cm;
  const Instance& inst;
  int b;
  std::size_t K;
  SearchStats* stats;
  int S, M;
  std::vector<CostInt> partial;  // per multiplicity offset
  LotVec prefix;
  LocalBestList list;

  LocSearch(const CostModel& cm_, int b_, std::size_t K_, SearchStats* st)
      : cm(cm_), inst(cm_.instance()), b(b_), K(K_), stats(st) {
    S = inst.num_sizes();
    M = inst.num_mults();
    partial.assign(M, 0);
  }

  bool full() const { return list.size() >= K; }

  CostInt worst_cost() const { return list.back().cost; }

  // keep K cheapest, ties resolved toward the lexicographically smaller lot
  void offer(LotVec lot, int mult, CostInt cost) {
    if (full()) {
      const auto& w = list.back();
      if (cost > w.cost || (cost == w.cost && !(lot < w.lot))) return;
    }
    LocalBest e{std::move(lot), mult, cost};
    auto pos = std::upper_bound(list.begin(), list.end(), e, [](const LocalBest& a, const LocalBest& x) {
      return a.cost < x.cost || (a.cost == x.cost && a.lot < x.lot);
    });
    list.insert(pos, std::move(e));
    if (list.size() > K) list.pop_back();
  }

  CostInt bound_with(int depth, int value) const {
    // lambda of prefix extended by `value` at `depth`, minimized over m
    CostInt best = std::numeric_limits<CostInt>::max();
    for (int mi = 0; mi < M; ++mi) {
      const int m = inst.mult_min + mi;
      const CostInt lb = partial[mi] + cm.size_cost(b, depth, m, value) + cm.suffix_best(b, m, depth + 1);
      best = std::min(best, lb);
    }
    return best;
  }

  void leaf() {
    if (stats) ++stats->leaves;
    CostInt best = partial[0];
    int best_m = inst.mult_min;
    for (int mi = 1; mi < M; ++mi) {
      if (partial[mi] < best) {
        best = partial[mi];
        best_m = inst.mult_min + mi;
      }
    }
    offer(prefix, best_m, best);
  }

  void recurse(int depth, int n_min, int n_max) {
    if (stats) ++stats->nodes;
    if (depth == S) {
      leaf();
      return;
    }
    const int lo = std::max(inst.min_per_size, n_min);
    const int hi = std::min(inst.max_per_size, n_max);
    if (lo > hi) return;
    // explore children cheapest-bound first
    std::vector<std::pair<CostInt, int>> kids;
    kids.reserve(hi - lo + 1);
    for (int v = lo; v <= hi; ++v) kids.emplace_back(bound_with(depth, v), v);
    std::sort(kids.begin(), kids.end());
    for (const auto& [bound, v] : kids) {
      if (full() && bound > worst_cost()) continue;  // equal bounds still explored
      prefix.push_back(v);
      for (int mi = 0; mi < M; ++mi)
        partial[mi] += cm.size_cost(b, depth, inst.mult_min + mi, v);
      recurse(depth + 1, n_min + (inst.max_per_size - v), n_max - (v - inst.min_per_size));
      for (int mi = 0; mi < M; ++mi)
        partial[mi] -= cm.size_cost(b, depth, inst.mult_min + mi, v);
      prefix.pop_back();
    }
  }
};

}  // namespace lotspace_detail

// The K cheapest applicable lot-types for branch b at their locally optimal
// multiplicities; identical to the brute-force K-cheapest set with cost ties
// resolved toward smaller lexicographic rank.
inline LocalBestList find_loc_best_lottypes(const CostModel& cm, int b, int K,
                                            SearchStats* stats = nullptr) {
  const Instance& inst = cm.instance();
  if (K < 1) throw Error(Error::Kind::InvalidInstance, "K must be >= 1");
  lotspace_detail::LocSearch search(cm, b, static_cast<std::size_t>(K), stats);
  const int S = inst.num_sizes();
  search.recurse(0, inst.min_total - (S - 1) * inst.max_per_size,
                 inst.max_total - (S - 1) * inst.min_per_size);
  return std::move(search.list);
}

// ---------------------------------------------------------------------------
// Branch-local scoring

struct ScoredLot {
  Count rank = 0;
  LotVec lot;
  std::int64_t score = 0;  // negative; smaller = better
};

struct ScoreTable {
  // sorted by (score, rank); every lot-type that made some branch's local
  // best list appears exactly once
  std::vector<ScoredLot> entries;

  const ScoredLot* find(Count rank) const {
    for (const auto& e : entries)
      if (e.rank == rank) return &e;
    return nullptr;
  }
};

struct GlbResult {
  std::vector<ScoredLot> seed;              // the K2 best-scored lot-types
  ScoreTable table;
  std::vector<LocalBestList> per_branch;    // the K1 lists used for scoring
};

// Scores lot-types by aggregating per-branch local ranks: the j-th best
// lot-type of a branch contributes -10^(K1-j). The seed set holds the K2
// best-scored lot-types (ties toward smaller rank).
inline GlbResult generate_loc_best_lottypes(const CostModel& cm, const LotSpace& space, int K1,
                                            int K2) {
  if (K1 < 1 || K1 > 15)
    throw Error(Error::Kind::InvalidInstance, "K1 outside [1,15]");
  if (K2 < 1) throw Error(Error::Kind::InvalidInstance, "K2 must be >= 1");
  const Instance& inst = cm.instance();
  GlbResult out;
  out.per_branch.reserve(inst.num_branches());
  std::unordered_map<Count, std::int64_t> score;
  std::int64_t weight_top = 1;
  for (int j = 1; j < K1; ++j) weight_top *= 10;
  for (int b = 0; b < inst.num_branches(); ++b) {
    LocalBestList list = find_loc_best_lottypes(cm, b, K1);
    std::int64_t w = weight_top;
    for (const auto& e : list) {
      score[space.rank(e.lot)] -= w;
      w /= 10;
    }
    out.per_branch.push_back(std::move(list));
  }
  out.table.entries.reserve(score.size());
  for (const auto& [rank, sc] : score)
    out.table.entries.push_back({rank, space.unrank(rank), sc});
  std::sort(out.table.entries.begin(), out.table.entries.end(),
            [](const ScoredLot& a, const ScoredLot& b) {
              return a.score < b.score || (a.score == b.score && a.rank < b.rank);
            });
  const std::size_t take = std::min<std::size_t>(K2, out.table.entries.size());
  out.seed.assign(out.table.entries.begin(), out.table.entries.begin() + take);
  return out;
}

}  // namespace ldp
