#pragma once

// Brute-force ground truth for tiny instances. Every subset of at most k
// applicable lot-types is enumerated (smaller subsets first, lexicographic
// rank order within a size); for each subset a dynamic program walks the
// branches with state = pieces delivered so far and transition = one
// (lot-type, multiplicity) pick for the current branch. Final states are
// filtered to the supply window. Costs stay exact scaled integers end to end.
//
// This exists to check the real solvers, not to solve anything production
// sized; the limits below refuse instances where plain enumeration would stop
// being obviously correct and fast.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ldp/instance.hpp"
#include "ldp/lotspace.hpp"

namespace ldp {

struct OracleLimits {
  Count max_space = 200;  // applicable lot-types
  int max_branches = 12;
  int max_k = 3;
};

struct OracleResult {
  Solution solution;
  CostInt cost_scaled = 0;
  double cost = 0.0;      // cost_scaled in demand units
  long long subsets = 0;  // number of DP runs
};

inline OracleResult oracle_solve(const Instance& inst, CostMode mode,
                                 const OracleLimits& limits = {}) {
  validate_instance(inst);
  LotSpace space(inst);
  const Count L = space.size();
  if (L == 0) throw Error(Error::Kind::Inconsistent, "no applicable lot-type exists");
  if (L > limits.max_space)
    throw Error(Error::Kind::Guard, "oracle refused: " + std::to_string(L) +
                                        " applicable lot-types exceed the limit " +
                                        std::to_string(limits.max_space));
  const int B = inst.num_branches();
  if (B > limits.max_branches)
    throw Error(Error::Kind::Guard, "oracle refused: " + std::to_string(B) +
                                        " branches exceed the limit " +
                                        std::to_string(limits.max_branches));
  if (inst.max_lot_types > limits.max_k)
    throw Error(Error::Kind::Guard, "oracle refused: lot-type budget " +
                                        std::to_string(inst.max_lot_types) +
                                        " exceeds the limit " + std::to_string(limits.max_k));

  const int M = inst.num_mults();
  const int k = static_cast<int>(std::min<Count>(inst.max_lot_types, L));

  std::vector<LotVec> lots;
  std::vector<long long> pieces;  // |l| per lot
  lots.reserve(static_cast<std::size_t>(L));
  pieces.reserve(static_cast<std::size_t>(L));
  for (Count r = 0; r < L; ++r) {
    lots.push_back(space.unrank(r));
    pieces.push_back(lot_size(lots.back()));
  }

  CostModel cm(inst, mode);
  std::vector<std::vector<CostInt>> cost(static_cast<std::size_t>(B));
  for (int b = 0; b < B; ++b) {
    auto& row = cost[static_cast<std::size_t>(b)];
    row.resize(static_cast<std::size_t>(L) * M);
    for (Count j = 0; j < L; ++j)
      for (int mi = 0; mi < M; ++mi)
        row[static_cast<std::size_t>(j) * M + mi] =
            cm.lot_cost(b, lots[static_cast<std::size_t>(j)], inst.mult_min + mi);
  }

  // Piece totals beyond every assignment's reach are unreachable; the DP axis
  // only needs to span up to the smaller of reach and window cap.
  const long long reach = static_cast<long long>(B) * inst.mult_max * inst.max_total;
  const long long hi = std::min<long long>(inst.supply_max, reach);
  const long long lo = inst.supply_min;
  if (lo > hi)
    throw Error(Error::Kind::Inconsistent,
                "supply window lies outside every assignment's piece range");

  constexpr CostInt kNoCost = std::numeric_limits<CostInt>::max();
  const std::size_t W = static_cast<std::size_t>(hi) + 1;
  std::vector<CostInt> dp(W), ndp(W);
  std::vector<std::vector<int>> pick(static_cast<std::size_t>(B), std::vector<int>(W, -1));

  OracleResult out;
  out.cost_scaled = kNoCost;

  std::vector<Count> sel;
  auto run_dp = [&]() {
    ++out.subsets;
    std::fill(dp.begin(), dp.end(), kNoCost);
    dp[0] = 0;
    for (int b = 0; b < B; ++b) {
      std::fill(ndp.begin(), ndp.end(), kNoCost);
      auto& ch = pick[static_cast<std::size_t>(b)];
      const auto& row = cost[static_cast<std::size_t>(b)];
      for (std::size_t p = 0; p < W; ++p) {
        if (dp[p] == kNoCost) continue;
        for (Count j : sel) {
          for (int mi = 0; mi < M; ++mi) {
            const long long np =
                static_cast<long long>(p) +
                static_cast<long long>(inst.mult_min + mi) * pieces[static_cast<std::size_t>(j)];
            if (np > hi) break;  // pieces grow with the multiplicity
            const CostInt c = dp[p] + row[static_cast<std::size_t>(j) * M + mi];
            CostInt& slot = ndp[static_cast<std::size_t>(np)];
            if (c < slot) {
              slot = c;
              ch[static_cast<std::size_t>(np)] = static_cast<int>(j) * M + mi;
            }
          }
        }
      }
      dp.swap(ndp);
    }
    for (long long p = lo; p <= hi; ++p) {
      // strict improvement only: the first subset reaching the optimum wins,
      // so reported solutions never carry lot-types no branch uses (any such
      // subset repeats the cost of one of its sub-subsets enumerated earlier)
      if (dp[static_cast<std::size_t>(p)] >= out.cost_scaled) continue;
      out.cost_scaled = dp[static_cast<std::size_t>(p)];
      // rebuild the path right away; pick[] is overwritten by the next subset
      out.solution.per_branch.assign(static_cast<std::size_t>(B), {});
      long long q = p;
      for (int b = B - 1; b >= 0; --b) {
        const int code = pick[static_cast<std::size_t>(b)][static_cast<std::size_t>(q)];
        const Count j = code / M;
        const int m = inst.mult_min + code % M;
        out.solution.per_branch[static_cast<std::size_t>(b)] = {lots[static_cast<std::size_t>(j)], m};
        q -= static_cast<long long>(m) * pieces[static_cast<std::size_t>(j)];
      }
    }
  };

  for (int u = 1; u <= k; ++u) {
    sel.assign(static_cast<std::size_t>(u), 0);
    for (int i = 0; i < u; ++i) sel[static_cast<std::size_t>(i)] = i;
    while (true) {
      run_dp();
      int i = u - 1;
      while (i >= 0 && sel[static_cast<std::size_t>(i)] == L - u + i) --i;
      if (i < 0) break;
      ++sel[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < u; ++j)
        sel[static_cast<std::size_t>(j)] = sel[static_cast<std::size_t>(j - 1)] + 1;
    }
  }

  if (out.cost_scaled == kNoCost)
    throw Error(Error::Kind::Inconsistent, "no assignment meets the supply window");
  const SolutionCheck chk = check_solution(inst, out.solution);
  if (!chk.ok)
    throw Error(Error::Kind::Internal, "oracle produced an invalid solution: " + chk.why);
  out.cost = inst.cost_value(out.cost_scaled);
  return out;
}

}  // namespace ldp
