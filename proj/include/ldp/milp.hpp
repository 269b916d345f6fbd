#pragma once

// Best-first branch and bound over the bounded simplex.
//
// Nodes store only their bound change relative to the parent; the shared
// working model is rewound and replayed when a node is activated, so the one
// simplex engine keeps warm-starting from the previous node's basis.
// Ties in the node queue break on creation order, which together with the
// deterministic LP makes every search reproducible (unless a wall-clock
// limit is set).
//
// Cutoff semantics: subtrees whose LP bound reaches the cutoff are pruned,
// so only solutions strictly below it are ever returned; when nothing
// survives, the status is Cutoff if pruning happened and Infeasible if the
// integer feasible set itself is empty.

#include <chrono>
#include <cmath>
#include <queue>
#include <utility>
#include <vector>

#include "ldp/simplex.hpp"

namespace ldp {

namespace milp_detail {

struct Node {
  int parent = -1;
  int var = -1;  // branched variable, -1 for the root
  double lo = 0.0, up = 0.0;
  double bound = -kInf;
};

}  // namespace milp_detail

inline MilpResult solve_milp(const LinearModel& model, MilpOptions opt = {},
                             SimplexOptions lp_opt = {}) {
  LinearModel work = model;
  std::vector<int> ivars;
  for (int j = 0; j < work.num_vars(); ++j)
    if (work.is_integer(j)) ivars.push_back(j);
  SimplexSolver solver(work, lp_opt);
  MilpResult out;

  auto lp_or_throw = [&](MethodHint hint) {
    LpResult lp = solver.solve(hint);
    if (lp.status == LpStatus::IterLimit)
      throw Error(Error::Kind::Backend, "simplex iteration limit reached");
    return lp;
  };

  // Pure LP: answer directly, honouring the cutoff.
  if (ivars.empty()) {
    LpResult lp = lp_or_throw(MethodHint::Automatic);
    out.nodes = 1;
    switch (lp.status) {
      case LpStatus::Optimal:
        if (lp.obj >= opt.cutoff) {
          out.status = MilpStatus::Cutoff;
          out.bound = lp.obj;
        } else {
          out.status = MilpStatus::Optimal;
          out.obj = lp.obj;
          out.x = lp.x;
          out.bound = lp.obj;
          out.has_solution = true;
        }
        return out;
      case LpStatus::Infeasible: out.status = MilpStatus::Infeasible; return out;
      case LpStatus::Unbounded: out.status = MilpStatus::Unbounded; return out;
      case LpStatus::IterLimit: break;
    }
    throw Error(Error::Kind::Backend, "unexpected LP status");
  }

  std::vector<double> root_lo(ivars.size()), root_up(ivars.size());
  for (std::size_t i = 0; i < ivars.size(); ++i) {
    root_lo[i] = work.lower(ivars[i]);
    root_up[i] = work.upper(ivars[i]);
  }
  std::vector<std::size_t> ipos(static_cast<std::size_t>(work.num_vars()),
                                ivars.size());
  for (std::size_t i = 0; i < ivars.size(); ++i)
    ipos[static_cast<std::size_t>(ivars[i])] = i;

  std::vector<milp_detail::Node> nodes;
  nodes.push_back({});  // root
  using QE = std::pair<double, int>;
  auto cmp = [](const QE& a, const QE& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second > b.second;
  };
  std::priority_queue<QE, std::vector<QE>, decltype(cmp)> open(cmp);

  double incumbent = opt.cutoff;
  bool has_incumbent = false;
  std::vector<double> best_x;
  double prune_floor = kInf;
  bool pruned_any = false;

  auto gap_abs = [&]() { return opt.rel_gap * std::max(1.0, std::fabs(incumbent)); };
  auto prune_threshold = [&]() { return incumbent - std::max(gap_abs(), 1e-9); };

  // Rewinds integer bounds to the root and replays the branch path; a
  // crossed range means the node region is empty.
  auto apply_node = [&](int id) -> bool {
    for (std::size_t i = 0; i < ivars.size(); ++i)
      work.set_bounds(ivars[i], root_lo[i], root_up[i]);
    for (int cur = id; cur > 0; cur = nodes[static_cast<std::size_t>(cur)].parent) {
      const auto& nd = nodes[static_cast<std::size_t>(cur)];
      double lo = std::max(work.lower(nd.var), nd.lo);
      double up = std::min(work.upper(nd.var), nd.up);
      if (lo > up) return false;
      work.set_bounds(nd.var, lo, up);
    }
    return true;
  };

  // Most fractional integer variable, ties on the lowest id; -1 if integral.
  auto pick_branch_var = [&](const std::vector<double>& x) {
    int best = -1;
    double best_score = kInf;
    for (int j : ivars) {
      double v = x[static_cast<std::size_t>(j)];
      double f = v - std::floor(v);
      if (std::min(f, 1.0 - f) <= opt.int_tol) continue;
      double score = std::fabs(f - 0.5);
      if (score < best_score) {
        best_score = score;
        best = j;
      }
    }
    return best;
  };

  auto accept_incumbent = [&](const LpResult& lp) {
    if (lp.obj >= incumbent - 1e-12) return;
    incumbent = lp.obj;
    has_incumbent = true;
    best_x = lp.x;
    for (int j : ivars)
      best_x[static_cast<std::size_t>(j)] = std::round(best_x[static_cast<std::size_t>(j)]);
  };

  // Rounding dive from a fractional LP point; fixes one variable at a time
  // and keeps whatever integral point it reaches. Bounds are rewound by the
  // next apply_node call.
  auto dive = [&](LpResult lp) {
    for (int depth = 0; depth < 200; ++depth) {
      int j = pick_branch_var(lp.x);
      if (j < 0) {
        accept_incumbent(lp);
        return;
      }
      double r = std::round(lp.x[static_cast<std::size_t>(j)]);
      r = std::min(std::max(r, work.lower(j)), work.upper(j));
      work.set_bounds(j, r, r);
      lp = lp_or_throw(MethodHint::PrimalSimplex);
      ++out.nodes;
      if (lp.status != LpStatus::Optimal || lp.obj >= prune_threshold()) return;
    }
  };

  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration<double>(opt.time_limit_seconds);

  open.emplace(-kInf, 0);
  bool limit_hit = false;
  MilpStatus limit_status = MilpStatus::NodeLimit;
  double open_floor = kInf;  // min bound left in the queue on early exit

  while (!open.empty()) {
    auto [bnd, id] = open.top();
    {
      // everything left is within the gap of the incumbent: done
      double lower_left = std::min(bnd, prune_floor);
      if (has_incumbent && lower_left > -kInf &&
          incumbent - lower_left <= gap_abs()) {
        open_floor = lower_left;
        break;
      }
    }
    open.pop();
    if (bnd >= prune_threshold()) {
      prune_floor = std::min(prune_floor, bnd);
      pruned_any = true;
      continue;
    }
    if (opt.max_nodes >= 0 && out.nodes >= opt.max_nodes) {
      open_floor = std::min(bnd, open_floor);
      limit_hit = true;
      limit_status = MilpStatus::NodeLimit;
      break;
    }
    if (opt.time_limit_seconds > 0.0 && std::chrono::steady_clock::now() >= deadline) {
      open_floor = std::min(bnd, open_floor);
      limit_hit = true;
      limit_status = MilpStatus::TimeLimit;
      break;
    }

    if (!apply_node(id)) continue;
    LpResult lp = lp_or_throw(MethodHint::Automatic);
    ++out.nodes;
    if (lp.status == LpStatus::Infeasible) continue;
    if (lp.status == LpStatus::Unbounded) {
      if (id == 0) {
        out.status = MilpStatus::Unbounded;
        return out;
      }
      throw Error(Error::Kind::Backend, "LP unbounded below the root");
    }
    if (lp.obj >= prune_threshold()) {
      prune_floor = std::min(prune_floor, lp.obj);
      pruned_any = true;
      continue;
    }

    int bv = pick_branch_var(lp.x);
    if (bv < 0) {
      accept_incumbent(lp);
      continue;
    }
    if (id == 0) dive(lp);

    double v = lp.x[static_cast<std::size_t>(bv)];
    double fl = std::floor(v);
    std::size_t i = ipos[static_cast<std::size_t>(bv)];
    milp_detail::Node down{id, bv, root_lo[i], fl, lp.obj};
    milp_detail::Node up{id, bv, fl + 1.0, root_up[i], lp.obj};
    bool down_first = (v - fl) <= 0.5;
    for (int round = 0; round < 2; ++round) {
      const auto& child = (round == 0) == down_first ? down : up;
      nodes.push_back(child);
      open.emplace(child.bound, static_cast<int>(nodes.size()) - 1);
    }
  }

  double lower = std::min(prune_floor, open_floor);
  if (has_incumbent) {
    out.obj = incumbent;
    out.x = std::move(best_x);
    out.has_solution = true;
    out.bound = std::min(lower, incumbent);
    out.status = limit_hit ? limit_status : MilpStatus::Optimal;
  } else {
    out.bound = lower == kInf ? (incumbent < kInf ? incumbent : kInf) : lower;
    if (limit_hit)
      out.status = limit_status;
    else
      out.status = pruned_any ? MilpStatus::Cutoff : MilpStatus::Infeasible;
  }
  return out;
}

}  // namespace ldp
