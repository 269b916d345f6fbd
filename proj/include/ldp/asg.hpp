#pragma once

// The exact solver. A heuristic incumbent seeds a column pool; pricing grows
// the pool until no coordinated column set can undercut the pool relaxation;
// the pooled lot-types are then ground off as a restricted ILP (which may
// improve the incumbent); afterwards the cover row stops counting every
// pooled selector, so any cheaper design must price a fresh lot-type into
// the pool, and the cycle repeats. Complete pricing passes yield a lower
// bound on the (augmented) full relaxation; the run stops as soon as that
// bound meets the incumbent.
//
// Once the cover row is strengthened the relaxation bound can exceed the
// true optimum, but only when the optimum's lot-types were all ground off
// before, in which case the incumbent already carries their exact optimum.
// Reported lower bounds are therefore clamped to the incumbent.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ldp/backend.hpp"
#include "ldp/heuristics.hpp"
#include "ldp/instance.hpp"
#include "ldp/lotspace.hpp"
#include "ldp/master.hpp"
#include "ldp/pricing.hpp"
#include "ldp/static_model.hpp"

namespace ldp {

// One pricing pass as seen from the outside.
struct PassRecord {
  int pass = 0;      // 1-based over the whole run
  int phase = 0;     // 1-based grind round
  int tier = 0;      // deepest pricing scan that ran
  int sets = 0;      // promising sets returned
  long long added_cols = 0;
  double z_rmp = 0.0;
  double z_csb = -kInf;    // complete passes only
  double z_lower = -kInf;  // clamped running lower bound
  double z_upper = kInf;   // incumbent value at the time of the pass
};

struct SolveStats {
  double z_upper = kInf;
  double z_lower = -kInf;      // clamped: never above the reported cost
  double z_lower_raw = -kInf;  // best shift bound as computed
  CostInt heuristic_cost_scaled = 0;
  int pricing_passes = 0;
  int cutting_phases = 0;
  long long x_columns = 0;  // final pool size
  int y_columns = 0;
  long long cols_pairs = 0;   // columns added by scan-1 passes
  long long cols_spread = 0;  // by scan-2 passes
  long long cols_fresh = 0;   // by scan-3 passes
  long long bb_nodes = 0;
  double sec_heuristic = 0.0;
  double sec_rmp = 0.0;
  double sec_pricing = 0.0;
  double sec_restricted = 0.0;
  double sec_total = 0.0;
  std::vector<PassRecord> passes;
};

struct AsgParams {
  int k1 = 3;   // locally best lot-types per branch (scoring and seeding)
  int k2 = 3;   // top-scored lot-types pooled for every branch
  int k3 = 0;   // extra multiplicities around pooled multiplicity intervals
  int k4 = 10;  // cap on pooled-lot column sets per pricing pass
  int k5 = 3;   // cap on new lot-types per pricing pass
  double eps = 1e-9;
  // stop once z_upper <= z_lower + max(eps, rel_opt_gap * |z_upper|); matches
  // the restricted solves, which cannot certify tighter than their own gap
  double rel_opt_gap = 1e-4;
  SfaParams sfa;
  MilpOptions milp = reference_milp_options();
  std::function<void(const PassRecord&)> on_pass;
};

inline AsgParams asg_defaults() { return AsgParams{}; }

inline AsgParams asg_fewer_columns() {
  AsgParams p;
  p.k1 = 1;
  p.k2 = 3;
  p.k3 = 0;
  p.k4 = 1;
  p.k5 = 1;
  return p;
}

inline AsgParams asg_more_columns() {
  AsgParams p;
  p.k1 = 10;
  p.k2 = 5;
  p.k3 = 2;
  p.k4 = std::numeric_limits<int>::max();
  p.k5 = 10;
  return p;
}

inline AsgParams asg_preset(const std::string& name) {
  if (name == "default") return asg_defaults();
  if (name == "fewer") return asg_fewer_columns();
  if (name == "more") return asg_more_columns();
  throw Error(Error::Kind::InvalidInstance, "unknown parameter preset: " + name);
}

struct AsgResult {
  Solution solution;
  CostInt cost_scaled = 0;
  double cost = 0.0;
  SolveStats stats;
};

inline AsgResult asg_solve(const Instance& inst, CostMode mode, const AsgParams& params = {},
                           SolverBackend* backend = nullptr) {
  const std::clock_t t_start = std::clock();
  auto tick = [](std::clock_t from) {
    return static_cast<double>(std::clock() - from) / CLOCKS_PER_SEC;
  };
  if (params.k2 < 1 || params.k3 < 0 || params.k4 < 1 || params.k5 < 1)
    throw Error(Error::Kind::InvalidInstance, "column caps must be positive (k3 may be zero)");
  require_consistent(inst);

  SolveStats stats;
  CostModel cm(inst, mode);
  LotSpace space(inst);
  GlbResult glb = generate_loc_best_lottypes(cm, space, params.k1, params.k2);

  std::clock_t t0 = std::clock();
  SfaResult heur = sfa(inst, mode, glb, params.sfa);
  stats.sec_heuristic = tick(t0);
  Solution incumbent = std::move(heur.solution);
  CostInt inc_scaled = heur.cost_scaled;
  {
    const SolutionCheck chk = check_solution(inst, incumbent);
    if (!chk.ok) throw Error(Error::Kind::Internal, "heuristic produced an invalid seed: " + chk.why);
  }
  stats.heuristic_cost_scaled = inc_scaled;
  double z_upper = inst.cost_value(inc_scaled);

  ColumnPool pool(inst, mode, z_upper + 1.0, backend);
  init_rmp(pool, glb, incumbent, params.k3);

  PricingParams pp;
  pp.max_lot_sets = params.k4;
  pp.max_new_lots = params.k5;
  pp.eps = params.eps;

  double z_lower_raw = -kInf;
  auto tol = [&]() { return std::max(params.eps, params.rel_opt_gap * std::fabs(z_upper)); };
  auto clamped_lower = [&]() { return std::min(z_lower_raw, z_upper); };

  auto finish = [&]() {
    AsgResult out;
    out.solution = std::move(incumbent);
    auto [cost, pieces] = solution_cost_scaled(inst, mode, out.solution);
    (void)pieces;
    if (cost != inc_scaled)
      throw Error(Error::Kind::Internal, "incumbent cost drifted during the solve");
    out.cost_scaled = inc_scaled;
    out.cost = inst.cost_value(inc_scaled);
    stats.z_upper = z_upper;
    stats.z_lower_raw = z_lower_raw;
    stats.z_lower = clamped_lower();
    stats.x_columns = pool.x_columns();
    stats.y_columns = pool.y_columns();
    stats.sec_total = tick(t_start);
    out.stats = std::move(stats);
    return out;
  };

  MethodHint hint = MethodHint::PrimalSimplex;
  int phase = 1;
  while (true) {
    // pricing: grow the pool until its relaxation prices out
    while (true) {
      t0 = std::clock();
      const LpResult lp = pool.solve(hint);
      stats.sec_rmp += tick(t0);
      hint = MethodHint::PrimalSimplex;
      const DualSolution duals = pool.extract_duals(lp);

      t0 = std::clock();
      PricingContext ctx{&pool, &duals};
      const PricingOutcome pr = solve_pp(ctx, pp);
      stats.sec_pricing += tick(t0);
      ++stats.pricing_passes;
      stats.bb_nodes += pr.bb_nodes;
      if (pr.complete && pr.z_csb > z_lower_raw) z_lower_raw = pr.z_csb;

      const bool done = z_upper <= z_lower_raw + tol();
      long long added = 0;
      if (!done) {
        for (const PromisingSet& set : pr.sets) {
          const int id = pool.add_lot(set.lot);
          for (const auto& [b, m] : set.cols)
            if (pool.add_assignment(id, b, m)) ++added;
        }
        if (pr.tier == 1) stats.cols_pairs += added;
        if (pr.tier == 2) stats.cols_spread += added;
        if (pr.tier == 3) stats.cols_fresh += added;
      }

      PassRecord rec;
      rec.pass = stats.pricing_passes;
      rec.phase = phase;
      rec.tier = pr.tier;
      rec.sets = static_cast<int>(pr.sets.size());
      rec.added_cols = added;
      rec.z_rmp = duals.z_rmp;
      rec.z_csb = pr.complete ? pr.z_csb : -kInf;
      rec.z_lower = clamped_lower();
      rec.z_upper = z_upper;
      stats.passes.push_back(rec);
      if (params.on_pass) params.on_pass(rec);

      if (done) return finish();
      // a pass whose sets all collapse to pooled columns cannot make
      // progress; treat it like an empty one
      if (pr.sets.empty() || added == 0) break;
    }

    // cutting: grind the pooled lot-types off as an exact restricted ILP
    t0 = std::clock();
    const RestrictedSolve rs = solve_restricted(inst, mode, pool.lot_list(), z_upper + params.eps,
                                                params.milp, &pool.backend());
    stats.sec_restricted += tick(t0);
    ++stats.cutting_phases;
    if (rs.found && rs.cost_scaled < inc_scaled) {
      incumbent = rs.solution;
      inc_scaled = rs.cost_scaled;
      z_upper = inst.cost_value(inc_scaled);
    }
    if (z_upper <= z_lower_raw + tol()) return finish();
    pool.strengthen_cover();
    hint = MethodHint::DualSimplex;
    ++phase;
  }
}

}  // namespace ldp
