#pragma once

// Slot-indexed compact reference model. k slots carry integer lot-type
// vectors l_{i,s}; binaries x_{b,i,m} give each branch exactly one slot and
// multiplicity; per-cell supplies v_{b,s,i,m} = l_{i,s}·x_{b,i,m} are
// linearized with big-M = max_per_size; deviation variables collect
// |demand - supply| per (scenario, branch, size) and enter the objective
// with the scenario weight. Consecutive slots are forced into strictly
// decreasing lexicographic order, either by positional weights (base
// t = max_c - min_c + 1; exact only while t^|S| stays below 2^53 because the
// weights live in doubles) or by the auxiliary-binary variant that marks the
// first strictly decreasing position.
//
// Good for cross-checks only: the relaxation is weak (LP value zero whenever
// the per-cell demands are all coverable), so branch and bound on it does
// not scale.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ldp/backend.hpp"
#include "ldp/instance.hpp"
#include "ldp/linmodel.hpp"
#include "ldp/lotspace.hpp"
#include "ldp/static_model.hpp"

namespace ldp {

struct CompactOptions {
  // adds the direct x-based deviation rows on top of the v-based ones (valid
  // inequalities either way, so the optimum is unchanged)
  bool x_deviation_rows = false;
  // slot ordering via first-decrease binaries instead of positional weights
  bool stable_symmetry = false;
  MilpOptions milp = reference_milp_options();
};

struct CompactIlp {
  LinearModel model;
  int branches = 0, sizes = 0, mults = 0, slots = 0;
  int mult_min = 1;
  long long t = 0;  // ordering base
  bool stable_symmetry = false;
  std::vector<int> scenario_ids;  // scenarios priced into the objective
  std::vector<double> weights;    // matching objective weights

  // column blocks, in order: x, l, v, delta, then ordering binaries if any
  int x0 = 0, l0 = 0, v0 = 0, d0 = 0, z0 = 0;

  int x_index(int b, int i, int mi) const { return x0 + (b * slots + i) * mults + mi; }
  int l_index(int i, int s) const { return l0 + i * sizes + s; }
  int v_index(int b, int s, int i, int mi) const {
    return v0 + ((b * sizes + s) * slots + i) * mults + mi;
  }
  int d_index(int a, int b, int s) const { return d0 + (a * branches + b) * sizes + s; }
  int z_index(int q, int s) const { return z0 + q * sizes + s; }
};

inline CompactIlp build_compact_model(const Instance& inst, CostMode mode,
                                      const CompactOptions& opt = {}) {
  validate_instance(inst);
  const Count space = LotSpace(inst).size();
  if (space == 0) throw Error(Error::Kind::Inconsistent, "no applicable lot-type exists");

  CompactIlp out;
  out.branches = inst.num_branches();
  out.sizes = inst.num_sizes();
  out.mults = inst.num_mults();
  out.mult_min = inst.mult_min;
  // strict ordering needs pairwise distinct slot vectors, so more slots than
  // applicable lot-types can never help
  out.slots = static_cast<int>(std::min<Count>(inst.max_lot_types, space));
  out.stable_symmetry = opt.stable_symmetry;
  out.t = static_cast<long long>(inst.max_per_size) - inst.min_per_size + 1;

  if (mode == CostMode::Nominal) {
    out.scenario_ids = {inst.nominal_scenario};
    out.weights = {1.0};
  } else {
    for (int a = 0; a < inst.num_scenarios(); ++a) {
      out.scenario_ids.push_back(a);
      out.weights.push_back(inst.probability(a));
    }
  }

  const int B = out.branches, S = out.sizes, M = out.mults, K = out.slots;
  const int A = static_cast<int>(out.scenario_ids.size());
  const int U = B * S * K * M;
  const double cap = static_cast<double>(inst.max_per_size);
  auto cell = [&](int b, int s, int i, int mi) { return ((b * S + s) * K + i) * M + mi; };
  auto dval = [&](int a, int b, int s) {
    return inst.demand_value(out.scenario_ids[static_cast<std::size_t>(a)], b, s);
  };

  std::vector<double> tpow;  // tpow[s] = t^(S-1-s)
  if (K > 1 && !opt.stable_symmetry) {
    long double p = 1.0L;
    for (int e = 0; e < S; ++e) {
      p *= static_cast<long double>(out.t);
      if (p > 9007199254740992.0L)
        throw Error(Error::Kind::Guard,
                    "slot ordering weights overflow: base " + std::to_string(out.t) +
                        " raised to " + std::to_string(S) +
                        " exceeds 2^53; enable the stable ordering variant");
    }
    tpow.resize(static_cast<std::size_t>(S));
    double w = 1.0;
    for (int s = S - 1; s >= 0; --s) {
      tpow[static_cast<std::size_t>(s)] = w;
      w *= static_cast<double>(out.t);
    }
  }

  LinearModel& mdl = out.model;
  for (int b = 0; b < B; ++b) mdl.add_row(RowSense::Eq, 1.0);          // one pick per branch
  const int r_vx0 = mdl.num_rows();                                    // v <= cap·x
  for (int u = 0; u < U; ++u) mdl.add_row(RowSense::Le, 0.0);
  const int r_vl0 = mdl.num_rows();                                    // v <= l
  for (int u = 0; u < U; ++u) mdl.add_row(RowSense::Le, 0.0);
  const int r_vb0 = mdl.num_rows();                                    // v >= l - cap·(1-x)
  for (int u = 0; u < U; ++u) mdl.add_row(RowSense::Ge, -cap);
  const int r_lo = mdl.add_row(RowSense::Ge, static_cast<double>(inst.supply_min));
  const int r_hi = mdl.add_row(RowSense::Le, static_cast<double>(inst.supply_max));
  const int r_tot0 = mdl.num_rows();                                   // slot cardinality window
  for (int i = 0; i < K; ++i) {
    mdl.add_row(RowSense::Ge, static_cast<double>(inst.min_total));
    mdl.add_row(RowSense::Le, static_cast<double>(inst.max_total));
  }
  const int r_dev0 = mdl.num_rows();  // deviation >= each side of demand - supply
  for (int a = 0; a < A; ++a)
    for (int b = 0; b < B; ++b)
      for (int s = 0; s < S; ++s) {
        mdl.add_row(RowSense::Ge, dval(a, b, s));
        mdl.add_row(RowSense::Ge, -dval(a, b, s));
      }
  auto dev_row = [&](int a, int b, int s) { return r_dev0 + 2 * ((a * B + b) * S + s); };
  int r_ord0 = -1, r_zsum0 = -1, r_zge0 = -1, r_zle0 = -1;
  if (K > 1) {
    if (!opt.stable_symmetry) {
      r_ord0 = mdl.num_rows();
      for (int q = 0; q + 1 < K; ++q) mdl.add_row(RowSense::Ge, 1.0);
    } else {
      r_zsum0 = mdl.num_rows();
      for (int q = 0; q + 1 < K; ++q) mdl.add_row(RowSense::Eq, 1.0);
      r_zge0 = mdl.num_rows();
      for (int q = 0; q + 1 < K; ++q)
        for (int s = 0; s < S; ++s) mdl.add_row(RowSense::Ge, 0.0);
      r_zle0 = mdl.num_rows();
      for (int q = 0; q + 1 < K; ++q)
        for (int s = 0; s < S; ++s) mdl.add_row(RowSense::Le, 0.0);
    }
  }
  int r_xdev0 = -1;
  if (opt.x_deviation_rows) {
    r_xdev0 = mdl.num_rows();
    for (int a = 0; a < A; ++a)
      for (int b = 0; b < B; ++b)
        for (int s = 0; s < S; ++s)
          for (int i = 0; i < K; ++i)
            for (int mi = 0; mi < M; ++mi) {
              const double m = static_cast<double>(inst.mult_min + mi);
              mdl.add_row(RowSense::Ge, 0.0);
              mdl.add_row(RowSense::Ge, -dval(a, b, s) - m * cap);
            }
  }
  auto xdev_row = [&](int a, int b, int s, int i, int mi) {
    return r_xdev0 + 2 * (a * U + cell(b, s, i, mi));
  };

  out.x0 = mdl.num_vars();
  for (int b = 0; b < B; ++b)
    for (int i = 0; i < K; ++i)
      for (int mi = 0; mi < M; ++mi) {
        std::vector<ColEntry> col;
        col.push_back({b, 1.0});
        for (int s = 0; s < S; ++s) {
          const int u = cell(b, s, i, mi);
          col.push_back({r_vx0 + u, -cap});
          col.push_back({r_vb0 + u, -cap});
          if (opt.x_deviation_rows)
            for (int a = 0; a < A; ++a) {
              const double m = static_cast<double>(inst.mult_min + mi);
              col.push_back({xdev_row(a, b, s, i, mi), -dval(a, b, s)});
              col.push_back({xdev_row(a, b, s, i, mi) + 1, -m * cap});
            }
        }
        mdl.add_column(0.0, 1.0, 0.0, true, std::move(col));
      }

  out.l0 = mdl.num_vars();
  for (int i = 0; i < K; ++i)
    for (int s = 0; s < S; ++s) {
      std::vector<ColEntry> col;
      for (int b = 0; b < B; ++b)
        for (int mi = 0; mi < M; ++mi) {
          const int u = cell(b, s, i, mi);
          col.push_back({r_vl0 + u, -1.0});
          col.push_back({r_vb0 + u, -1.0});
          if (opt.x_deviation_rows)
            for (int a = 0; a < A; ++a) {
              const double m = static_cast<double>(inst.mult_min + mi);
              col.push_back({xdev_row(a, b, s, i, mi), m});
              col.push_back({xdev_row(a, b, s, i, mi) + 1, -m});
            }
        }
      col.push_back({r_tot0 + 2 * i, 1.0});
      col.push_back({r_tot0 + 2 * i + 1, 1.0});
      if (K > 1 && !opt.stable_symmetry) {
        if (i + 1 < K) col.push_back({r_ord0 + i, tpow[static_cast<std::size_t>(s)]});
        if (i > 0) col.push_back({r_ord0 + i - 1, -tpow[static_cast<std::size_t>(s)]});
      } else if (K > 1) {
        if (i + 1 < K) {
          col.push_back({r_zge0 + i * S + s, 1.0});
          col.push_back({r_zle0 + i * S + s, 1.0});
        }
        if (i > 0) {
          col.push_back({r_zge0 + (i - 1) * S + s, -1.0});
          col.push_back({r_zle0 + (i - 1) * S + s, -1.0});
        }
      }
      mdl.add_column(static_cast<double>(inst.min_per_size),
                     static_cast<double>(inst.max_per_size), 0.0, true, std::move(col));
    }

  out.v0 = mdl.num_vars();
  for (int b = 0; b < B; ++b)
    for (int s = 0; s < S; ++s)
      for (int i = 0; i < K; ++i)
        for (int mi = 0; mi < M; ++mi) {
          const int u = cell(b, s, i, mi);
          const double m = static_cast<double>(inst.mult_min + mi);
          std::vector<ColEntry> col;
          col.reserve(static_cast<std::size_t>(5 + 2 * A));
          col.push_back({r_vx0 + u, 1.0});
          col.push_back({r_vl0 + u, 1.0});
          col.push_back({r_vb0 + u, 1.0});
          col.push_back({r_lo, m});
          col.push_back({r_hi, m});
          for (int a = 0; a < A; ++a) {
            col.push_back({dev_row(a, b, s), m});
            col.push_back({dev_row(a, b, s) + 1, -m});
          }
          mdl.add_column(0.0, cap, 0.0, false, std::move(col));
        }

  out.d0 = mdl.num_vars();
  for (int a = 0; a < A; ++a)
    for (int b = 0; b < B; ++b)
      for (int s = 0; s < S; ++s) {
        std::vector<ColEntry> col;
        col.push_back({dev_row(a, b, s), 1.0});
        col.push_back({dev_row(a, b, s) + 1, 1.0});
        if (opt.x_deviation_rows)
          for (int i = 0; i < K; ++i)
            for (int mi = 0; mi < M; ++mi) {
              col.push_back({xdev_row(a, b, s, i, mi), 1.0});
              col.push_back({xdev_row(a, b, s, i, mi) + 1, 1.0});
            }
        mdl.add_column(0.0, kInf, out.weights[static_cast<std::size_t>(a)], false,
                       std::move(col));
      }

  out.z0 = mdl.num_vars();
  if (K > 1 && opt.stable_symmetry) {
    const double span = static_cast<double>(out.t - 1);  // largest component gap
    for (int q = 0; q + 1 < K; ++q)
      for (int s = 0; s < S; ++s) {
        std::vector<ColEntry> col;
        col.push_back({r_zsum0 + q, 1.0});
        col.push_back({r_zge0 + q * S + s, -1.0});
        for (int s2 = s + 1; s2 < S; ++s2) col.push_back({r_zge0 + q * S + s2, span});
        for (int s2 = s; s2 < S; ++s2) col.push_back({r_zle0 + q * S + s2, -span});
        mdl.add_column(0.0, 1.0, 0.0, true, std::move(col));
      }
  }
  return out;
}

inline LinearModel build_compact(const Instance& inst, CostMode mode,
                                 const CompactOptions& opt = {}) {
  return std::move(build_compact_model(inst, mode, opt).model);
}

// Lifts a per-branch solution into a full variable vector of the compact
// model: its lot-types fill slots in decreasing lexicographic order, spare
// slots take the largest remaining applicable lot-types, and the v / delta /
// ordering variables follow from the picks. The point is feasible whenever
// the solution itself is, which makes it usable as a cross-check certificate
// or a warm start.
inline std::vector<double> compact_embedding(const CompactIlp& cil, const Instance& inst,
                                             const Solution& sol) {
  const int B = cil.branches, S = cil.sizes, K = cil.slots;
  if (static_cast<int>(sol.per_branch.size()) != B)
    throw Error(Error::Kind::InvalidInstance, "solution covers wrong number of branches");
  std::vector<LotVec> slots = used_lot_types(sol);
  if (static_cast<int>(slots.size()) > K)
    throw Error(Error::Kind::InvalidInstance,
                "solution uses more lot-types than the model has slots");
  LotSpace space(inst);
  for (Count r = space.size(); r-- > 0 && static_cast<int>(slots.size()) < K;) {
    LotVec cand = space.unrank(r);
    if (std::find(slots.begin(), slots.end(), cand) == slots.end())
      slots.push_back(std::move(cand));
  }
  if (static_cast<int>(slots.size()) < K)
    throw Error(Error::Kind::Internal, "not enough distinct lot-types to fill the slots");
  std::sort(slots.begin(), slots.end(), [](const LotVec& a, const LotVec& b) { return b < a; });

  std::vector<double> x(static_cast<std::size_t>(cil.model.num_vars()), 0.0);
  for (int i = 0; i < K; ++i)
    for (int s = 0; s < S; ++s)
      x[static_cast<std::size_t>(cil.l_index(i, s))] = slots[static_cast<std::size_t>(i)][s];
  for (int b = 0; b < B; ++b) {
    const Assignment& a = sol.per_branch[static_cast<std::size_t>(b)];
    const int i = static_cast<int>(std::find(slots.begin(), slots.end(), a.lot) - slots.begin());
    const int mi = a.mult - cil.mult_min;
    x[static_cast<std::size_t>(cil.x_index(b, i, mi))] = 1.0;
    for (int s = 0; s < S; ++s)
      x[static_cast<std::size_t>(cil.v_index(b, s, i, mi))] = a.lot[s];
  }
  for (int a = 0; a < static_cast<int>(cil.scenario_ids.size()); ++a)
    for (int b = 0; b < B; ++b) {
      const Assignment& pick = sol.per_branch[static_cast<std::size_t>(b)];
      for (int s = 0; s < S; ++s) {
        const double d = inst.demand_value(cil.scenario_ids[static_cast<std::size_t>(a)], b, s);
        x[static_cast<std::size_t>(cil.d_index(a, b, s))] =
            std::fabs(d - static_cast<double>(pick.mult) * pick.lot[s]);
      }
    }
  if (K > 1 && cil.stable_symmetry) {
    for (int q = 0; q + 1 < K; ++q) {
      int first = 0;
      while (slots[static_cast<std::size_t>(q)][first] ==
             slots[static_cast<std::size_t>(q + 1)][first])
        ++first;
      x[static_cast<std::size_t>(cil.z_index(q, first))] = 1.0;
    }
  }
  return x;
}

inline IlpSolveResult solve_compact(const Instance& inst, CostMode mode,
                                    const CompactOptions& opt = {},
                                    SolverBackend* backend = nullptr) {
  CompactIlp cil = build_compact_model(inst, mode, opt);
  SolverBackend& be = backend != nullptr ? *backend : backend_by_name();
  IlpSolveResult out;
  out.milp = be.solve_milp(cil.model, opt.milp);
  refmodel_detail::require_optimal(out.milp, "compact solve");

  out.solution.per_branch.resize(static_cast<std::size_t>(cil.branches));
  for (int b = 0; b < cil.branches; ++b) {
    double best = -1.0;
    int bi = 0, bmi = 0;
    for (int i = 0; i < cil.slots; ++i)
      for (int mi = 0; mi < cil.mults; ++mi) {
        const double v = out.milp.x[static_cast<std::size_t>(cil.x_index(b, i, mi))];
        if (v > best) {
          best = v;
          bi = i;
          bmi = mi;
        }
      }
    LotVec lot(static_cast<std::size_t>(cil.sizes));
    for (int s = 0; s < cil.sizes; ++s)
      lot[static_cast<std::size_t>(s)] = static_cast<int>(
          std::llround(out.milp.x[static_cast<std::size_t>(cil.l_index(bi, s))]));
    out.solution.per_branch[static_cast<std::size_t>(b)] = {std::move(lot),
                                                            cil.mult_min + bmi};
  }
  const SolutionCheck chk = check_solution(inst, out.solution);
  if (!chk.ok)
    throw Error(Error::Kind::Internal, "compact solve produced an invalid solution: " + chk.why);
  out.cost_scaled = solution_cost_scaled(inst, mode, out.solution).first;
  out.cost = inst.cost_value(out.cost_scaled);
  return out;
}

inline double compact_lp_value(const Instance& inst, CostMode mode,
                               const CompactOptions& opt = {},
                               SolverBackend* backend = nullptr) {
  CompactIlp cil = build_compact_model(inst, mode, opt);
  const LpResult lp = solve_lp_relaxed(std::move(cil.model), MethodHint::Automatic, backend);
  if (lp.status == LpStatus::Infeasible)
    throw Error(Error::Kind::Inconsistent, "compact relaxation infeasible");
  if (!lp.ok())
    throw Error(Error::Kind::Backend,
                std::string("compact relaxation stopped: ") + lp_status_name(lp.status));
  return lp.obj;
}

}  // namespace ldp
