#pragma once

// Exponential reference formulation: one selector binary per applicable
// lot-type and one binary per (branch, lot-type, multiplicity), all columns
// materialized up front. Exact on anything small enough to build; everything
// else is refused with a size report, because the variable count grows as
// |B|·|L|·|M| + |L|.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ldp/backend.hpp"
#include "ldp/instance.hpp"
#include "ldp/linmodel.hpp"
#include "ldp/lotspace.hpp"

namespace ldp {

struct StaticDims {
  long long num_vars = 0;
  long long num_cons = 0;
};

namespace refmodel_detail {

inline long long checked_mul(long long a, long long b) {
  long long r = 0;
  if (__builtin_mul_overflow(a, b, &r))
    throw Error(Error::Kind::InvalidInstance, "static model dimensions overflow 64 bits");
  return r;
}

inline long long checked_add(long long a, long long b) {
  long long r = 0;
  if (__builtin_add_overflow(a, b, &r))
    throw Error(Error::Kind::InvalidInstance, "static model dimensions overflow 64 bits");
  return r;
}

inline void require_optimal(const MilpResult& r, const std::string& what) {
  if (r.status == MilpStatus::Infeasible)
    throw Error(Error::Kind::Inconsistent,
                what + ": no assignment meets the supply window and lot-type budget");
  if (r.status != MilpStatus::Optimal || !r.has_solution)
    throw Error(Error::Kind::Backend,
                what + " stopped before optimality (" + milp_status_name(r.status) + ")");
}

}  // namespace refmodel_detail

// num_vars = |B|·|L|·|M| + |L|; num_cons = |B| + |B|·|L| + 1 + 2 (assignment
// rows, pairing rows, the lot-type budget, both supply-window sides).
inline StaticDims static_dims(long long branches, long long lot_types, long long mults) {
  using refmodel_detail::checked_add;
  using refmodel_detail::checked_mul;
  const long long bl = checked_mul(branches, lot_types);
  StaticDims d;
  d.num_vars = checked_add(checked_mul(bl, mults), lot_types);
  d.num_cons = checked_add(checked_add(branches, bl), 3);
  return d;
}

inline StaticDims static_dims(const Instance& inst) {
  return static_dims(inst.num_branches(), LotSpace(inst).size(), inst.num_mults());
}

// Tighter than the smallest possible cost spacing at the supported decimal
// ranges, so a gap-closed incumbent is the exact optimum.
inline MilpOptions reference_milp_options() {
  MilpOptions o;
  o.rel_gap = 1e-9;
  return o;
}

struct StaticOptions {
  Count lot_cap = 100000;  // materialization refusal threshold on |L|
  MilpOptions milp = reference_milp_options();
};

struct StaticIlp {
  LinearModel model;
  std::vector<LotVec> lots;  // rank order; the selector of lots[l] is column l
  int branches = 0;
  int mults = 0;

  int y_index(Count l) const { return static_cast<int>(l); }
  int x_index(int b, Count l, int mi) const {
    const std::size_t L = lots.size();
    return static_cast<int>(L + (static_cast<std::size_t>(b) * L +
                                 static_cast<std::size_t>(l)) *
                                    static_cast<std::size_t>(mults) +
                            static_cast<std::size_t>(mi));
  }
};

// Same model restricted to an explicit list of lot-types (selector l pairs
// with lots[l]). The full build and the solver's restricted subproblems
// share this.
inline StaticIlp build_static_for(const Instance& inst, CostMode mode, std::vector<LotVec> lots) {
  if (lots.empty()) throw Error(Error::Kind::Internal, "restricted model needs lot-types");
  const Count L = static_cast<Count>(lots.size());
  const int B = inst.num_branches();
  const int M = inst.num_mults();
  StaticIlp out;
  out.branches = B;
  out.mults = M;
  out.lots = std::move(lots);

  CostModel cm(inst, mode);
  LinearModel& mdl = out.model;
  for (int b = 0; b < B; ++b) mdl.add_row(RowSense::Eq, 1.0);      // one pick per branch
  for (int b = 0; b < B; ++b)
    for (Count l = 0; l < L; ++l) mdl.add_row(RowSense::Le, 0.0);  // picks tied to selectors
  const int budget_row = mdl.add_row(RowSense::Le, static_cast<double>(inst.max_lot_types));
  const int lo_row = mdl.add_row(RowSense::Ge, static_cast<double>(inst.supply_min));
  const int hi_row = mdl.add_row(RowSense::Le, static_cast<double>(inst.supply_max));
  auto pair_row = [&](int b, Count l) {
    return B + b * static_cast<int>(L) + static_cast<int>(l);
  };

  for (Count l = 0; l < L; ++l) {
    std::vector<ColEntry> col;
    col.reserve(static_cast<std::size_t>(B) + 1);
    for (int b = 0; b < B; ++b) col.push_back({pair_row(b, l), -1.0});
    col.push_back({budget_row, 1.0});
    mdl.add_column(0.0, 1.0, 0.0, true, std::move(col));
  }
  for (int b = 0; b < B; ++b) {
    for (Count l = 0; l < L; ++l) {
      const LotVec& lot = out.lots[static_cast<std::size_t>(l)];
      const long long sz = lot_size(lot);
      for (int mi = 0; mi < M; ++mi) {
        const int m = inst.mult_min + mi;
        std::vector<ColEntry> col;
        col.reserve(4);
        col.push_back({b, 1.0});
        col.push_back({pair_row(b, l), 1.0});
        const double mp = static_cast<double>(m) * static_cast<double>(sz);
        if (mp != 0.0) {
          col.push_back({lo_row, mp});
          col.push_back({hi_row, mp});
        }
        mdl.add_column(0.0, 1.0, inst.cost_value(cm.lot_cost(b, lot, m)), true, std::move(col));
      }
    }
  }
  return out;
}

inline StaticIlp build_static(const Instance& inst, CostMode mode,
                              const StaticOptions& opt = {}) {
  validate_instance(inst);
  LotSpace space(inst);
  const Count L = space.size();
  if (L == 0) throw Error(Error::Kind::Inconsistent, "no applicable lot-type exists");
  if (L > opt.lot_cap) {
    const StaticDims d = static_dims(inst.num_branches(), L, inst.num_mults());
    throw Error(Error::Kind::Guard,
                "static model refused: " + std::to_string(L) +
                    " applicable lot-types exceed the materialization cap " +
                    std::to_string(opt.lot_cap) + " (full model: " + std::to_string(d.num_vars) +
                    " variables, " + std::to_string(d.num_cons) + " rows)");
  }
  std::vector<LotVec> lots;
  lots.reserve(static_cast<std::size_t>(L));
  for (Count r = 0; r < L; ++r) lots.push_back(space.unrank(r));
  return build_static_for(inst, mode, std::move(lots));
}

inline LinearModel build_static_ilp(const Instance& inst, CostMode mode,
                                    const StaticOptions& opt = {}) {
  return std::move(build_static(inst, mode, opt).model);
}

struct IlpSolveResult {
  Solution solution;
  CostInt cost_scaled = 0;
  double cost = 0.0;  // exact rescale of cost_scaled
  MilpResult milp;
};

// Decodes an assignment from a (near-)integral point of the model: per
// branch the largest x wins, so solver round-off on binaries is harmless.
inline Solution extract_static_solution(const Instance& inst, const StaticIlp& ilp,
                                        const std::vector<double>& x) {
  Solution sol;
  sol.per_branch.resize(static_cast<std::size_t>(ilp.branches));
  for (int b = 0; b < ilp.branches; ++b) {
    double best = -1.0;
    for (Count l = 0; l < static_cast<Count>(ilp.lots.size()); ++l) {
      for (int mi = 0; mi < ilp.mults; ++mi) {
        const double v = x[static_cast<std::size_t>(ilp.x_index(b, l, mi))];
        if (v > best) {
          best = v;
          sol.per_branch[static_cast<std::size_t>(b)] = {ilp.lots[static_cast<std::size_t>(l)],
                                                         inst.mult_min + mi};
        }
      }
    }
  }
  const SolutionCheck chk = check_solution(inst, sol);
  if (!chk.ok)
    throw Error(Error::Kind::Internal, "model solution does not decode to an assignment: " + chk.why);
  return sol;
}

inline IlpSolveResult solve_static(const Instance& inst, CostMode mode,
                                   const StaticOptions& opt = {},
                                   SolverBackend* backend = nullptr) {
  StaticIlp ilp = build_static(inst, mode, opt);
  SolverBackend& be = backend != nullptr ? *backend : backend_by_name();
  IlpSolveResult out;
  out.milp = be.solve_milp(ilp.model, opt.milp);
  refmodel_detail::require_optimal(out.milp, "static solve");
  out.solution = extract_static_solution(inst, ilp, out.milp.x);
  out.cost_scaled = solution_cost_scaled(inst, mode, out.solution).first;
  out.cost = inst.cost_value(out.cost_scaled);
  return out;
}

inline double static_lp_value(const Instance& inst, CostMode mode,
                              const StaticOptions& opt = {},
                              SolverBackend* backend = nullptr) {
  StaticIlp ilp = build_static(inst, mode, opt);
  const LpResult lp = solve_lp_relaxed(std::move(ilp.model), MethodHint::Automatic, backend);
  if (lp.status == LpStatus::Infeasible)
    throw Error(Error::Kind::Inconsistent, "static relaxation infeasible");
  if (!lp.ok())
    throw Error(Error::Kind::Backend,
                std::string("static relaxation stopped: ") + lp_status_name(lp.status));
  return lp.obj;
}

}  // namespace ldp
