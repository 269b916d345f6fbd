#pragma once

// Column pool for the branch-and-price solver. It keeps the restricted LP
// relaxation of the augmented assignment model: selector columns y_l for the
// pooled lot-types, assignment columns x_{b,l,m} for the pooled triples, and
// one penalized slack p that stands in for every lot-type the pool does not
// hold yet. Rows:
//
//   0 .. B-1   per-branch assignment   sum_{l,m} x_{b,l,m}  = 1      (alpha)
//   B          lot-type budget         -sum_l y_l          >= -k     (gamma)
//   B+1        cover                    sum_{l not yet cut} y_l + p >= 1 (mu)
//   B+2        supply, lower end        sum m|l| x          >= I_lo  (phi)
//   B+3        supply, upper end       -sum m|l| x          >= -I_hi (psi)
//   dynamic    reverse coupling         sum_{b,m} x - y_l   >= 0     (delta)
//   dynamic    pair coupling           -sum_m x + y_l       >= 0     (beta)
//
// All senses are >= (except the equalities), so every named dual is
// nonnegative at optimality and alpha is free. The reverse row of a lot-type
// is created with its selector; a pair row appears with the first assignment
// column of its (branch, lot-type) pair, which retroactively gives the
// selector a coefficient there.
//
// Columns carry no finite upper bounds: x <= 1 follows from its assignment
// row, y is capped by the budget and reverse rows, and the penalty keeps p
// at the cover shortfall. With the boxes gone, an optimal dual vector is
// always feasible for the unbounded-form dual (no negative reduced costs
// hiding at upper bounds), which the pricing bounds rely on.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ldp/backend.hpp"
#include "ldp/instance.hpp"
#include "ldp/linmodel.hpp"
#include "ldp/lotspace.hpp"
#include "ldp/static_model.hpp"

namespace ldp {

struct BranchCols {
  int branch = 0;
  int coupling_row = -1;
  std::vector<std::pair<int, int>> mults;  // (multiplicity, x column), sorted by m

  int find_mult(int m) const {
    for (const auto& [mm, var] : mults)
      if (mm == m) return var;
    return -1;
  }
};

struct PoolLot {
  LotVec lot;
  long long pieces = 0;  // |l|
  int y_var = -1;
  int reverse_row = -1;
  bool covered = false;                // dropped from the cover row's support
  std::vector<BranchCols> branches;    // sorted by branch id

  const BranchCols* find(int b) const {
    auto it = std::lower_bound(branches.begin(), branches.end(), b,
                               [](const BranchCols& c, int v) { return c.branch < v; });
    return it != branches.end() && it->branch == b ? &*it : nullptr;
  }
};

// Row duals of the solved pool relaxation, named after the rows they price.
// beta and delta live in `row`, addressed through the pool's row indices.
struct DualSolution {
  double z_rmp = 0.0;
  std::vector<double> alpha;  // per branch, free sign
  double gamma = 0.0;         // budget
  double mu = 0.0;            // cover
  double phi = 0.0;           // supply, lower end
  double psi = 0.0;           // supply, upper end
  std::vector<double> row;    // full dual vector

  double beta(const BranchCols& bc) const { return row[static_cast<std::size_t>(bc.coupling_row)]; }
  double delta(const PoolLot& pl) const { return row[static_cast<std::size_t>(pl.reverse_row)]; }
};

class ColumnPool {
 public:
  ColumnPool(const Instance& inst, CostMode mode, double slack_penalty,
             SolverBackend* backend = nullptr)
      : inst_(&inst),
        mode_(mode),
        cm_(inst, mode),
        backend_(backend != nullptr ? backend : &backend_by_name()),
        penalty_(slack_penalty) {
    validate_instance(inst);
    const int B = inst.num_branches();
    for (int b = 0; b < B; ++b) model_.add_row(RowSense::Eq, 1.0);
    budget_row_ = model_.add_row(RowSense::Ge, -static_cast<double>(inst.max_lot_types));
    cover_row_ = model_.add_row(RowSense::Ge, 1.0);
    supply_lo_row_ = model_.add_row(RowSense::Ge, static_cast<double>(inst.supply_min));
    supply_hi_row_ = model_.add_row(RowSense::Ge, -static_cast<double>(inst.supply_max));
    slack_var_ = model_.add_column(0.0, 1.0, penalty_, false, {{cover_row_, 1.0}}, "p");
  }

  ColumnPool(const ColumnPool&) = delete;
  ColumnPool& operator=(const ColumnPool&) = delete;

  // Selector column plus reverse row; no-op when the lot-type is pooled.
  int add_lot(const LotVec& lot) {
    auto it = index_.find(lot);
    if (it != index_.end()) return it->second;
    if (!is_applicable(*inst_, lot))
      throw Error(Error::Kind::Internal, "pooling a lot-type outside the design space");
    PoolLot pl;
    pl.lot = lot;
    pl.pieces = lot_size(lot);
    pl.reverse_row = model_.add_row(RowSense::Ge, 0.0);
    pl.y_var = model_.add_column(0.0, 1.0, 0.0, false,
                                 {{budget_row_, -1.0}, {cover_row_, 1.0}, {pl.reverse_row, -1.0}});
    const int id = static_cast<int>(lots_.size());
    lots_.push_back(std::move(pl));
    index_.emplace(lot, id);
    return id;
  }

  int find_lot(const LotVec& lot) const {
    auto it = index_.find(lot);
    return it != index_.end() ? it->second : -1;
  }

  // Assignment column; returns false when (b, l, m) is already pooled.
  bool add_assignment(int lot_id, int branch, int mult) {
    if (lot_id < 0 || lot_id >= static_cast<int>(lots_.size()))
      throw Error(Error::Kind::Internal, "assignment for a lot-type outside the pool");
    if (branch < 0 || branch >= inst_->num_branches())
      throw Error(Error::Kind::Internal, "assignment for an unknown branch");
    if (mult < inst_->mult_min || mult > inst_->mult_max)
      throw Error(Error::Kind::Internal, "assignment with an inadmissible multiplicity");
    PoolLot& pl = lots_[static_cast<std::size_t>(lot_id)];
    auto it = std::lower_bound(pl.branches.begin(), pl.branches.end(), branch,
                               [](const BranchCols& c, int v) { return c.branch < v; });
    if (it == pl.branches.end() || it->branch != branch) {
      BranchCols bc;
      bc.branch = branch;
      bc.coupling_row = model_.add_row(RowSense::Ge, 0.0);
      model_.set_coef(bc.coupling_row, pl.y_var, 1.0);
      it = pl.branches.insert(it, std::move(bc));
    }
    if (it->find_mult(mult) >= 0) return false;
    std::vector<ColEntry> col;
    col.reserve(5);
    col.push_back({branch, 1.0});
    const double mp = static_cast<double>(mult) * static_cast<double>(pl.pieces);
    if (mp != 0.0) {
      col.push_back({supply_lo_row_, mp});
      col.push_back({supply_hi_row_, -mp});
    }
    col.push_back({pl.reverse_row, 1.0});
    col.push_back({it->coupling_row, -1.0});
    std::sort(col.begin(), col.end(), [](const ColEntry& a, const ColEntry& b) { return a.row < b.row; });
    const double cost = inst_->cost_value(cm_.lot_cost(branch, pl.lot, mult));
    const int var = model_.add_column(0.0, 1.0, cost, false, std::move(col));
    auto mit = std::lower_bound(it->mults.begin(), it->mults.end(), mult,
                                [](const std::pair<int, int>& p, int v) { return p.first < v; });
    it->mults.insert(mit, {mult, var});
    ++x_count_;
    return true;
  }

  // Removes every currently pooled lot-type from the cover row's support.
  // Afterwards only later additions (or the slack) can satisfy it, which
  // forces any cheaper solution to leave the already-ground subproblem.
  // Monotone and idempotent.
  void strengthen_cover() {
    for (PoolLot& pl : lots_) {
      if (pl.covered) continue;
      model_.set_coef(cover_row_, pl.y_var, 0.0);
      pl.covered = true;
      ++covered_;
    }
  }

  LpResult solve(MethodHint hint = MethodHint::PrimalSimplex) {
    if (!engine_) engine_ = backend_->attach(model_);
    LpResult r = engine_->solve(hint);
    if (r.status == LpStatus::Infeasible)
      throw Error(Error::Kind::Internal,
                  "pool relaxation infeasible; some branch has no assignment column");
    if (!r.ok())
      throw Error(Error::Kind::Backend,
                  std::string("pool relaxation stopped: ") + lp_status_name(r.status));
    return r;
  }

  DualSolution extract_duals(const LpResult& lp) const {
    DualSolution d;
    d.z_rmp = lp.obj;
    const int B = inst_->num_branches();
    d.alpha.assign(lp.duals.begin(), lp.duals.begin() + B);
    d.gamma = lp.duals[static_cast<std::size_t>(budget_row_)];
    d.mu = lp.duals[static_cast<std::size_t>(cover_row_)];
    d.phi = lp.duals[static_cast<std::size_t>(supply_lo_row_)];
    d.psi = lp.duals[static_cast<std::size_t>(supply_hi_row_)];
    d.row = lp.duals;
    return d;
  }

  const Instance& instance() const { return *inst_; }
  CostMode cost_mode() const { return mode_; }
  const CostModel& cost_model() const { return cm_; }
  const std::vector<PoolLot>& lots() const { return lots_; }
  const LinearModel& model() const { return model_; }
  LinearModel& mutable_model() { return model_; }
  SolverBackend& backend() const { return *backend_; }

  std::vector<LotVec> lot_list() const {
    std::vector<LotVec> out;
    out.reserve(lots_.size());
    for (const PoolLot& pl : lots_) out.push_back(pl.lot);
    return out;
  }

  long long x_columns() const { return x_count_; }
  int y_columns() const { return static_cast<int>(lots_.size()); }
  int covered_lots() const { return covered_; }
  double slack_penalty() const { return penalty_; }
  int slack_var() const { return slack_var_; }
  int budget_row() const { return budget_row_; }
  int cover_row() const { return cover_row_; }
  int supply_low_row() const { return supply_lo_row_; }
  int supply_high_row() const { return supply_hi_row_; }

 private:
  const Instance* inst_;
  CostMode mode_;
  CostModel cm_;
  LinearModel model_;
  std::vector<PoolLot> lots_;
  std::map<LotVec, int> index_;
  SolverBackend* backend_;
  std::unique_ptr<LpEngine> engine_;
  double penalty_ = 0.0;
  long long x_count_ = 0;
  int covered_ = 0;
  int budget_row_ = -1;
  int cover_row_ = -1;
  int supply_lo_row_ = -1;
  int supply_hi_row_ = -1;
  int slack_var_ = -1;
};

// Interval closure of a multiplicity set: fill the gaps between the extremes,
// then widen by `extra` on both ends, clamped to [m_min, m_max]. Sets with
// fewer than two distinct entries are returned unchanged.
inline std::vector<int> close_multiplicities(std::vector<int> mults, int extra, int m_min,
                                             int m_max) {
  std::sort(mults.begin(), mults.end());
  mults.erase(std::unique(mults.begin(), mults.end()), mults.end());
  if (mults.size() < 2) return mults;
  const int lo = std::max(m_min, mults.front() - extra);
  const int hi = std::min(m_max, mults.back() + extra);
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int m = lo; m <= hi; ++m) out.push_back(m);
  return out;
}

// Seeds the pool so that the relaxation is feasible with a zero slack and
// the first restricted ILP can do no worse than the heuristic incumbent:
//   1. the incumbent's own assignment columns,
//   2. the top-scored lot-types with locally optimal columns for every
//      branch (these ease the budget row),
//   3. each branch's locally best lot-types at their best multiplicities
//      (spot repairs of almost-complete assignments),
//   4. the interval closure of every pooled multiplicity set, widened by
//      `extra_mults` (partial convexity for the pair subproblems).
inline void init_rmp(ColumnPool& pool, const GlbResult& glb, const Solution& incumbent,
                     int extra_mults) {
  const Instance& inst = pool.instance();
  const CostModel& cm = pool.cost_model();
  const int B = inst.num_branches();
  if (static_cast<int>(incumbent.per_branch.size()) != B)
    throw Error(Error::Kind::Internal, "seed solution covers the wrong number of branches");

  for (int b = 0; b < B; ++b) {
    const Assignment& a = incumbent.per_branch[static_cast<std::size_t>(b)];
    pool.add_assignment(pool.add_lot(a.lot), b, a.mult);
  }
  for (const ScoredLot& s : glb.seed) {
    const int id = pool.add_lot(s.lot);
    for (int b = 0; b < B; ++b)
      pool.add_assignment(id, b, cm.best_multiplicity(b, s.lot).first);
  }
  for (int b = 0; b < B; ++b) {
    if (b >= static_cast<int>(glb.per_branch.size())) break;
    for (const LocalBest& e : glb.per_branch[static_cast<std::size_t>(b)])
      pool.add_assignment(pool.add_lot(e.lot), b, e.mult);
  }

  struct Fill {
    int lot_id;
    int branch;
    std::vector<int> mults;
  };
  std::vector<Fill> fills;
  const auto& lots = pool.lots();
  for (int id = 0; id < static_cast<int>(lots.size()); ++id) {
    for (const BranchCols& bc : lots[static_cast<std::size_t>(id)].branches) {
      if (bc.mults.size() < 2) continue;
      std::vector<int> present;
      present.reserve(bc.mults.size());
      for (const auto& [m, var] : bc.mults) present.push_back(m);
      fills.push_back({id, bc.branch,
                       close_multiplicities(std::move(present), extra_mults, inst.mult_min,
                                            inst.mult_max)});
    }
  }
  for (const Fill& f : fills)
    for (int m : f.mults) pool.add_assignment(f.lot_id, f.branch, m);
}

// Restricted design problem over an explicit lot-type list, solved exactly
// below the cutoff. `found` is true only for a solution strictly cheaper
// than the cutoff; proving that none exists is a normal outcome.
struct RestrictedSolve {
  bool found = false;
  Solution solution;
  CostInt cost_scaled = 0;
  double cost = 0.0;
  MilpResult milp;
};

inline RestrictedSolve solve_restricted(const Instance& inst, CostMode mode,
                                        std::vector<LotVec> lots, double cutoff,
                                        const MilpOptions& base = reference_milp_options(),
                                        SolverBackend* backend = nullptr) {
  StaticIlp ilp = build_static_for(inst, mode, std::move(lots));
  MilpOptions opt = base;
  opt.cutoff = cutoff;
  SolverBackend& be = backend != nullptr ? *backend : backend_by_name();
  RestrictedSolve out;
  out.milp = be.solve_milp(ilp.model, opt);
  switch (out.milp.status) {
    case MilpStatus::Optimal:
      if (!out.milp.has_solution)
        throw Error(Error::Kind::Backend, "restricted solve reported optimal without a point");
      out.solution = extract_static_solution(inst, ilp, out.milp.x);
      out.cost_scaled = solution_cost_scaled(inst, mode, out.solution).first;
      out.cost = inst.cost_value(out.cost_scaled);
      out.found = true;
      break;
    case MilpStatus::Cutoff:
    case MilpStatus::Infeasible:
      break;  // nothing strictly below the cutoff
    default:
      throw Error(Error::Kind::Backend,
                  std::string("restricted solve stopped: ") + milp_status_name(out.milp.status));
  }
  return out;
}

}  // namespace ldp
