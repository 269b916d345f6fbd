#pragma once

// Bounded revised simplex over LinearModel, used as the builtin LP engine.
//
// One logical variable per row turns every row into an equation; row sense is
// encoded in the logical's bounds (<=: [0,inf), >=: (-inf,0], =: [0,0]).
// Variable codes: j >= 0 is structural column j, j < 0 is the logical of row
// (-j-1). Logicals never shift when columns are appended, which is what makes
// warm re-solves after column generation cheap.
//
// Phase 1 minimizes the sum of bound violations of basic variables with
// costs in {-1,0,+1}; phase 2 runs on the true objective. The basis inverse
// is kept as a product-form eta stack on top of a sparse LU refactorization.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ldp/basis_lu.hpp"
#include "ldp/linmodel.hpp"

namespace ldp {

struct SimplexOptions {
  double tol_feas = 1e-7;    // bound violation tolerance (scaled by 1 + |bound|)
  double tol_opt = 1e-7;     // reduced cost tolerance
  double tol_pivot = 1e-9;   // smallest acceptable pivot magnitude
  int refactor_every = 64;   // eta stack length before refactorization
  int shortlist = 256;       // pricing candidate list size between full scans
  long long max_iters = 0;   // 0 = automatic limit from model size
  int stall_limit = 1500;    // degenerate steps before switching to Bland's rule
  int trace = 0;             // >0: progress lines on stderr (LDP_SIMPLEX_TRACE overrides)
};

class SimplexSolver {
 public:
  explicit SimplexSolver(const LinearModel& model, SimplexOptions opt = {})
      : model_(&model), opt_(opt) {}

  // Re-reads the model (new columns/rows, changed bounds/costs/rhs) and
  // re-solves, reusing the current basis whenever it is still valid.
  LpResult solve(MethodHint hint = MethodHint::Automatic) {
    (void)hint;  // advisory only; the builtin engine always runs primal
    if (const char* env = std::getenv("LDP_SIMPLEX_TRACE"))
      opt_.trace = std::atoi(env);
    sync();
    LpResult res;
    res.status = run(res);
    if (res.status == LpStatus::Optimal) extract(res);
    return res;
  }

  void invalidate() { cold_ = true; }

  long long total_iterations() const { return total_iters_; }

 private:
  enum class VStat : char { Basic, AtLo, AtUp, Free };

  static constexpr double kTiny = 1e-11;
  static constexpr double kExpandStep = 1e-10;  // minimum displacement per blocking pivot

  // ---- variable codes ----
  bool is_logical(int code) const { return code < 0; }
  int logical_row(int code) const { return -code - 1; }
  int code_of_logical(int row) const { return -row - 1; }

  double lo_of(int code) const {
    return code >= 0 ? lo_[static_cast<std::size_t>(code)]
                     : llo_[static_cast<std::size_t>(logical_row(code))];
  }
  double up_of(int code) const {
    return code >= 0 ? up_[static_cast<std::size_t>(code)]
                     : lup_[static_cast<std::size_t>(logical_row(code))];
  }
  double true_cost(int code) const {
    return code >= 0 ? cost_[static_cast<std::size_t>(code)] : 0.0;
  }
  VStat& stat(int code) {
    return code >= 0 ? sstat_[static_cast<std::size_t>(code)]
                     : lstat_[static_cast<std::size_t>(logical_row(code))];
  }
  VStat stat_c(int code) const {
    return code >= 0 ? sstat_[static_cast<std::size_t>(code)]
                     : lstat_[static_cast<std::size_t>(logical_row(code))];
  }
  double nonbasic_value(int code) const {
    switch (stat_c(code)) {
      case VStat::AtLo: return lo_of(code);
      case VStat::AtUp: return up_of(code);
      case VStat::Free: return 0.0;
      case VStat::Basic: break;
    }
    throw Error(Error::Kind::Internal, "nonbasic_value on basic variable");
  }

  static VStat bound_status(double lo, double up) {
    if (lo == -kInf && up == kInf) return VStat::Free;
    if (lo == -kInf) return VStat::AtUp;
    return VStat::AtLo;
  }

  // ---- model mirror ----
  void mirror_all() {
    const LinearModel& mm = *model_;
    n_ = mm.num_vars();
    m_ = mm.num_rows();
    lo_.resize(static_cast<std::size_t>(n_));
    up_.resize(static_cast<std::size_t>(n_));
    cost_.resize(static_cast<std::size_t>(n_));
    cols_.resize(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) {
      lo_[static_cast<std::size_t>(j)] = mm.lower(j);
      up_[static_cast<std::size_t>(j)] = mm.upper(j);
      cost_[static_cast<std::size_t>(j)] = mm.objective(j);
      cols_[static_cast<std::size_t>(j)] = mm.column(j);
    }
    rhs_.resize(static_cast<std::size_t>(m_));
    llo_.resize(static_cast<std::size_t>(m_));
    lup_.resize(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i) {
      rhs_[static_cast<std::size_t>(i)] = mm.rhs(i);
      switch (mm.sense(i)) {
        case RowSense::Le: llo_[static_cast<std::size_t>(i)] = 0.0; lup_[static_cast<std::size_t>(i)] = kInf; break;
        case RowSense::Ge: llo_[static_cast<std::size_t>(i)] = -kInf; lup_[static_cast<std::size_t>(i)] = 0.0; break;
        case RowSense::Eq: llo_[static_cast<std::size_t>(i)] = 0.0; lup_[static_cast<std::size_t>(i)] = 0.0; break;
      }
    }
  }

  void cold_start() {
    mirror_all();
    sstat_.assign(static_cast<std::size_t>(n_), VStat::AtLo);
    for (int j = 0; j < n_; ++j)
      sstat_[static_cast<std::size_t>(j)] =
          bound_status(lo_[static_cast<std::size_t>(j)], up_[static_cast<std::size_t>(j)]);
    lstat_.assign(static_cast<std::size_t>(m_), VStat::Basic);
    basis_.resize(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i) basis_[static_cast<std::size_t>(i)] = code_of_logical(i);
    factor_ok_ = false;
    cold_ = false;
    seen_vars_ = n_;
    seen_rows_ = m_;
    seen_rev_ = model_->structural_revision();
  }

  void sync() {
    const LinearModel& mm = *model_;
    if (cold_ || mm.num_vars() < seen_vars_ || mm.num_rows() < seen_rows_) {
      cold_start();
      return;
    }
    bool structural = mm.structural_revision() != seen_rev_;
    bool grew = mm.num_vars() > seen_vars_ || mm.num_rows() > seen_rows_;
    int old_rows = seen_rows_;
    // Bounds, costs and rhs may change freely between solves; re-mirroring is
    // linear and keeps the basis.
    mirror_all();
    if (mm.num_vars() > seen_vars_) {
      sstat_.resize(static_cast<std::size_t>(n_));
      for (int j = seen_vars_; j < n_; ++j)
        sstat_[static_cast<std::size_t>(j)] =
            bound_status(lo_[static_cast<std::size_t>(j)], up_[static_cast<std::size_t>(j)]);
    }
    if (mm.num_rows() > old_rows) {
      lstat_.resize(static_cast<std::size_t>(m_));
      basis_.resize(static_cast<std::size_t>(m_));
      // New rows enter with their logical basic; the basis matrix stays block
      // triangular and therefore nonsingular.
      for (int i = old_rows; i < m_; ++i) {
        lstat_[static_cast<std::size_t>(i)] = VStat::Basic;
        basis_[static_cast<std::size_t>(i)] = code_of_logical(i);
      }
    }
    // Nonbasic statuses can be invalidated by bound changes (e.g. a variable
    // parked at a bound that became infinite).
    for (int j = 0; j < n_; ++j) {
      VStat& s = sstat_[static_cast<std::size_t>(j)];
      if (s == VStat::Basic) continue;
      double lo = lo_[static_cast<std::size_t>(j)], up = up_[static_cast<std::size_t>(j)];
      if (s == VStat::AtLo && lo == -kInf) s = up == kInf ? VStat::Free : VStat::AtUp;
      if (s == VStat::AtUp && up == kInf) s = lo == -kInf ? VStat::Free : VStat::AtLo;
      if (s == VStat::Free && (lo != -kInf || up != kInf)) s = bound_status(lo, up);
    }
    if (structural || grew) factor_ok_ = false;
    seen_vars_ = n_;
    seen_rows_ = m_;
    seen_rev_ = mm.structural_revision();
  }

  // ---- factorization ----
  bool refactor() {
    auto rf0 = std::chrono::steady_clock::now();
    struct Acc {
      double* slot;
      std::chrono::steady_clock::time_point t0;
      ~Acc() { *slot += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
    } acc{&time_refactor_, rf0};
    if (m_ == 0) {
      etas_.clear();
      eta_work_ = 0;
      factor_ok_ = true;
      compute_basic_values();
      return true;
    }
    long long nnz_in = 0;
    bool ok = blu_.factor(m_, [&](int i) -> const std::vector<ColEntry>& {
      int code = basis_[static_cast<std::size_t>(i)];
      if (is_logical(code)) {
        scratch_col_.assign(1, ColEntry{logical_row(code), 1.0});
        nnz_in += 1;
        return scratch_col_;
      }
      nnz_in += static_cast<long long>(cols_[static_cast<std::size_t>(code)].size());
      return cols_[static_cast<std::size_t>(code)];
    });
    if (!ok) return false;
    if (opt_.trace > 1)
      std::fprintf(stderr, "[simplex] refactor m=%d nnzB=%lld nnzLU=%lld\n", m_, nnz_in,
                   blu_.factor_nnz());
    etas_.clear();
    eta_work_ = 0;
    factor_ok_ = true;
    compute_basic_values();
    return true;
  }

  // Falls back to the all-logical basis when the stored basis went singular.
  void ensure_factored() {
    if (factor_ok_) return;
    if (refactor()) return;
    for (int i = 0; i < m_; ++i) {
      int code = basis_[static_cast<std::size_t>(i)];
      if (!is_logical(code)) stat(code) = bound_status(lo_of(code), up_of(code));
    }
    for (int i = 0; i < m_; ++i) {
      basis_[static_cast<std::size_t>(i)] = code_of_logical(i);
      lstat_[static_cast<std::size_t>(i)] = VStat::Basic;
    }
    ++basis_resets_;
    if (!refactor()) throw Error(Error::Kind::Backend, "identity basis failed to factorize");
  }

  struct Eta {
    int r = 0;
    double pivot = 0.0;
    std::vector<std::pair<int, double>> w;  // nonzeros of the entering column
  };

  void ftran(Eigen::VectorXd& v) {
    if (m_ == 0) return;
    blu_.ftran(v.data());
    for (const Eta& e : etas_) {
      double t = v[e.r] / e.pivot;
      if (t != 0.0)
        for (const auto& [i, wi] : e.w) v[i] -= wi * t;
      v[e.r] = t;
    }
  }

  void btran(Eigen::VectorXd& v) {
    if (m_ == 0) return;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = 0.0;
      for (const auto& [i, wi] : it->w)
        if (i != it->r) s += wi * v[i];
      v[it->r] = (v[it->r] - s) / it->pivot;
    }
    blu_.btran(v.data());
  }

  void compute_basic_values() {
    Eigen::VectorXd net = Eigen::VectorXd::Zero(m_);
    for (int i = 0; i < m_; ++i) net[i] = rhs_[static_cast<std::size_t>(i)];
    for (int j = 0; j < n_; ++j) {
      if (sstat_[static_cast<std::size_t>(j)] == VStat::Basic) continue;
      double v = nonbasic_value(j);
      if (v == 0.0) continue;
      for (const auto& e : cols_[static_cast<std::size_t>(j)]) net[e.row] -= e.coef * v;
    }
    for (int i = 0; i < m_; ++i) {
      if (lstat_[static_cast<std::size_t>(i)] == VStat::Basic) continue;
      double v = nonbasic_value(code_of_logical(i));
      if (v != 0.0) net[i] -= v;
    }
    ftran(net);
    xb_ = std::move(net);
  }

  double feas_tol(double bound) const { return opt_.tol_feas * (1.0 + std::fabs(bound)); }

  // Violation of basic value i against its own bounds; 0 when feasible.
  double violation(int i) const {
    int code = basis_[static_cast<std::size_t>(i)];
    double v = xb_[i];
    double lo = lo_of(code), up = up_of(code);
    if (lo != -kInf && v < lo - feas_tol(lo)) return v - lo;  // negative
    if (up != kInf && v > up + feas_tol(up)) return v - up;   // positive
    return 0.0;
  }

  double total_infeasibility() const {
    double s = 0.0;
    for (int i = 0; i < m_; ++i) s += std::fabs(violation(i));
    return s;
  }

  // Phase-dependent basic cost vector.
  void basic_costs(bool phase1, Eigen::VectorXd& cb) const {
    cb.resize(m_);
    for (int i = 0; i < m_; ++i) {
      if (phase1) {
        double v = violation(i);
        cb[i] = v < 0.0 ? -1.0 : (v > 0.0 ? 1.0 : 0.0);
      } else {
        cb[i] = true_cost(basis_[static_cast<std::size_t>(i)]);
      }
    }
  }

  double reduced_cost(int code, const Eigen::VectorXd& y, bool phase1) const {
    double c = phase1 ? 0.0 : true_cost(code);
    if (is_logical(code)) return c - y[logical_row(code)];
    for (const auto& e : cols_[static_cast<std::size_t>(code)]) c -= y[e.row] * e.coef;
    return c;
  }

  // Improving direction for a nonbasic candidate: +1 (increase), -1
  // (decrease), 0 (not improving / not movable).
  int improving_dir(int code, double d) const {
    VStat s = stat_c(code);
    double lo = lo_of(code), up = up_of(code);
    if (s != VStat::Free && up - lo <= 0.0) return 0;  // fixed
    switch (s) {
      case VStat::AtLo: return d < -opt_.tol_opt ? +1 : 0;
      case VStat::AtUp: return d > opt_.tol_opt ? -1 : 0;
      case VStat::Free:
        if (d < -opt_.tol_opt) return +1;
        if (d > opt_.tol_opt) return -1;
        return 0;
      case VStat::Basic: return 0;
    }
    return 0;
  }

  int total_codes() const { return n_ + m_; }
  int nth_code(int k) const { return k < n_ ? k : code_of_logical(k - n_); }

  // Multiple pricing: a full Dantzig scan builds a shortlist of the best
  // candidates; between scans only the shortlist is re-priced against the
  // current duals, which keeps per-iteration cost low without the direction
  // quality loss of block-rotation schemes. Bland mode bypasses the list and
  // returns the lowest-index improving candidate.
  struct Candidate {
    int code = 0;
    double d = 0.0;
    int dir = 0;
  };
  bool price(const Eigen::VectorXd& y, bool phase1, bool bland, Candidate& out) {
    int total = total_codes();
    if (bland) {
      for (int k = 0; k < total; ++k) {
        int code = nth_code(k);
        if (stat_c(code) == VStat::Basic) continue;
        double d = reduced_cost(code, y, phase1);
        int dir = improving_dir(code, d);
        if (dir != 0) {
          out = {code, d, dir};
          return true;
        }
      }
      return false;
    }
    if (shortlist_phase1_ != phase1) shortlist_.clear();
    if (!shortlist_.empty()) {
      // Entries stay listed while merely non-improving at the current duals;
      // they often flip back after a pivot, and re-pricing the list is cheap
      // next to a full scan. A full rescan happens once the list's best falls
      // well under the last scan's best, otherwise entering-variable quality
      // decays and the iteration count blows up.
      bool found = false;
      double best = 0.0;
      std::size_t keep = 0;
      for (int code : shortlist_) {
        if (stat_c(code) == VStat::Basic) continue;  // entered the basis: drop
        shortlist_[keep++] = code;
        double d = reduced_cost(code, y, phase1);
        int dir = improving_dir(code, d);
        if (dir == 0) continue;
        if (std::fabs(d) > best) {
          best = std::fabs(d);
          out = {code, d, dir};
          found = true;
        }
      }
      shortlist_.resize(keep);
      if (found && best >= 0.1 * scan_best_) return true;
    }
    shortlist_.clear();
    shortlist_phase1_ = phase1;
    ++full_scans_;
    auto fs0 = std::chrono::steady_clock::now();
    struct Acc {
      double* slot;
      std::chrono::steady_clock::time_point t0;
      ~Acc() { *slot += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
    } acc{&time_scan_, fs0};
    int cap = std::max(8, opt_.shortlist);
    // min-heap by |d| keeps the strongest `cap` candidates of the full scan
    auto cmp = [](const std::pair<double, int>& a, const std::pair<double, int>& b) {
      return a.first > b.first;
    };
    heap_.clear();
    for (int k = 0; k < total; ++k) {
      int code = nth_code(k);
      if (stat_c(code) == VStat::Basic) continue;
      double d = reduced_cost(code, y, phase1);
      if (improving_dir(code, d) == 0) continue;
      double a = std::fabs(d);
      if (static_cast<int>(heap_.size()) < cap) {
        heap_.emplace_back(a, code);
        std::push_heap(heap_.begin(), heap_.end(), cmp);
      } else if (a > heap_.front().first) {
        std::pop_heap(heap_.begin(), heap_.end(), cmp);
        heap_.back() = {a, code};
        std::push_heap(heap_.begin(), heap_.end(), cmp);
      }
    }
    if (heap_.empty()) return false;
    int best_code = -1;
    double best = -1.0;
    scan_best_ = 0.0;
    for (const auto& [a, code] : heap_) {
      shortlist_.push_back(code);
      if (a > best) {
        best = a;
        best_code = code;
      }
    }
    scan_best_ = best;
    double d = reduced_cost(best_code, y, phase1);
    out = {best_code, d, improving_dir(best_code, d)};
    return true;
  }

  // Sparse nonzeros of the FTRANned entering column.
  void gather(const Eigen::VectorXd& w, std::vector<int>& idx) const {
    idx.clear();
    for (int i = 0; i < m_; ++i)
      if (std::fabs(w[i]) > kTiny) idx.push_back(i);
  }

  struct RatioHit {
    double t = kInf;
    int pos = -1;        // leaving basis position, -1 = entering bound flip
    bool to_upper = false;  // leaving variable parks at its upper bound
  };

  // Two-pass ratio test. Phase 1 lets infeasible basics run until they reach
  // their violated bound; feasible basics block as usual.
  RatioHit ratio_test(const Candidate& c, const Eigen::VectorXd& w,
                      const std::vector<int>& wnz, bool phase1, bool bland) const {
    double sigma = c.dir;
    double own_range = kInf;
    {
      double lo = lo_of(c.code), up = up_of(c.code);
      double val = nonbasic_value(c.code);
      own_range = sigma > 0 ? (up == kInf ? kInf : up - val)
                            : (lo == -kInf ? kInf : val - lo);
    }

    auto step_limit = [&](int i, bool relaxed) -> std::pair<double, bool> {
      double dx = -sigma * w[i];
      int code = basis_[static_cast<std::size_t>(i)];
      double lo = lo_of(code), up = up_of(code);
      double v = xb_[i];
      double viol = phase1 ? violation(i) : 0.0;
      double slacked = relaxed ? 1.0 : 0.0;
      if (viol < 0.0) {
        // below its lower bound: blocks only while moving up towards lo
        if (dx > kTiny) return {(lo - v + slacked * feas_tol(lo)) / dx, false};
        return {kInf, false};
      }
      if (viol > 0.0) {
        if (dx < -kTiny) return {(up - v - slacked * feas_tol(up)) / dx, true};
        return {kInf, false};
      }
      if (dx > kTiny && up != kInf) return {(up - v + slacked * feas_tol(up)) / dx, true};
      if (dx < -kTiny && lo != -kInf) return {(lo - v - slacked * feas_tol(lo)) / dx, false};
      return {kInf, false};
    };

    // Pass 1: relaxed bounds give the tolerance-expanded minimum step.
    double t_relaxed = own_range;
    for (int i : wnz) {
      double t = step_limit(i, true).first;
      if (t < t_relaxed) t_relaxed = t;
    }
    if (t_relaxed == kInf) return {};  // unbounded direction
    if (t_relaxed < 0.0) t_relaxed = 0.0;

    // Pass 2: among true limits within the relaxed step, prefer the largest
    // pivot (or the lowest variable index under Bland's rule). Pivots below
    // tol_pivot are only used when nothing better blocks.
    RatioHit hit;
    double best_piv = -1.0;
    int best_key = std::numeric_limits<int>::max();
    bool best_acceptable = false;
    for (int i : wnz) {
      auto [t, to_upper] = step_limit(i, false);
      if (t > t_relaxed) continue;
      double piv = std::fabs(w[i]);
      bool acceptable = piv > opt_.tol_pivot;
      int key;
      {
        int vi = basis_[static_cast<std::size_t>(i)];
        key = vi >= 0 ? vi : n_ + logical_row(vi);
      }
      bool take;
      if (hit.pos == -1) {
        take = true;
      } else if (acceptable != best_acceptable) {
        take = acceptable;
      } else if (bland) {
        take = key < best_key;
      } else {
        take = piv > best_piv;
      }
      if (take) {
        best_piv = piv;
        best_key = key;
        best_acceptable = acceptable;
        hit.t = std::max(0.0, t);
        hit.pos = i;
        hit.to_upper = to_upper;
      }
    }
    if (hit.pos == -1) {
      // no blocking basic: the entering variable flips to its other bound
      if (own_range == kInf) return {};
      hit.t = own_range;
    } else if (!bland) {
      // Anti-degeneracy floor: force a strictly positive step. Staying below
      // t_relaxed keeps every blocker inside its tolerance band, so this
      // trades a bounded feasibility creep for guaranteed objective progress.
      double piv = std::fabs(w[hit.pos]);
      double tmin = std::min(t_relaxed, kExpandStep / std::max(piv, kTiny));
      if (hit.t < tmin) hit.t = tmin;
    }
    return hit;
  }

  void apply_step(const Candidate& c, const Eigen::VectorXd& w,
                  const std::vector<int>& wnz, const RatioHit& hit) {
    double sigma = c.dir;
    double t = hit.t;
    for (int i : wnz) xb_[i] -= sigma * t * w[i];
    if (hit.pos == -1) {
      // bound flip
      stat(c.code) = sigma > 0 ? VStat::AtUp : VStat::AtLo;
      return;
    }
    int leaving = basis_[static_cast<std::size_t>(hit.pos)];
    stat(leaving) = hit.to_upper ? VStat::AtUp : VStat::AtLo;
    if (lo_of(leaving) == -kInf && up_of(leaving) == kInf) stat(leaving) = VStat::Free;
    double enter_val = nonbasic_value(c.code) + sigma * t;
    basis_[static_cast<std::size_t>(hit.pos)] = c.code;
    stat(c.code) = VStat::Basic;
    xb_[hit.pos] = enter_val;
    Eta e;
    e.r = hit.pos;
    e.pivot = w[hit.pos];
    e.w.reserve(wnz.size());
    for (int i : wnz) e.w.emplace_back(i, w[i]);
    eta_work_ += static_cast<long long>(wnz.size());
    etas_.push_back(std::move(e));
    // Refactor on stack length, or early when the stack's accumulated
    // density dwarfs a fresh factorization (near-dense update columns).
    if (static_cast<int>(etas_.size()) >= opt_.refactor_every ||
        eta_work_ > 20 * (blu_.factor_nnz() + m_)) {
      if (!refactor()) ensure_factored();
    }
  }

  long long iter_limit() const {
    if (opt_.max_iters > 0) return opt_.max_iters;
    return 50000 + 200LL * (static_cast<long long>(n_) + m_);
  }

  // Runs phase 1 then phase 2 from the current basis.
  LpStatus run(LpResult& res) {
    ensure_factored();
    compute_basic_values();
    long long limit = iter_limit();
    long long iters = 0;
    int stall = 0;
    bool bland = false;
    int repair_rounds = 0;
    Eigen::VectorXd y, w, cb;

    auto t_start = std::chrono::steady_clock::now();
    bool phase1 = total_infeasibility() > 0.0;
    while (true) {
      if (iters++ > limit) {
        res.iterations = iters;
        total_iters_ += iters;
        return LpStatus::IterLimit;
      }
      if (phase1 && total_infeasibility() == 0.0) {
        phase1 = false;
        stall = 0;
        bland = false;
      }
      if (opt_.trace > 0 && iters % 1000 == 0) {
        double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        std::fprintf(stderr,
                     "[simplex] it=%lld phase=%d infeas=%.3g stall=%d bland=%d etas=%zu t=%.1fs"
                     " rf=%.1fs scan=%.1fs nscan=%lld\n",
                     iters, phase1 ? 1 : 2, phase1 ? total_infeasibility() : 0.0, stall,
                     bland ? 1 : 0, etas_.size(), el, time_refactor_, time_scan_, full_scans_);
      }
      basic_costs(phase1, cb);
      y = cb;
      btran(y);
      Candidate cand;
      if (!price(y, phase1, bland, cand)) {
        if (phase1) {
          res.iterations = iters;
          total_iters_ += iters;
          return LpStatus::Infeasible;
        }
        // Optimality on the eta-updated representation; refresh and verify
        // before declaring victory.
        if (repair_rounds < 3 && !verify_optimal()) {
          ++repair_rounds;
          continue;
        }
        res.iterations = iters;
        total_iters_ += iters;
        return LpStatus::Optimal;
      }
      w.setZero(m_);
      if (is_logical(cand.code)) {
        w[logical_row(cand.code)] = 1.0;
      } else {
        for (const auto& e : cols_[static_cast<std::size_t>(cand.code)]) w[e.row] = e.coef;
      }
      ftran(w);
      std::vector<int> wnz;
      gather(w, wnz);
      RatioHit hit = ratio_test(cand, w, wnz, phase1, bland);
      if (hit.pos == -1 && hit.t == kInf) {
        if (phase1) throw Error(Error::Kind::Backend, "phase 1 direction unbounded");
        res.iterations = iters;
        total_iters_ += iters;
        return LpStatus::Unbounded;
      }
      double progress = std::fabs(cand.d) * hit.t;
      apply_step(cand, w, wnz, hit);
      if (progress <= 1e-12) {
        if (++stall > opt_.stall_limit) bland = true;
      } else {
        stall = 0;
        bland = false;
      }
    }
  }

  // Fresh factorization + recomputation; returns false when the refreshed
  // values turned out infeasible or not dual feasible (caller iterates on).
  bool verify_optimal() {
    if (!refactor()) {
      ensure_factored();
      return false;
    }
    if (total_infeasibility() > 0.0) return false;
    Eigen::VectorXd cb;
    basic_costs(false, cb);
    Eigen::VectorXd y = cb;
    btran(y);
    for (int k = 0; k < total_codes(); ++k) {
      int code = nth_code(k);
      if (stat_c(code) == VStat::Basic) continue;
      double d = reduced_cost(code, y, false);
      if (improving_dir(code, d) != 0) return false;
    }
    return true;
  }

  void extract(LpResult& res) {
    Eigen::VectorXd cb;
    basic_costs(false, cb);
    Eigen::VectorXd y = cb;
    btran(y);
    res.x.assign(static_cast<std::size_t>(n_), 0.0);
    for (int j = 0; j < n_; ++j)
      if (sstat_[static_cast<std::size_t>(j)] != VStat::Basic)
        res.x[static_cast<std::size_t>(j)] = nonbasic_value(j);
    for (int i = 0; i < m_; ++i) {
      int code = basis_[static_cast<std::size_t>(i)];
      if (!is_logical(code)) res.x[static_cast<std::size_t>(code)] = xb_[i];
    }
    res.duals.assign(static_cast<std::size_t>(m_), 0.0);
    for (int i = 0; i < m_; ++i) res.duals[static_cast<std::size_t>(i)] = y[i];
    res.reduced_costs.assign(static_cast<std::size_t>(n_), 0.0);
    for (int j = 0; j < n_; ++j)
      res.reduced_costs[static_cast<std::size_t>(j)] = reduced_cost(j, y, false);
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += cost_[static_cast<std::size_t>(j)] * res.x[static_cast<std::size_t>(j)];
    res.obj = obj;
  }

  const LinearModel* model_;
  SimplexOptions opt_;

  int n_ = 0, m_ = 0;
  std::vector<double> lo_, up_, cost_;
  std::vector<std::vector<ColEntry>> cols_;
  std::vector<double> rhs_, llo_, lup_;

  std::vector<VStat> sstat_, lstat_;
  std::vector<int> basis_;
  Eigen::VectorXd xb_;

  BasisLu blu_;
  std::vector<ColEntry> scratch_col_;  // logical column staging for refactor
  std::vector<Eta> etas_;
  long long eta_work_ = 0;
  bool factor_ok_ = false;
  bool cold_ = true;
  int seen_vars_ = 0, seen_rows_ = 0;
  std::uint64_t seen_rev_ = 0;
  std::vector<int> shortlist_;
  bool shortlist_phase1_ = false;
  double scan_best_ = 0.0;
  double time_refactor_ = 0.0;
  double time_scan_ = 0.0;
  long long full_scans_ = 0;
  std::vector<std::pair<double, int>> heap_;
  long long total_iters_ = 0;
  long long basis_resets_ = 0;
};

}  // namespace ldp
