#pragma once

// Sparse LU factorization specialized for simplex basis matrices: Markowitz
// pivot selection with threshold partial pivoting, column-wise elimination,
// and solve kernels for both B x = v and B^T y = v.
//
// Exists because generic fill-reducing orderings collapse on these bases:
// they mix unit logical columns, short structural columns, and a couple of
// near-dense coupling rows, and orderings that ignore the numeric pivot
// order fill in quadratically. Markowitz keeps the dense rows out of the
// elimination until the very end.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ldp/linmodel.hpp"

namespace ldp {

class BasisLu {
 public:
  struct Options {
    double pivot_threshold = 0.1;  // entry admissible if >= threshold * colmax
    int search_cap = 16;           // candidate columns examined per pivot
  };

  BasisLu() = default;
  explicit BasisLu(const Options& opt) : opt_(opt) {}

  // get_col(pos) must yield the sparse column (row, value entries) of basis
  // position pos. Returns false when the matrix is numerically singular.
  template <typename ColFn>
  bool factor(int m, ColFn&& get_col) {
    m_ = m;
    reset_factor();
    if (m == 0) return true;

    // active matrix, column-wise, with a row-wise pattern index
    acol_.assign(static_cast<std::size_t>(m), {});
    arow_.assign(static_cast<std::size_t>(m), {});
    rcount_.assign(static_cast<std::size_t>(m), 0);
    ccount_.assign(static_cast<std::size_t>(m), 0);
    rdone_.assign(static_cast<std::size_t>(m), 0);
    cdone_.assign(static_cast<std::size_t>(m), 0);
    rscale_.assign(static_cast<std::size_t>(m), 0.0);
    cscale_.assign(static_cast<std::size_t>(m), 1.0);
    for (int j = 0; j < m; ++j) {
      const std::vector<ColEntry>& col = get_col(j);
      auto& ac = acol_[static_cast<std::size_t>(j)];
      ac.reserve(col.size());
      for (const auto& e : col) {
        if (e.coef == 0.0) continue;
        ac.push_back({e.row, e.coef});
        ++rcount_[static_cast<std::size_t>(e.row)];
        arow_[static_cast<std::size_t>(e.row)].push_back(j);
        rscale_[static_cast<std::size_t>(e.row)] =
            std::max(rscale_[static_cast<std::size_t>(e.row)], std::fabs(e.coef));
      }
      ccount_[static_cast<std::size_t>(j)] = static_cast<int>(ac.size());
      if (ac.empty()) return false;  // structurally singular
    }
    // Max-norm equilibration. Columns mixing unit assignment entries with
    // large aggregate coefficients would otherwise fail the relative pivot
    // threshold on their small entries, forcing pivots into the dense rows
    // and blowing up fill.
    for (int i = 0; i < m; ++i)
      rscale_[static_cast<std::size_t>(i)] =
          rscale_[static_cast<std::size_t>(i)] > 0.0 ? 1.0 / rscale_[static_cast<std::size_t>(i)]
                                                     : 1.0;
    for (int j = 0; j < m; ++j) {
      double colmax = 0.0;
      for (Ent& e : acol_[static_cast<std::size_t>(j)]) {
        e.val *= rscale_[static_cast<std::size_t>(e.row)];
        colmax = std::max(colmax, std::fabs(e.val));
      }
      if (colmax < 1e-30) return false;  // numerically empty column
      double cs = 1.0 / colmax;
      cscale_[static_cast<std::size_t>(j)] = cs;
      for (Ent& e : acol_[static_cast<std::size_t>(j)]) e.val *= cs;
    }
    stamp_.assign(static_cast<std::size_t>(m), 0);
    wval_.assign(static_cast<std::size_t>(m), 0.0);
    cur_stamp_ = 0;

    // Triangular peel: column and row singletons pivot with pure bookkeeping
    // (no numeric column merges). Simplex bases are near-triangular, so this
    // usually leaves only a small bump for the Markowitz sweep below.
    int peeled = peel();
    if (peeled < 0) return false;

    if (peeled < m) {
      bucket_init();
      for (int k = peeled; k < m; ++k)
        if (!eliminate_one(k)) return false;
    }

    build_ucols();
    release_workspace();
    return true;
  }

  // B x = v, in place; v indexed by rows on input, by basis position on
  // output.
  void ftran(double* v) const {
    for (int i = 0; i < m_; ++i) v[i] *= rscale_[static_cast<std::size_t>(i)];
    for (int k = 0; k < m_; ++k) {
      const Op& op = lops_[static_cast<std::size_t>(k)];
      double piv = v[pivot_row_[static_cast<std::size_t>(k)]];
      if (piv != 0.0)
        for (int t = op.head; t < op.head + op.count; ++t)
          v[lrow_[static_cast<std::size_t>(t)]] -= lval_[static_cast<std::size_t>(t)] * piv;
    }
    // back substitution on U; gather into x by basis position
    xtmp_.assign(static_cast<std::size_t>(m_), 0.0);
    for (int k = m_ - 1; k >= 0; --k) {
      const Op& op = uops_[static_cast<std::size_t>(k)];
      double s = v[pivot_row_[static_cast<std::size_t>(k)]];
      for (int t = op.head; t < op.head + op.count; ++t)
        s -= uval_[static_cast<std::size_t>(t)] * xtmp_[static_cast<std::size_t>(ucol_[static_cast<std::size_t>(t)])];
      xtmp_[static_cast<std::size_t>(pivot_col_[static_cast<std::size_t>(k)])] =
          s / pivot_val_[static_cast<std::size_t>(k)];
    }
    for (int j = 0; j < m_; ++j)
      v[j] = xtmp_[static_cast<std::size_t>(j)] * cscale_[static_cast<std::size_t>(j)];
  }

  // B^T y = v, in place; v indexed by basis position on input, by rows on
  // output.
  void btran(double* v) const {
    for (int j = 0; j < m_; ++j) v[j] *= cscale_[static_cast<std::size_t>(j)];
    // forward solve on U^T in pivot order, using the column view of U
    ztmp_.assign(static_cast<std::size_t>(m_), 0.0);
    for (int k = 0; k < m_; ++k) {
      int q = pivot_col_[static_cast<std::size_t>(k)];
      double s = v[q];
      for (int t = ucol_head_[static_cast<std::size_t>(q)];
           t < ucol_head_[static_cast<std::size_t>(q) + 1]; ++t)
        s -= ucol_val_[static_cast<std::size_t>(t)] * ztmp_[static_cast<std::size_t>(ucol_step_[static_cast<std::size_t>(t)])];
      ztmp_[static_cast<std::size_t>(k)] = s / pivot_val_[static_cast<std::size_t>(k)];
    }
    for (int j = 0; j < m_; ++j) v[j] = 0.0;
    for (int k = 0; k < m_; ++k)
      v[pivot_row_[static_cast<std::size_t>(k)]] = ztmp_[static_cast<std::size_t>(k)];
    // y = E_1^T ... E_m^T z, applied in descending step order
    for (int k = m_ - 1; k >= 0; --k) {
      const Op& op = lops_[static_cast<std::size_t>(k)];
      double s = 0.0;
      for (int t = op.head; t < op.head + op.count; ++t)
        s += lval_[static_cast<std::size_t>(t)] * v[lrow_[static_cast<std::size_t>(t)]];
      v[pivot_row_[static_cast<std::size_t>(k)]] -= s;
    }
    for (int i = 0; i < m_; ++i) v[i] *= rscale_[static_cast<std::size_t>(i)];
  }

  long long factor_nnz() const {
    return static_cast<long long>(lrow_.size() + ucol_.size()) + m_;
  }
  int size() const { return m_; }

 private:
  struct Ent {
    int row;
    double val;
  };
  struct Op {
    int head = 0;
    int count = 0;
  };

  void reset_factor() {
    lrow_.clear();
    lval_.clear();
    lops_.clear();
    ucol_.clear();
    uval_.clear();
    uops_.clear();
    pivot_row_.clear();
    pivot_col_.clear();
    pivot_val_.clear();
    lops_.reserve(static_cast<std::size_t>(m_));
    uops_.reserve(static_cast<std::size_t>(m_));
    pivot_row_.reserve(static_cast<std::size_t>(m_));
    pivot_col_.reserve(static_cast<std::size_t>(m_));
    pivot_val_.reserve(static_cast<std::size_t>(m_));
  }

  void release_workspace() {
    acol_.clear();
    acol_.shrink_to_fit();
    arow_.clear();
    arow_.shrink_to_fit();
  }

  // Pivots every column and row singleton without numeric merges: a
  // singleton column contributes an empty L op, a singleton row an empty U
  // row, and retiring them only touches counts. Returns pivots done, or -1
  // when a row or column runs empty (singular).
  int peel() {
    peel_colq_.clear();
    peel_rowq_.clear();
    for (int j = 0; j < m_; ++j)
      if (ccount_[static_cast<std::size_t>(j)] == 1) peel_colq_.push_back(j);
    for (int i = 0; i < m_; ++i)
      if (rcount_[static_cast<std::size_t>(i)] == 1) peel_rowq_.push_back(i);
    int done = 0;
    while (!peel_colq_.empty() || !peel_rowq_.empty()) {
      if (!peel_colq_.empty()) {
        int q = peel_colq_.back();
        peel_colq_.pop_back();
        if (cdone_[static_cast<std::size_t>(q)] || ccount_[static_cast<std::size_t>(q)] != 1)
          continue;
        const Ent pe = acol_[static_cast<std::size_t>(q)].front();
        int p = pe.row;
        pivot_row_.push_back(p);
        pivot_col_.push_back(q);
        pivot_val_.push_back(pe.val);
        lops_.push_back({static_cast<int>(lrow_.size()), 0});
        Op uop{static_cast<int>(ucol_.size()), 0};
        for (int c : arow_[static_cast<std::size_t>(p)]) {
          if (c == q || cdone_[static_cast<std::size_t>(c)]) continue;
          auto& ac = acol_[static_cast<std::size_t>(c)];
          for (std::size_t t = 0; t < ac.size(); ++t) {
            if (ac[t].row != p) continue;
            ucol_.push_back(c);
            uval_.push_back(ac[t].val);
            ac[t] = ac.back();
            ac.pop_back();
            int cc = --ccount_[static_cast<std::size_t>(c)];
            if (cc == 1)
              peel_colq_.push_back(c);
            else if (cc == 0)
              return -1;
            break;
          }
        }
        uop.count = static_cast<int>(ucol_.size()) - uop.head;
        uops_.push_back(uop);
        rdone_[static_cast<std::size_t>(p)] = 1;
        cdone_[static_cast<std::size_t>(q)] = 1;
        acol_[static_cast<std::size_t>(q)].clear();
        arow_[static_cast<std::size_t>(p)].clear();
        ++done;
        continue;
      }
      int p = peel_rowq_.back();
      peel_rowq_.pop_back();
      if (rdone_[static_cast<std::size_t>(p)] || rcount_[static_cast<std::size_t>(p)] != 1)
        continue;
      int q = -1;
      double d = 0.0;
      for (int c : arow_[static_cast<std::size_t>(p)]) {
        if (cdone_[static_cast<std::size_t>(c)]) continue;
        for (const Ent& e : acol_[static_cast<std::size_t>(c)])
          if (e.row == p) {
            q = c;
            d = e.val;
            break;
          }
        if (q >= 0) break;
      }
      if (q < 0) return -1;
      double colmax = 0.0;
      for (const Ent& e : acol_[static_cast<std::size_t>(q)])
        colmax = std::max(colmax, std::fabs(e.val));
      if (std::fabs(d) < opt_.pivot_threshold * colmax) continue;  // unstable; leave for the bump
      pivot_row_.push_back(p);
      pivot_col_.push_back(q);
      pivot_val_.push_back(d);
      Op lop{static_cast<int>(lrow_.size()), 0};
      for (const Ent& e : acol_[static_cast<std::size_t>(q)]) {
        if (e.row == p) continue;
        lrow_.push_back(e.row);
        lval_.push_back(e.val / d);
        int rc = --rcount_[static_cast<std::size_t>(e.row)];
        if (rc == 1)
          peel_rowq_.push_back(e.row);
        else if (rc == 0)
          return -1;
      }
      lop.count = static_cast<int>(lrow_.size()) - lop.head;
      lops_.push_back(lop);
      uops_.push_back({static_cast<int>(ucol_.size()), 0});
      rdone_[static_cast<std::size_t>(p)] = 1;
      cdone_[static_cast<std::size_t>(q)] = 1;
      acol_[static_cast<std::size_t>(q)].clear();
      arow_[static_cast<std::size_t>(p)].clear();
      ++done;
    }
    return done;
  }

  // ---- column count buckets (doubly linked) ----
  void bucket_init() {
    chead_.assign(static_cast<std::size_t>(m_) + 2, -1);
    cnext_.assign(static_cast<std::size_t>(m_), -1);
    cprev_.assign(static_cast<std::size_t>(m_), -1);
    for (int j = 0; j < m_; ++j)
      if (!cdone_[static_cast<std::size_t>(j)]) bucket_add(j);
  }
  void bucket_add(int j) {
    int c = std::min(ccount_[static_cast<std::size_t>(j)], m_ + 1);
    cnext_[static_cast<std::size_t>(j)] = chead_[static_cast<std::size_t>(c)];
    cprev_[static_cast<std::size_t>(j)] = -1;
    if (chead_[static_cast<std::size_t>(c)] >= 0)
      cprev_[static_cast<std::size_t>(chead_[static_cast<std::size_t>(c)])] = j;
    chead_[static_cast<std::size_t>(c)] = j;
  }
  void bucket_remove(int j) {
    int c = std::min(ccount_[static_cast<std::size_t>(j)], m_ + 1);
    int nx = cnext_[static_cast<std::size_t>(j)], pv = cprev_[static_cast<std::size_t>(j)];
    if (pv >= 0)
      cnext_[static_cast<std::size_t>(pv)] = nx;
    else
      chead_[static_cast<std::size_t>(c)] = nx;
    if (nx >= 0) cprev_[static_cast<std::size_t>(nx)] = pv;
  }

  // Compacts stale/eliminated entries out of a column in place.
  void compact_col(int j) {
    auto& ac = acol_[static_cast<std::size_t>(j)];
    std::size_t w = 0;
    for (std::size_t r = 0; r < ac.size(); ++r)
      if (!rdone_[static_cast<std::size_t>(ac[r].row)]) ac[w++] = ac[r];
    ac.resize(w);
  }

  bool eliminate_one(int step) {
    // pivot search: smallest column counts first, Markowitz tie-break
    int best_col = -1, best_row = -1;
    double best_val = 0.0;
    long long best_score = -1;
    int scanned = 0;
    bool done = false;
    for (int cnt = 1; cnt <= m_ && !done; ++cnt) {
      int j = chead_[static_cast<std::size_t>(cnt)];
      while (j >= 0 && !done) {
        int nx = cnext_[static_cast<std::size_t>(j)];  // capture before re-bucketing
        compact_col(j);
        auto& ac = acol_[static_cast<std::size_t>(j)];
        if (static_cast<int>(ac.size()) != cnt) {
          bucket_remove(j);
          ccount_[static_cast<std::size_t>(j)] = static_cast<int>(ac.size());
          bucket_add(j);
          j = nx;
          continue;
        }
        double colmax = 0.0;
        for (const Ent& e : ac) colmax = std::max(colmax, std::fabs(e.val));
        if (colmax < 1e-20) return false;  // numerically singular column
        for (const Ent& e : ac) {
          if (std::fabs(e.val) < opt_.pivot_threshold * colmax) continue;
          long long score = static_cast<long long>(rcount_[static_cast<std::size_t>(e.row)] - 1) *
                            (cnt - 1);
          if (best_score < 0 || score < best_score ||
              (score == best_score && std::fabs(e.val) > std::fabs(best_val))) {
            best_score = score;
            best_col = j;
            best_row = e.row;
            best_val = e.val;
          }
        }
        // a zero score cannot be beaten; the scan cap bounds search effort
        if (best_score == 0 || (++scanned >= opt_.search_cap && best_score >= 0)) done = true;
        j = nx;
      }
    }
    if (best_col < 0) return false;

    int p = best_row, q = best_col;
    double d = 0.0;
    compact_col(q);
    auto& pivcol = acol_[static_cast<std::size_t>(q)];
    for (const Ent& e : pivcol)
      if (e.row == p) d = e.val;
    if (d == 0.0) return false;

    pivot_row_.push_back(p);
    pivot_col_.push_back(q);
    pivot_val_.push_back(d);

    // L multipliers from the pivot column
    Op lop;
    lop.head = static_cast<int>(lrow_.size());
    for (const Ent& e : pivcol) {
      if (e.row == p) continue;
      lrow_.push_back(e.row);
      lval_.push_back(e.val / d);
      --rcount_[static_cast<std::size_t>(e.row)];
    }
    lop.count = static_cast<int>(lrow_.size()) - lop.head;
    lops_.push_back(lop);

    // pivot row entries across the remaining active columns form the U row
    // and drive the update of those columns
    Op uop;
    uop.head = static_cast<int>(ucol_.size());
    auto& prow = arow_[static_cast<std::size_t>(p)];
    for (int c : prow) {
      if (c == q || cdone_[static_cast<std::size_t>(c)]) continue;
      auto& ac = acol_[static_cast<std::size_t>(c)];
      double apc = 0.0;
      bool found = false;
      for (const Ent& e : ac)
        if (e.row == p && !rdone_[static_cast<std::size_t>(e.row)]) {
          apc = e.val;
          found = true;
          break;
        }
      if (!found || apc == 0.0) continue;
      ucol_.push_back(c);
      uval_.push_back(apc);
      update_column(c, p, q, apc / d);
    }
    uop.count = static_cast<int>(ucol_.size()) - uop.head;
    uops_.push_back(uop);

    // retire pivot row and column
    rdone_[static_cast<std::size_t>(p)] = 1;
    cdone_[static_cast<std::size_t>(q)] = 1;
    bucket_remove(q);
    prow.clear();
    pivcol.clear();
    (void)step;
    return true;
  }

  // col_c -= f * col_q restricted to active rows; the row-p entry of col_c
  // is dropped (it moved into U).
  void update_column(int c, int p, int q, double f) {
    auto& ac = acol_[static_cast<std::size_t>(c)];
    const auto& aq = acol_[static_cast<std::size_t>(q)];
    ++cur_stamp_;
    // load current active entries
    tmp_rows_.clear();
    for (const Ent& e : ac) {
      if (rdone_[static_cast<std::size_t>(e.row)] || e.row == p) continue;
      wval_[static_cast<std::size_t>(e.row)] = e.val;
      stamp_[static_cast<std::size_t>(e.row)] = cur_stamp_;
      tmp_rows_.push_back(e.row);
    }
    for (const Ent& e : aq) {
      if (e.row == p) continue;
      std::size_t r = static_cast<std::size_t>(e.row);
      if (stamp_[r] == cur_stamp_) {
        wval_[r] -= f * e.val;
      } else {
        wval_[r] = -f * e.val;
        stamp_[r] = cur_stamp_;
        tmp_rows_.push_back(e.row);
        ++rcount_[r];
        arow_[r].push_back(c);
      }
    }
    ac.clear();
    for (int r : tmp_rows_) {
      double v = wval_[static_cast<std::size_t>(r)];
      if (std::fabs(v) < 1e-30) {  // cancellation; keeping it would be noise fill
        --rcount_[static_cast<std::size_t>(r)];
        continue;
      }
      ac.push_back({r, v});
    }
    bucket_remove(c);
    ccount_[static_cast<std::size_t>(c)] = static_cast<int>(ac.size());
    bucket_add(c);
  }

  // column view of U for the transpose solve
  void build_ucols() {
    ucol_head_.assign(static_cast<std::size_t>(m_) + 1, 0);
    for (int c : ucol_) ++ucol_head_[static_cast<std::size_t>(c) + 1];
    for (int j = 0; j < m_; ++j)
      ucol_head_[static_cast<std::size_t>(j) + 1] += ucol_head_[static_cast<std::size_t>(j)];
    ucol_step_.assign(ucol_.size(), 0);
    ucol_val_.assign(ucol_.size(), 0.0);
    std::vector<int> fill = ucol_head_;
    for (int k = 0; k < m_; ++k) {
      const Op& op = uops_[static_cast<std::size_t>(k)];
      for (int t = op.head; t < op.head + op.count; ++t) {
        int c = ucol_[static_cast<std::size_t>(t)];
        int slot = fill[static_cast<std::size_t>(c)]++;
        ucol_step_[static_cast<std::size_t>(slot)] = k;
        ucol_val_[static_cast<std::size_t>(slot)] = uval_[static_cast<std::size_t>(t)];
      }
    }
  }

  Options opt_;
  int m_ = 0;

  // factors
  std::vector<int> lrow_;
  std::vector<double> lval_;
  std::vector<Op> lops_;
  std::vector<int> ucol_;
  std::vector<double> uval_;
  std::vector<Op> uops_;
  std::vector<int> pivot_row_, pivot_col_;
  std::vector<double> pivot_val_;
  std::vector<int> ucol_head_, ucol_step_;
  std::vector<double> ucol_val_;
  std::vector<double> rscale_, cscale_;  // equilibration applied at factor time

  // factorization workspace
  std::vector<std::vector<Ent>> acol_;
  std::vector<std::vector<int>> arow_;
  std::vector<int> rcount_, ccount_;
  std::vector<char> rdone_, cdone_;
  std::vector<int> chead_, cnext_, cprev_;
  std::vector<double> wval_;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t cur_stamp_ = 0;
  std::vector<int> tmp_rows_;
  std::vector<int> peel_colq_, peel_rowq_;

  mutable std::vector<double> xtmp_, ztmp_;
};

}  // namespace ldp
