#pragma once

// Shared model container for the LP/MILP layer.
//
// Minimization-only. Columns are stored sparsely per variable so that column
// generation can append variables without touching existing data. Rows keep
// their sense as written; the simplex attaches one logical variable per row
// internally. Dual sign convention (asserted in tests): with minimization,
// duals of >= rows are non-negative and duals of <= rows are non-positive at
// an optimal basis.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ldp/instance.hpp"

namespace ldp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { Le, Ge, Eq };

enum class MethodHint { Automatic, PrimalSimplex, DualSimplex };

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit };

enum class MilpStatus { Optimal, Infeasible, Cutoff, NodeLimit, TimeLimit, Unbounded };

inline const char* lp_status_name(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterLimit: return "iteration-limit";
  }
  return "unknown";
}

inline const char* milp_status_name(MilpStatus s) {
  switch (s) {
    case MilpStatus::Optimal: return "optimal";
    case MilpStatus::Infeasible: return "infeasible";
    case MilpStatus::Cutoff: return "cutoff";
    case MilpStatus::NodeLimit: return "node-limit";
    case MilpStatus::TimeLimit: return "time-limit";
    case MilpStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

struct LpResult {
  LpStatus status = LpStatus::IterLimit;
  double obj = 0.0;
  std::vector<double> x;              // structural variables only
  std::vector<double> duals;          // one per row
  std::vector<double> reduced_costs;  // structural variables only
  long long iterations = 0;

  bool ok() const { return status == LpStatus::Optimal; }
};

struct MilpResult {
  MilpStatus status = MilpStatus::NodeLimit;
  double obj = 0.0;  // incumbent objective, meaningful iff has_solution
  std::vector<double> x;
  double bound = -kInf;  // proven lower bound on the optimum
  long long nodes = 0;
  bool has_solution = false;

  bool ok() const { return status == MilpStatus::Optimal; }
};

struct MilpOptions {
  double rel_gap = 1e-4;  // stop when (incumbent - bound) <= rel_gap * max(1, |incumbent|)
  double cutoff = kInf;   // prune nodes whose bound cannot beat this value
  long long max_nodes = -1;
  double time_limit_seconds = 0.0;  // 0 = no wall-clock limit
  double int_tol = 1e-6;
};

struct ColEntry {
  int row = 0;
  double coef = 0.0;
};

class LinearModel {
 public:
  int add_var(double lo, double up, double obj, bool integer = false,
              std::string name = {}) {
    check_bounds(lo, up);
    lo_.push_back(lo);
    up_.push_back(up);
    obj_.push_back(obj);
    integer_.push_back(integer ? 1 : 0);
    cols_.emplace_back();
    var_names_.push_back(std::move(name));
    return num_vars() - 1;
  }

  int add_row(RowSense sense, double rhs, std::string name = {}) {
    if (!std::isfinite(rhs)) throw Error(Error::Kind::Internal, "row rhs must be finite");
    sense_.push_back(sense);
    rhs_.push_back(rhs);
    row_names_.push_back(std::move(name));
    return num_rows() - 1;
  }

  // Appends a fully formed column. Entries must reference existing rows and
  // contain no duplicates; they are kept sorted by row.
  int add_column(double lo, double up, double obj, bool integer,
                 std::vector<ColEntry> entries, std::string name = {}) {
    std::sort(entries.begin(), entries.end(),
              [](const ColEntry& a, const ColEntry& b) { return a.row < b.row; });
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].row < 0 || entries[i].row >= num_rows())
        throw Error(Error::Kind::Internal, "column entry references unknown row");
      if (i > 0 && entries[i].row == entries[i - 1].row)
        throw Error(Error::Kind::Internal, "duplicate row in column");
      if (!std::isfinite(entries[i].coef))
        throw Error(Error::Kind::Internal, "column coefficient must be finite");
    }
    int j = add_var(lo, up, obj, integer, std::move(name));
    cols_[static_cast<std::size_t>(j)] = std::move(entries);
    return j;
  }

  // Inserts, replaces, or (with coef == 0) removes a single coefficient.
  // Counts as a structural edit: attached solvers drop their factorization.
  void set_coef(int row, int var, double coef) {
    check_row(row);
    check_var(var);
    if (!std::isfinite(coef)) throw Error(Error::Kind::Internal, "coefficient must be finite");
    auto& col = cols_[static_cast<std::size_t>(var)];
    auto it = std::lower_bound(col.begin(), col.end(), row,
                               [](const ColEntry& e, int r) { return e.row < r; });
    if (it != col.end() && it->row == row) {
      if (coef == 0.0)
        col.erase(it);
      else
        it->coef = coef;
    } else if (coef != 0.0) {
      col.insert(it, ColEntry{row, coef});
    }
    ++structural_revision_;
  }

  void set_rhs(int row, double rhs) {
    check_row(row);
    if (!std::isfinite(rhs)) throw Error(Error::Kind::Internal, "row rhs must be finite");
    rhs_[static_cast<std::size_t>(row)] = rhs;
  }

  void set_obj(int var, double obj) {
    check_var(var);
    obj_[static_cast<std::size_t>(var)] = obj;
  }

  void set_bounds(int var, double lo, double up) {
    check_var(var);
    check_bounds(lo, up);
    lo_[static_cast<std::size_t>(var)] = lo;
    up_[static_cast<std::size_t>(var)] = up;
  }

  void set_integer(int var, bool integer) {
    check_var(var);
    integer_[static_cast<std::size_t>(var)] = integer ? 1 : 0;
  }

  int num_vars() const { return static_cast<int>(lo_.size()); }
  int num_rows() const { return static_cast<int>(rhs_.size()); }
  double lower(int var) const { check_var(var); return lo_[static_cast<std::size_t>(var)]; }
  double upper(int var) const { check_var(var); return up_[static_cast<std::size_t>(var)]; }
  double objective(int var) const { check_var(var); return obj_[static_cast<std::size_t>(var)]; }
  bool is_integer(int var) const { check_var(var); return integer_[static_cast<std::size_t>(var)] != 0; }
  const std::vector<ColEntry>& column(int var) const {
    check_var(var);
    return cols_[static_cast<std::size_t>(var)];
  }
  RowSense sense(int row) const { check_row(row); return sense_[static_cast<std::size_t>(row)]; }
  double rhs(int row) const { check_row(row); return rhs_[static_cast<std::size_t>(row)]; }

  std::string var_name(int var) const {
    check_var(var);
    const auto& n = var_names_[static_cast<std::size_t>(var)];
    return n.empty() ? "x" + std::to_string(var) : n;
  }
  std::string row_name(int row) const {
    check_row(row);
    const auto& n = row_names_[static_cast<std::size_t>(row)];
    return n.empty() ? "r" + std::to_string(row) : n;
  }

  bool has_integers() const {
    return std::any_of(integer_.begin(), integer_.end(), [](char c) { return c != 0; });
  }

  // Bumped whenever an existing coefficient changes; lets an attached solver
  // tell cheap growth (new columns/rows) apart from edits that invalidate its
  // factorization.
  std::uint64_t structural_revision() const { return structural_revision_; }

  double objective_value(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) < num_vars())
      throw Error(Error::Kind::Internal, "objective_value: short vector");
    double v = 0.0;
    for (int j = 0; j < num_vars(); ++j) v += obj_[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
    return v;
  }

  double row_activity(int row, const std::vector<double>& x) const {
    check_row(row);
    if (static_cast<int>(x.size()) < num_vars())
      throw Error(Error::Kind::Internal, "row_activity: short vector");
    double v = 0.0;
    for (int j = 0; j < num_vars(); ++j)
      for (const auto& e : cols_[static_cast<std::size_t>(j)])
        if (e.row == row) v += e.coef * x[static_cast<std::size_t>(j)];
    return v;
  }

  // CPLEX-style LP text format, for cross-checks with external tools.
  void write_lp(std::ostream& os) const {
    auto num = [](double v) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      return std::string(buf);
    };
    os << "Minimize\n obj:";
    bool first = true;
    for (int j = 0; j < num_vars(); ++j) {
      double c = obj_[static_cast<std::size_t>(j)];
      if (c == 0.0) continue;
      os << (first ? " " : (c < 0 ? " " : " + "));
      if (!first && c < 0) os << "- ", c = -c;
      else if (first && c < 0) os << "-", c = -c;
      os << num(c) << " " << var_name(j);
      first = false;
    }
    if (first) os << " 0 " << var_name(0);
    os << "\nSubject To\n";
    std::vector<std::vector<std::pair<int, double>>> rows(
        static_cast<std::size_t>(num_rows()));
    for (int j = 0; j < num_vars(); ++j)
      for (const auto& e : cols_[static_cast<std::size_t>(j)])
        rows[static_cast<std::size_t>(e.row)].emplace_back(j, e.coef);
    for (int i = 0; i < num_rows(); ++i) {
      os << " " << row_name(i) << ":";
      bool f = true;
      for (const auto& [j, c] : rows[static_cast<std::size_t>(i)]) {
        double v = c;
        os << (f ? " " : (v < 0 ? " " : " + "));
        if (!f && v < 0) os << "- ", v = -v;
        else if (f && v < 0) os << "-", v = -v;
        os << num(v) << " " << var_name(j);
        f = false;
      }
      if (f) os << " 0 " << var_name(0);
      const char* rel = sense_[static_cast<std::size_t>(i)] == RowSense::Le   ? "<="
                        : sense_[static_cast<std::size_t>(i)] == RowSense::Ge ? ">="
                                                                              : "=";
      os << " " << rel << " " << num(rhs_[static_cast<std::size_t>(i)]) << "\n";
    }
    os << "Bounds\n";
    for (int j = 0; j < num_vars(); ++j) {
      double lo = lo_[static_cast<std::size_t>(j)], up = up_[static_cast<std::size_t>(j)];
      if (lo == -kInf && up == kInf) {
        os << " " << var_name(j) << " free\n";
      } else if (lo == up) {
        os << " " << var_name(j) << " = " << num(lo) << "\n";
      } else {
        os << " " << (lo == -kInf ? std::string("-infinity") : num(lo)) << " <= "
           << var_name(j) << " <= " << (up == kInf ? std::string("+infinity") : num(up))
           << "\n";
      }
    }
    if (has_integers()) {
      os << "General\n";
      for (int j = 0; j < num_vars(); ++j)
        if (integer_[static_cast<std::size_t>(j)]) os << " " << var_name(j) << "\n";
    }
    os << "End\n";
  }

 private:
  static void check_bounds(double lo, double up) {
    if (std::isnan(lo) || std::isnan(up) || lo > up)
      throw Error(Error::Kind::Internal, "variable bounds crossed");
  }
  void check_var(int var) const {
    if (var < 0 || var >= num_vars()) throw Error(Error::Kind::Internal, "variable id out of range");
  }
  void check_row(int row) const {
    if (row < 0 || row >= num_rows()) throw Error(Error::Kind::Internal, "row id out of range");
  }

  std::vector<double> lo_, up_, obj_;
  std::vector<char> integer_;
  std::vector<std::vector<ColEntry>> cols_;
  std::vector<std::string> var_names_;
  std::vector<RowSense> sense_;
  std::vector<double> rhs_;
  std::vector<std::string> row_names_;
  std::uint64_t structural_revision_ = 0;
};

}  // namespace ldp
