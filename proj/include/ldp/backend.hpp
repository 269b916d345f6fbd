#pragma once

// Backend facade: LP/MILP consumers go through SolverBackend so an external
// engine could be swapped in without touching the solvers. The builtin
// backend wraps the bounded simplex and its branch-and-bound. Selection
// precedence: explicit name, then the LDP_BACKEND environment variable, then
// "builtin".
//
// A model handle (LpEngine) is confined to one thread at a time; independent
// handles may solve concurrently.

#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include "ldp/milp.hpp"

namespace ldp {

class LpEngine {
 public:
  virtual ~LpEngine() = default;
  // Re-reads the attached model (including columns and rows added since the
  // last call) and solves, keeping whatever warm state the engine has.
  virtual LpResult solve(MethodHint hint = MethodHint::Automatic) = 0;
};

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string name() const = 0;
  virtual std::unique_ptr<LpEngine> attach(const LinearModel& model) = 0;
  virtual MilpResult solve_milp(const LinearModel& model, const MilpOptions& opt) = 0;
};

namespace backend_detail {

class BuiltinEngine final : public LpEngine {
 public:
  explicit BuiltinEngine(const LinearModel& model) : solver_(model) {}
  LpResult solve(MethodHint hint) override { return solver_.solve(hint); }

 private:
  SimplexSolver solver_;
};

class BuiltinBackend final : public SolverBackend {
 public:
  std::string name() const override { return "builtin"; }
  std::unique_ptr<LpEngine> attach(const LinearModel& model) override {
    return std::make_unique<BuiltinEngine>(model);
  }
  MilpResult solve_milp(const LinearModel& model, const MilpOptions& opt) override {
    return ldp::solve_milp(model, opt);
  }
};

}  // namespace backend_detail

inline SolverBackend& builtin_backend() {
  static backend_detail::BuiltinBackend backend;
  return backend;
}

inline std::vector<std::string> backend_names() { return {"builtin"}; }

inline SolverBackend& backend_by_name(const std::string& name = {}) {
  std::string want = name;
  if (want.empty()) {
    const char* env = std::getenv("LDP_BACKEND");
    if (env != nullptr) want = env;
  }
  if (want.empty() || want == "builtin") return builtin_backend();
  throw Error(Error::Kind::Backend, "unknown solver backend '" + want + "'");
}

inline LpResult solve_lp(const LinearModel& model,
                         MethodHint hint = MethodHint::Automatic,
                         SolverBackend* backend = nullptr) {
  SolverBackend& b = backend != nullptr ? *backend : builtin_backend();
  return b.attach(model)->solve(hint);
}

// Continuous relaxation: the same model with integrality dropped.
inline LpResult solve_lp_relaxed(LinearModel model, MethodHint hint = MethodHint::Automatic,
                                 SolverBackend* backend = nullptr) {
  for (int j = 0; j < model.num_vars(); ++j) model.set_integer(j, false);
  return solve_lp(model, hint, backend);
}

}  // namespace ldp
