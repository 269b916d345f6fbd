#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "ldp/compact_model.hpp"
#include "ldp/oracle.hpp"
#include "ldp/static_model.hpp"
#include "support.hpp"

using namespace ldp;
using namespace ldptest;

namespace {

template <typename Fn>
Error::Kind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  throw std::runtime_error("expected the call to throw ldp::Error");
}

bool rows_ok(const LinearModel& mdl, const std::vector<double>& x, double tol) {
  for (int r = 0; r < mdl.num_rows(); ++r) {
    const double act = mdl.row_activity(r, x);
    const double rhs = mdl.rhs(r);
    bool ok = true;
    switch (mdl.sense(r)) {
      case RowSense::Le: ok = act <= rhs + tol; break;
      case RowSense::Ge: ok = act >= rhs - tol; break;
      case RowSense::Eq: ok = std::fabs(act - rhs) <= tol; break;
    }
    if (!ok) {
      UNSCOPED_INFO("row " << r << " (" << mdl.row_name(r) << ") activity " << act << " rhs "
                           << rhs);
      return false;
    }
  }
  for (int j = 0; j < mdl.num_vars(); ++j) {
    const double v = x[static_cast<std::size_t>(j)];
    if (v < mdl.lower(j) - tol || v > mdl.upper(j) + tol) {
      UNSCOPED_INFO("var " << j << " value " << v << " outside its bounds");
      return false;
    }
  }
  return true;
}

// Small random instances sized for exhaustive cross-checks. A slack supply
// window spans the full piece range of any assignment, so the instance is
// always feasible; a tight one may cut off everything.
Instance random_tiny(TestRng& rng, int max_b, int max_s, int max_width, int max_mult_extra,
                     int max_scen, int max_k, bool slack_window) {
  Instance inst;
  const int B = static_cast<int>(rng.uniform(1, max_b));
  const int S = static_cast<int>(rng.uniform(1, max_s));
  for (int b = 0; b < B; ++b) inst.branch_ids.push_back("b" + std::to_string(b));
  for (int s = 0; s < S; ++s) inst.size_ids.push_back("s" + std::to_string(s));
  inst.min_per_size = static_cast<int>(rng.uniform(0, 1));
  inst.max_per_size = inst.min_per_size + static_cast<int>(rng.uniform(1, max_width));
  inst.min_total = static_cast<int>(rng.uniform(S * inst.min_per_size, S * inst.max_per_size));
  inst.max_total = static_cast<int>(rng.uniform(inst.min_total, S * inst.max_per_size));
  inst.mult_min = static_cast<int>(rng.uniform(1, 2));
  inst.mult_max = inst.mult_min + static_cast<int>(rng.uniform(0, max_mult_extra));
  inst.max_lot_types = static_cast<int>(rng.uniform(1, max_k));
  inst.demand_decimals = static_cast<int>(rng.uniform(0, 1));
  inst.prob_decimals = 2;
  const int A = static_cast<int>(rng.uniform(1, max_scen));
  std::int64_t left = 100;  // percent shares, prob_decimals = 2
  const std::int64_t dmax =
      static_cast<std::int64_t>(inst.max_per_size * inst.mult_max + 2) * inst.demand_scale();
  for (int a = 0; a < A; ++a) {
    Scenario sc;
    const std::int64_t share = (a + 1 == A) ? left : rng.uniform(0, left);
    left -= share;
    sc.prob_scaled = share;
    for (int c = 0; c < B * S; ++c) sc.demand_scaled.push_back(rng.uniform(0, dmax));
    inst.scenarios.push_back(std::move(sc));
  }
  inst.nominal_scenario = static_cast<int>(rng.uniform(0, A - 1));
  const long long floor_reach = static_cast<long long>(B) * inst.mult_min * inst.min_total;
  const long long ceil_reach = static_cast<long long>(B) * inst.mult_max * inst.max_total;
  if (slack_window) {
    inst.supply_min = floor_reach;
    inst.supply_max = ceil_reach;
  } else {
    inst.supply_min = rng.uniform(floor_reach, ceil_reach);
    inst.supply_max = rng.uniform(inst.supply_min, ceil_reach + 2);
  }
  validate_instance(inst);
  return inst;
}

}  // namespace

TEST_CASE("static dimension formulas match the recorded model shapes") {
  StaticDims d = static_dims(10, 50, 5);
  CHECK(d.num_vars == 2550);
  CHECK(d.num_cons == 513);
  d = static_dims(10, 1211, 5);
  CHECK(d.num_vars == 61761);
  CHECK(d.num_cons == 12123);
  d = static_dims(1303, 1211, 5);
  CHECK(d.num_vars == 7890876);
  CHECK(d.num_cons == 1579239);
  d = static_dims(1328, 1290, 5);
  CHECK(d.num_vars == 8566890);
  CHECK(d.num_cons == 1714451);
  d = static_dims(682, 1159533584LL, 5);
  CHECK(d.num_vars == 3955169055024LL);
  CHECK(d.num_cons == 790801904973LL);
  CHECK_THROWS_AS(static_dims(3037000500LL, 3037000500LL, 2), Error);
}

TEST_CASE("static build matches the dimension formulas") {
  Instance inst = make_instance({{2, 2}}, 1, 1, 0, 5, 0, 10, 0, 100, 1);  // |L| = 36
  const StaticDims d = static_dims(inst);
  CHECK(d.num_vars == 72);
  CHECK(d.num_cons == 40);
  const StaticIlp ilp = build_static(inst, CostMode::Nominal);
  CHECK(ilp.model.num_vars() == d.num_vars);
  CHECK(ilp.model.num_rows() == d.num_cons);
}

TEST_CASE("static model materialization cap refuses with a size report") {
  Instance inst = make_instance({{2, 2}}, 1, 1, 0, 5, 0, 10, 0, 100, 1);
  StaticOptions opt;
  opt.lot_cap = 10;
  try {
    build_static(inst, CostMode::Nominal, opt);
    FAIL("expected a refusal");
  } catch (const Error& e) {
    CHECK(e.kind() == Error::Kind::Guard);
    const std::string what = e.what();
    CHECK(what.find("36") != std::string::npos);
    CHECK(what.find("cap") != std::string::npos);
    CHECK(what.find("72") != std::string::npos);  // the size report names the full model
  }
}

TEST_CASE("single lot-type space reduces the oracle to the multiplicity program") {
  // one applicable lot-type (2,2); only the multiplicities are free
  Instance inst = make_instance({{3, 1}, {5, 5}}, 1, 3, 2, 2, 4, 4, 8, 16, 1);
  const OracleResult r = oracle_solve(inst, CostMode::Nominal);
  CHECK(r.subsets == 1);
  CHECK(r.cost == Catch::Approx(4.0));
  REQUIRE(r.solution.per_branch.size() == 2);
  CHECK(r.solution.per_branch[0].mult == 1);
  CHECK(r.solution.per_branch[1].mult == 2);
  CHECK(solve_static(inst, CostMode::Nominal).cost_scaled == r.cost_scaled);
}

TEST_CASE("oracle refuses instances beyond its limits") {
  // 1000 applicable lot-types
  Instance big = make_instance({{1, 1, 1}}, 1, 1, 0, 9, 0, 27, 0, 100, 1);
  CHECK(kind_of([&] { oracle_solve(big, CostMode::Nominal); }) == Error::Kind::Guard);

  std::vector<std::vector<double>> rows(13, std::vector<double>{1.0});
  Instance wide = make_instance(rows, 1, 1, 0, 2, 0, 2, 0, 100, 1);
  CHECK(kind_of([&] { oracle_solve(wide, CostMode::Nominal); }) == Error::Kind::Guard);

  Instance many = make_instance({{1, 1}}, 1, 1, 0, 1, 0, 2, 0, 100, 4);
  CHECK(kind_of([&] { oracle_solve(many, CostMode::Nominal); }) == Error::Kind::Guard);
}

TEST_CASE("all reference paths agree that an unreachable window is inconsistent") {
  Instance inst = make_instance({{1.0}}, 1, 1, 0, 2, 0, 2, 50, 60, 1);  // reach tops out at 2
  CHECK(kind_of([&] { oracle_solve(inst, CostMode::Nominal); }) == Error::Kind::Inconsistent);
  CHECK(kind_of([&] { solve_static(inst, CostMode::Nominal); }) == Error::Kind::Inconsistent);
  CHECK(kind_of([&] { solve_compact(inst, CostMode::Nominal); }) == Error::Kind::Inconsistent);
  CHECK(kind_of([&] { static_lp_value(inst, CostMode::Nominal); }) == Error::Kind::Inconsistent);
  CHECK(kind_of([&] { compact_lp_value(inst, CostMode::Nominal); }) ==
        Error::Kind::Inconsistent);
}

TEST_CASE("oracle and static solver find the same optimum on random tiny instances") {
  TestRng rng(0x5eedULL);
  int feasible = 0;
  for (int round = 0; round < 50; ++round) {
    const bool slack = round % 3 != 2;
    const Instance inst = random_tiny(rng, 4, 3, 2, 1, 3, 3, slack);
    const CostMode mode = round % 2 == 0 ? CostMode::Expected : CostMode::Nominal;
    OracleResult oracle;
    try {
      oracle = oracle_solve(inst, mode);
    } catch (const Error& e) {
      REQUIRE(e.kind() == Error::Kind::Inconsistent);
      REQUIRE(kind_of([&] { solve_static(inst, mode); }) == Error::Kind::Inconsistent);
      continue;
    }
    ++feasible;
    const IlpSolveResult st = solve_static(inst, mode);
    REQUIRE(st.cost_scaled == oracle.cost_scaled);
    REQUIRE(st.milp.obj == Catch::Approx(st.cost).margin(1e-6));
    REQUIRE(check_solution(inst, st.solution).ok);
  }
  REQUIRE(feasible >= 30);
}

TEST_CASE("compact solver matches static and its relaxation is never stronger") {
  TestRng rng(0xc0ffeeULL);
  int feasible = 0;
  for (int round = 0; round < 20; ++round) {
    const Instance inst = random_tiny(rng, 3, 2, 2, 1, 2, 2, round % 4 != 3);
    const CostMode mode = round % 2 == 0 ? CostMode::Expected : CostMode::Nominal;
    IlpSolveResult st;
    try {
      st = solve_static(inst, mode);
    } catch (const Error& e) {
      REQUIRE(e.kind() == Error::Kind::Inconsistent);
      REQUIRE(kind_of([&] { solve_compact(inst, mode); }) == Error::Kind::Inconsistent);
      continue;
    }
    ++feasible;
    const IlpSolveResult co = solve_compact(inst, mode);
    REQUIRE(co.cost_scaled == st.cost_scaled);

    const double slp = static_lp_value(inst, mode);
    const double clp = compact_lp_value(inst, mode);
    CHECK(clp <= slp + 1e-6 * std::max(1.0, std::fabs(slp)));

    if (round % 4 == 0) {
      CompactOptions stable;
      stable.stable_symmetry = true;
      CHECK(solve_compact(inst, mode, stable).cost_scaled == st.cost_scaled);
      CompactOptions xdev;
      xdev.x_deviation_rows = true;
      CHECK(solve_compact(inst, mode, xdev).cost_scaled == st.cost_scaled);
    }
  }
  REQUIRE(feasible >= 12);
}

TEST_CASE("sorted static optima embed feasibly into the compact model") {
  TestRng rng(0xfeedULL);
  int done = 0;
  for (int round = 0; round < 30 && done < 10; ++round) {
    // k up to 3 so spare slots beyond the used lot-types get exercised
    const Instance inst = random_tiny(rng, 3, 2, 2, 1, 2, 3, true);
    const CostMode mode = round % 2 == 0 ? CostMode::Expected : CostMode::Nominal;
    IlpSolveResult st;
    try {
      st = solve_static(inst, mode);
    } catch (const Error&) {
      continue;
    }
    ++done;
    for (int variant = 0; variant < 3; ++variant) {
      CompactOptions opt;
      opt.stable_symmetry = variant == 1;
      opt.x_deviation_rows = variant == 2;
      const CompactIlp cil = build_compact_model(inst, mode, opt);
      const std::vector<double> point = compact_embedding(cil, inst, st.solution);
      REQUIRE(rows_ok(cil.model, point, 1e-6));
      REQUIRE(cil.model.objective_value(point) == Catch::Approx(st.cost).margin(1e-6));
    }
  }
  REQUIRE(done == 10);
}

TEST_CASE("a coverable demand profile drives the compact relaxation to zero") {
  // every demand lies inside [min_c, max_c * max multiplicity], so fractional
  // multiplicity mixes can hit each demand cell exactly
  Instance inst = make_instance({{3, 4}, {5, 2}}, 1, 2, 0, 5, 0, 10, 12, 16, 1);
  CHECK(compact_lp_value(inst, CostMode::Nominal) == Catch::Approx(0.0).margin(1e-6));
  const IlpSolveResult co = solve_compact(inst, CostMode::Nominal);
  CHECK(co.cost == Catch::Approx(4.0));  // integral optimum stays well above the relaxation
  CHECK(solve_static(inst, CostMode::Nominal).cost_scaled == co.cost_scaled);
}

TEST_CASE("ordering weight overflow is refused unless the stable variant is on") {
  std::vector<std::vector<double>> demand(1, std::vector<double>(17, 1.0));
  Instance inst = make_instance(demand, 1, 1, 0, 9, 0, 153, 0, 500, 2);  // base 10, 17 digits
  CHECK(kind_of([&] { build_compact_model(inst, CostMode::Nominal); }) == Error::Kind::Guard);
  CompactOptions opt;
  opt.stable_symmetry = true;
  const CompactIlp cil = build_compact_model(inst, CostMode::Nominal, opt);
  CHECK(cil.model.num_vars() == 104);
  CHECK(cil.model.num_rows() == 178);
}

TEST_CASE("reference solvers are deterministic") {
  TestRng rng(0xdecafULL);
  const Instance inst = random_tiny(rng, 3, 2, 2, 1, 2, 2, true);
  const OracleResult o1 = oracle_solve(inst, CostMode::Expected);
  const OracleResult o2 = oracle_solve(inst, CostMode::Expected);
  REQUIRE(o1.cost_scaled == o2.cost_scaled);
  const IlpSolveResult s1 = solve_static(inst, CostMode::Expected);
  const IlpSolveResult s2 = solve_static(inst, CostMode::Expected);
  REQUIRE(s1.cost_scaled == s2.cost_scaled);
  const IlpSolveResult c1 = solve_compact(inst, CostMode::Expected);
  const IlpSolveResult c2 = solve_compact(inst, CostMode::Expected);
  REQUIRE(c1.cost_scaled == c2.cost_scaled);
  for (int b = 0; b < inst.num_branches(); ++b) {
    CHECK(o1.solution.per_branch[b].lot == o2.solution.per_branch[b].lot);
    CHECK(o1.solution.per_branch[b].mult == o2.solution.per_branch[b].mult);
    CHECK(s1.solution.per_branch[b].lot == s2.solution.per_branch[b].lot);
    CHECK(s1.solution.per_branch[b].mult == s2.solution.per_branch[b].mult);
    CHECK(c1.solution.per_branch[b].lot == c2.solution.per_branch[b].lot);
    CHECK(c1.solution.per_branch[b].mult == c2.solution.per_branch[b].mult);
  }
}
