#include <algorithm>
#include <set>

#include <catch2/catch_amalgamated.hpp>

#include "ldp/generator.hpp"
#include "ldp/heuristics.hpp"
#include "support.hpp"

using namespace ldp;
using namespace ldptest;

TEST_CASE("average construction hand trace: first branch forced to the ceil lot") {
  // averages 1.5 per size -> lo=(1,1), hi=(2,2); window [6,8] makes the
  // undershoot guard fire at branch 0: 0 + |lo| + 1*|hi| = 6 <= 6
  Instance inst = make_instance({{1.5, 1.5}, {1.5, 1.5}}, 1, 1, 1, 2, 2, 4, 6, 8, 2);
  const Solution sol = alh(inst);
  REQUIRE(sol.per_branch.size() == 2);
  CHECK(sol.per_branch[0].lot == LotVec{2, 2});
  CHECK(sol.per_branch[0].mult == 1);
  CHECK(check_solution(inst, sol).ok);
}

TEST_CASE("average construction is exact on uniform demand") {
  Instance inst = make_instance(
      {{2, 2, 2, 2}, {2, 2, 2, 2}, {2, 2, 2, 2}}, 1, 2, 0, 2, 4, 8, 0, 1000, 2);
  const Solution sol = alh(inst);
  for (const auto& a : sol.per_branch) {
    CHECK(a.lot == LotVec{2, 2, 2, 2});
    CHECK(a.mult == 1);
  }
  CHECK(solution_cost_scaled(inst, CostMode::Expected, sol).first == 0);
}

TEST_CASE("average construction rejections") {
  Instance ok = make_instance({{1, 1}, {1, 1}}, 1, 2, 0, 2, 1, 4, 0, 100, 1);
  CHECK_THROWS_AS(alh(ok), Error);  // k = 1 is out of contract

  // width one less than the lot-type flexibility: cardinality clause fails
  Instance narrow = make_instance({{1, 1}, {1, 1}}, 1, 1, 0, 2, 1, 4, 4, 6, 2);
  CHECK_THROWS_WITH(alh(narrow), Catch::Matchers::ContainsSubstring("cardinality"));

  // window excludes the nominal demand: demand clause fails
  Instance off = make_instance({{1, 1}, {1, 1}}, 1, 1, 0, 2, 1, 4, 6, 9, 2);
  CHECK_THROWS_WITH(alh(off), Catch::Matchers::ContainsSubstring("demand"));
}

TEST_CASE("consistency clauses fire separately") {
  SECTION("supply floor above the window cap means infeasible") {
    // every assignment carries at least B*min_t = 4 pieces > I_upper = 3
    Instance inst = make_instance({{0.1, 0.1}, {0.1, 0.1}}, 1, 1, 0, 2, 2, 2, 0, 3, 2);
    const auto rep = check_consistency(inst);
    CHECK_FALSE(rep.feasible);
    CHECK(rep.demand_consistent);
    CHECK(rep.cardinality_consistent);
    CHECK_FALSE(rep.consistent);
    CHECK(rep.detail.find("feasibility") != std::string::npos);
  }

  SECTION("centred demand with a wide window is consistent") {
    Instance inst = make_instance({{1, 1}, {1, 1}}, 1, 2, 0, 2, 1, 4, 2, 6, 2);
    // total demand 4 = (2+6)/2, width 4 >= 3
    const auto rep = check_consistency(inst);
    CHECK(rep.consistent);
    REQUIRE(rep.witness.has_value());
    CHECK(check_solution(inst, *rep.witness).ok);
  }

  SECTION("window one narrower than the flexibility fails cardinality") {
    Instance inst = make_instance({{1, 1}, {1, 1}}, 1, 1, 0, 2, 1, 4, 3, 5, 2);
    const auto rep = check_consistency(inst);
    CHECK_FALSE(rep.cardinality_consistent);
    CHECK_FALSE(rep.consistent);
  }

  SECTION("k=1 single lot-type scan") {
    // only lot (2): totals are multiples of 2; window [5,6] contains 6
    Instance yes = make_instance({{2.5}, {2.5}}, 1, 2, 2, 2, 2, 2, 5, 6, 1);
    const auto rep = check_consistency(yes);
    CHECK(rep.feasible);
    REQUIRE(rep.witness.has_value());
    CHECK(check_solution(yes, *rep.witness).ok);

    // multiplicity 1 only: the unique total 4 misses [5,6]
    Instance no = make_instance({{2.5}, {2.5}}, 1, 1, 2, 2, 2, 2, 5, 6, 1);
    CHECK_FALSE(check_consistency(no).feasible);
  }
}

TEST_CASE("average construction stays feasible on generated instances") {
  // four parameter families, 250 instances each
  std::vector<GenSpec> families(4);
  families[0] = GenSpec{};  // classic small: 10 branches, 4 sizes, 0..2, 4..8
  families[1].branches = 8;
  families[1].sizes = 4;
  families[1].mults = 5;
  families[1].min_per_size = 0;
  families[1].max_per_size = 5;
  families[1].min_total = 3;
  families[1].max_total = 15;
  families[1].max_lot_types = 5;
  families[2].branches = 3;
  families[2].sizes = 2;
  families[2].mults = 2;
  families[2].min_per_size = 1;
  families[2].max_per_size = 3;
  families[2].min_total = 2;
  families[2].max_total = 5;
  families[2].max_lot_types = 2;
  families[3].branches = 20;
  families[3].sizes = 7;
  families[3].mults = 3;
  families[3].min_per_size = 1;
  families[3].max_per_size = 3;
  families[3].min_total = 7;
  families[3].max_total = 14;
  families[3].max_lot_types = 4;

  int feasible_runs = 0;
  for (auto spec : families) {
    for (int i = 0; i < 250; ++i) {
      spec.seed = 777;
      spec.index = i;
      const Instance inst = gen_random(spec);
      const Solution sol = alh(inst);
      const auto chk = check_solution(inst, sol);
      REQUIRE(chk.ok);
      // at most two lot-types, one shared multiplicity
      std::set<LotVec> lots;
      std::set<int> mults;
      for (const auto& a : sol.per_branch) {
        lots.insert(a.lot);
        mults.insert(a.mult);
      }
      CHECK(lots.size() <= 2);
      CHECK(mults.size() == 1);
      ++feasible_runs;
    }
  }
  CHECK(feasible_runs == 1000);
}

TEST_CASE("average construction survives adversarial tiny configurations") {
  TestRng rng(0x5eedA1B2u);
  int consistent_seen = 0;
  for (int trial = 0; trial < 4000; ++trial) {
    const int S = static_cast<int>(rng.uniform(1, 3));
    const int B = static_cast<int>(rng.uniform(1, 6));
    const int lo = static_cast<int>(rng.uniform(0, 2));
    const int hi = static_cast<int>(rng.uniform(lo, lo + 2));
    int tlo = static_cast<int>(rng.uniform(S * lo, S * hi));
    int thi = static_cast<int>(rng.uniform(tlo, S * hi));
    const int mlo = static_cast<int>(rng.uniform(1, 2));
    const int mhi = static_cast<int>(rng.uniform(mlo, 3));
    std::vector<std::vector<double>> demand(B, std::vector<double>(S));
    for (auto& row : demand)
      for (double& d : row) d = rng.uniform(0, hi * mhi * 10) / 10.0;
    const std::int64_t wlo = rng.uniform(0, B * thi * mhi);
    const std::int64_t whi = rng.uniform(wlo, B * thi * mhi + 2);
    Instance inst;
    try {
      inst = make_instance(demand, mlo, mhi, lo, hi, tlo, thi, wlo, whi, 2);
    } catch (const Error&) {
      continue;  // invalid parameter draw
    }
    const auto rep = check_consistency(inst);
    if (!rep.consistent) continue;
    ++consistent_seen;
    const Solution sol = alh(inst);
    CHECK(check_solution(inst, sol).ok);
  }
  CHECK(consistent_seen > 200);  // the sweep must actually exercise the guards
}

namespace {

// independent k=1 reference: every applicable lot-type, exact multiplicity
// assignment by dynamic programming over the multiplicity sum
CostInt brute_k1_optimum(const Instance& inst, CostMode mode) {
  const int B = inst.num_branches();
  const int M = inst.num_mults();
  const CostInt inf = std::numeric_limits<CostInt>::max();
  CostInt best = inf;
  for (const auto& lot : enumerate_lot_types(inst)) {
    long long t = 0;
    for (int v : lot) t += v;
    std::vector<std::vector<CostInt>> dp(
        B + 1, std::vector<CostInt>(static_cast<std::size_t>(B) * (M - 1) + 1, inf));
    dp[0][0] = 0;
    for (int b = 0; b < B; ++b)
      for (std::size_t sig = 0; sig <= static_cast<std::size_t>(b) * (M - 1); ++sig) {
        if (dp[b][sig] == inf) continue;
        for (int mi = 0; mi < M; ++mi) {
          const CostInt c =
              dp[b][sig] + naive_assignment_cost(inst, mode, b, lot, inst.mult_min + mi);
          if (c < dp[b + 1][sig + mi]) dp[b + 1][sig + mi] = c;
        }
      }
    for (std::size_t sig = 0; sig <= static_cast<std::size_t>(B) * (M - 1); ++sig) {
      if (dp[B][sig] == inf) continue;
      const std::int64_t pieces =
          (static_cast<std::int64_t>(B) * inst.mult_min + static_cast<std::int64_t>(sig)) * t;
      if (pieces < inst.supply_min || pieces > inst.supply_max) continue;
      best = std::min(best, dp[B][sig]);
    }
  }
  return best;
}

SfaResult run_sfa(const Instance& inst, CostMode mode, int K1 = 3) {
  CostModel cm(inst, mode);
  LotSpace space(inst);
  const auto glb = generate_loc_best_lottypes(cm, space, K1, 10);
  return sfa(inst, mode, glb);
}

}  // namespace

TEST_CASE("score-fix-adjust equals the exact optimum for one lot-type") {
  TestRng rng(0x5eedC0DEu);
  for (int trial = 0; trial < 12; ++trial) {
    const int B = static_cast<int>(rng.uniform(2, 4));
    std::vector<std::vector<double>> demand(B, std::vector<double>(3));
    for (auto& row : demand)
      for (double& d : row) d = rng.uniform(0, 60) / 10.0;
    std::int64_t total = 0;
    for (const auto& row : demand)
      for (double d : row) total += static_cast<std::int64_t>(d);
    Instance inst =
        make_instance(demand, 1, 3, 0, 2, 2, 6, std::max<std::int64_t>(0, total / 2),
                      total + 6, 1);
    if (!check_consistency(inst).consistent) continue;
    for (auto mode : {CostMode::Nominal, CostMode::Expected}) {
      const auto res = run_sfa(inst, mode);
      CHECK(check_solution(inst, res.solution).ok);
      CHECK(res.cost_scaled == brute_k1_optimum(inst, mode));
      CHECK(solution_cost_scaled(inst, mode, res.solution).first == res.cost_scaled);
    }
  }
}

TEST_CASE("score-fix-adjust finds the zero-cost subset without adjusting") {
  // branches split between 2*(1,2) and 1*(2,1); both lots score on top
  Instance inst =
      make_instance({{2, 4}, {2, 1}, {2, 4}, {2, 1}}, 1, 2, 1, 2, 3, 4, 0, 100, 2);
  const auto res = run_sfa(inst, CostMode::Expected);
  CHECK(res.cost_scaled == 0);
  CHECK(check_solution(inst, res.solution).ok);
}

TEST_CASE("score-fix-adjust properties on generated instances") {
  GenSpec spec;
  spec.branches = 6;
  spec.sizes = 3;
  spec.mults = 3;
  spec.min_per_size = 0;
  spec.max_per_size = 3;
  spec.min_total = 2;
  spec.max_total = 7;
  spec.max_lot_types = 3;
  spec.seed = 4242;

  for (int i = 0; i < 60; ++i) {
    spec.index = i;
    const Instance inst = gen_random(spec);
    const Solution seed_sol = alh(inst);
    const CostInt seed_cost =
        solution_cost_scaled(inst, CostMode::Expected, seed_sol).first;
    const auto res = run_sfa(inst, CostMode::Expected);
    CHECK(check_solution(inst, res.solution).ok);
    CHECK(res.cost_scaled <= seed_cost);  // the seed is kept as incumbent
    CHECK(res.seeded_by_alh);
    CHECK(solution_cost_scaled(inst, CostMode::Expected, res.solution).first ==
          res.cost_scaled);
  }
}

TEST_CASE("score-fix-adjust is deterministic") {
  GenSpec spec;
  spec.branches = 8;
  spec.sizes = 4;
  spec.seed = 99;
  const Instance inst = gen_random(spec);
  const auto a = run_sfa(inst, CostMode::Expected);
  const auto b = run_sfa(inst, CostMode::Expected);
  CHECK(a.cost_scaled == b.cost_scaled);
  CHECK(a.subsets_tried == b.subsets_tried);
  CHECK(a.work == b.work);
  REQUIRE(a.solution.per_branch.size() == b.solution.per_branch.size());
  for (std::size_t i = 0; i < a.solution.per_branch.size(); ++i) {
    CHECK(a.solution.per_branch[i].lot == b.solution.per_branch[i].lot);
    CHECK(a.solution.per_branch[i].mult == b.solution.per_branch[i].mult);
  }
}

TEST_CASE("score-fix-adjust refuses inconsistent input naming the clause") {
  Instance inst = make_instance({{1, 1}, {1, 1}}, 1, 1, 0, 2, 1, 4, 6, 9, 2);
  CostModel cm(inst, CostMode::Expected);
  LotSpace space(inst);
  const auto glb = generate_loc_best_lottypes(cm, space, 3, 5);
  CHECK_THROWS_WITH(sfa(inst, CostMode::Expected, glb),
                    Catch::Matchers::ContainsSubstring("demand"));
}
