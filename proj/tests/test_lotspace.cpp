#include <algorithm>
#include <map>
#include <set>

#include <catch2/catch_amalgamated.hpp>

#include "ldp/lotspace.hpp"
#include "support.hpp"

using namespace ldp;
using namespace ldptest;

TEST_CASE("lot-type counting matches closed-form reference values") {
  // values independently recomputed by dynamic programming over prefix sums
  CHECK(LotSpace(4, 0, 2, 4, 8).size() == 50);
  CHECK(LotSpace(4, 0, 5, 3, 15).size() == 1211);
  CHECK(LotSpace(7, 1, 3, 7, 14).size() == 1290);
  CHECK(LotSpace(12, 0, 5, 12, 30).size() == 1159533584LL);
}

TEST_CASE("counting agrees with explicit enumeration on small spaces") {
  TestRng rng(0x5eed0001u);
  for (int trial = 0; trial < 30; ++trial) {
    const int S = static_cast<int>(rng.uniform(1, 4));
    const int lo = static_cast<int>(rng.uniform(0, 2));
    const int hi = static_cast<int>(rng.uniform(lo, lo + 3));
    const int tlo = static_cast<int>(rng.uniform(0, S * hi));
    const int thi = static_cast<int>(rng.uniform(tlo, tlo + 4));
    const auto all = enumerate_lot_types(S, lo, hi, tlo, thi);
    LotSpace space(S, lo, hi, tlo, thi);
    CHECK(space.size() == static_cast<Count>(all.size()));
    for (const auto& lot : all) CHECK(space.contains(lot));
  }
}

TEST_CASE("rank and unrank form a lexicographic bijection") {
  LotSpace space(4, 0, 2, 4, 8);
  const auto all = enumerate_lot_types(4, 0, 2, 4, 8);  // emitted in lex order
  REQUIRE(all.size() == 50);
  for (std::size_t i = 0; i < all.size(); ++i) {
    CHECK(space.rank(all[i]) == static_cast<Count>(i));
    CHECK(space.unrank(static_cast<Count>(i)) == all[i]);
  }

  SECTION("large space roundtrip and order") {
    LotSpace big(12, 0, 5, 12, 30);
    TestRng rng(0x5eed0002u);
    LotVec prev;
    Count prev_rank = -1;
    for (int trial = 0; trial < 200; ++trial) {
      const Count r = rng.uniform(0, 1159533583LL);
      const LotVec lot = big.unrank(r);
      CHECK(big.contains(lot));
      CHECK(big.rank(lot) == r);
      if (prev_rank >= 0)
        CHECK((prev_rank < r) == std::lexicographical_compare(prev.begin(), prev.end(),
                                                              lot.begin(), lot.end()));
      prev = lot;
      prev_rank = r;
    }
  }

  SECTION("invalid arguments are rejected") {
    CHECK_THROWS_AS(space.rank({2, 2, 2, 2, 2}), Error);
    CHECK_THROWS_AS(space.rank({0, 0, 0, 0}), Error);  // total below window
    CHECK_THROWS_AS(space.unrank(-1), Error);
    CHECK_THROWS_AS(space.unrank(50), Error);
  }
}

TEST_CASE("oversized spaces are refused rather than overflowed") {
  CHECK_THROWS_AS(LotSpace(40, 0, 50, 0, 2000), Error);
}

TEST_CASE("completion bound is admissible and exact on full prefixes") {
  // S=3, per-size 0..2, totals 2..4, multiplicities 1..3
  Instance inst = make_instance({{1.5, 0.4, 2.2}}, 1, 3, 0, 2, 2, 4, 0, 100, 2);
  CostModel cm(inst, CostMode::Expected);
  const auto all = enumerate_lot_types(inst);
  REQUIRE_FALSE(all.empty());

  for (const auto& lot : all) {
    for (int m = inst.mult_min; m <= inst.mult_max; ++m) {
      // complete prefix: bound equals the true cost
      CHECK(completion_bound(cm, 0, lot, m) == cm.lot_cost(0, lot, m));
      // every prefix bounds every completion sharing it
      for (std::size_t j = 0; j <= lot.size(); ++j) {
        LotVec prefix(lot.begin(), lot.begin() + j);
        CHECK(completion_bound(cm, 0, prefix, m) <= cm.lot_cost(0, lot, m));
      }
    }
    for (std::size_t j = 0; j <= lot.size(); ++j) {
      LotVec prefix(lot.begin(), lot.begin() + j);
      const CostInt lb = completion_bound_best(cm, 0, prefix);
      for (int m = inst.mult_min; m <= inst.mult_max; ++m)
        CHECK(lb <= cm.lot_cost(0, lot, m));
    }
  }

  SECTION("empty prefix bound is the sum of single-size minima") {
    for (int m = inst.mult_min; m <= inst.mult_max; ++m) {
      CostInt expect = 0;
      for (int s = 0; s < inst.num_sizes(); ++s) expect += cm.best_size_cost(0, s, m);
      CHECK(completion_bound(cm, 0, {}, m) == expect);
    }
  }
}

namespace {

// brute-force reference: all applicable lot-types at their best multiplicity,
// sorted by (cost, lex), truncated to K
LocalBestList brute_loc_best(const CostModel& cm, int b, int K) {
  const Instance& inst = cm.instance();
  LocalBestList all;
  for (const auto& lot : enumerate_lot_types(inst)) {
    auto [m, c] = cm.best_multiplicity(b, lot);
    all.push_back({lot, m, c});
  }
  std::sort(all.begin(), all.end(), [](const LocalBest& a, const LocalBest& b) {
    return a.cost < b.cost || (a.cost == b.cost && a.lot < b.lot);
  });
  if (all.size() > static_cast<std::size_t>(K)) all.resize(K);
  return all;
}

}  // namespace

TEST_CASE("locally best search matches brute force including tie order") {
  TestRng rng(0x5eed0003u);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<double>> demand(2, std::vector<double>(4));
    for (auto& row : demand)
      for (double& d : row) d = rng.uniform(0, 59) / 10.0;
    Instance inst = make_instance(demand, 1, 3, 0, 2, 4, 8, 0, 1000, 2);
    for (auto mode : {CostMode::Nominal, CostMode::Expected}) {
      CostModel cm(inst, mode);
      for (int K : {1, 3, 10, 60}) {
        for (int b = 0; b < inst.num_branches(); ++b) {
          const auto got = find_loc_best_lottypes(cm, b, K);
          const auto want = brute_loc_best(cm, b, K);
          REQUIRE(got.size() == want.size());
          for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].lot == want[i].lot);
            CHECK(got[i].mult == want[i].mult);
            CHECK(got[i].cost == want[i].cost);
          }
        }
      }
    }
  }
}

TEST_CASE("locally best search finds exact-fit lot-types at zero cost") {
  // demand is exactly 2 * (1,2,1,2): zero deviation reachable
  Instance inst = make_instance({{2, 4, 2, 4}}, 1, 3, 0, 2, 4, 8, 0, 1000, 1);
  CostModel cm(inst, CostMode::Expected);
  SearchStats stats;
  const auto best = find_loc_best_lottypes(cm, 0, 1, &stats);
  REQUIRE(best.size() == 1);
  CHECK(best[0].cost == 0);
  CHECK(best[0].lot == LotVec{1, 2, 1, 2});
  CHECK(best[0].mult == 2);
  // bounds must prune: strictly fewer leaves than the 50 applicable lot-types
  CHECK(stats.leaves < 50);
}

TEST_CASE("multiplicity ties resolve toward the smaller multiplicity") {
  // d=(1,1), l=(1,1): m=1 and m=... cost |1-m|*2; m=1 is strictly best here,
  // so use d=(1.5,1.5) where m=1 and m=2 both cost 1.0 -> pick m=1
  Instance inst = make_instance({{1.5, 1.5}}, 1, 2, 0, 2, 1, 4, 0, 100, 1);
  CostModel cm(inst, CostMode::Expected);
  auto [m, c] = cm.best_multiplicity(0, {1, 1});
  CHECK(m == 1);
  CHECK(inst.cost_value(c) == Catch::Approx(1.0));
}

TEST_CASE("score table aggregates per-branch local ranks") {
  // two branches over the 50-lot space
  Instance inst = make_instance({{2, 4, 2, 4}, {4, 2, 4, 2}}, 1, 3, 0, 2, 4, 8, 0, 1000, 2);
  CostModel cm(inst, CostMode::Expected);
  LotSpace space(inst);
  const int K1 = 3, K2 = 4;
  const auto glb = generate_loc_best_lottypes(cm, space, K1, K2);

  REQUIRE(glb.per_branch.size() == 2);
  for (int b = 0; b < 2; ++b) {
    const auto want = brute_loc_best(cm, b, K1);
    REQUIRE(glb.per_branch[b].size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i)
      CHECK(glb.per_branch[b][i].lot == want[i].lot);
  }

  // independent scorer
  std::map<Count, std::int64_t> expect;
  for (int b = 0; b < 2; ++b) {
    std::int64_t w = 100;  // -10^(K1-j) for j = 1..K1
    for (const auto& e : brute_loc_best(cm, b, K1)) {
      expect[space.rank(e.lot)] -= w;
      w /= 10;
    }
  }
  REQUIRE(glb.table.entries.size() == expect.size());
  for (const auto& e : glb.table.entries) {
    REQUIRE(expect.count(e.rank) == 1);
    CHECK(e.score == expect[e.rank]);
    CHECK(space.unrank(e.rank) == e.lot);
  }
  // table sorted by (score, rank)
  for (std::size_t i = 1; i < glb.table.entries.size(); ++i) {
    const auto& a = glb.table.entries[i - 1];
    const auto& b = glb.table.entries[i];
    CHECK((a.score < b.score || (a.score == b.score && a.rank < b.rank)));
  }
  // seed = K2 best entries
  REQUIRE(glb.seed.size() == std::min<std::size_t>(K2, glb.table.entries.size()));
  for (std::size_t i = 0; i < glb.seed.size(); ++i) CHECK(glb.seed[i].rank == glb.table.entries[i].rank);

  SECTION("shared favourites dominate the table") {
    // both branches want exactly 2*(1,1,1,1) -> shared top lot scores -2*10^(K1-1)
    Instance shared = make_instance({{2, 2, 2, 2}, {2, 2, 2, 2}}, 1, 3, 0, 2, 4, 8, 0, 1000, 2);
    CostModel cm2(shared, CostMode::Expected);
    const auto g2 = generate_loc_best_lottypes(cm2, space, K1, 1);
    REQUIRE_FALSE(g2.table.entries.empty());
    CHECK(g2.table.entries[0].lot == LotVec{1, 1, 1, 1});
    CHECK(g2.table.entries[0].score == -200);
    CHECK(g2.seed.size() == 1);
  }
}

TEST_CASE("score table guards reject degenerate parameters") {
  Instance inst = make_instance({{1, 1}}, 1, 1, 0, 2, 1, 4, 0, 100, 1);
  CostModel cm(inst, CostMode::Expected);
  LotSpace space(inst);
  CHECK_THROWS_AS(generate_loc_best_lottypes(cm, space, 0, 1), Error);
  CHECK_THROWS_AS(generate_loc_best_lottypes(cm, space, 16, 1), Error);
  CHECK_THROWS_AS(generate_loc_best_lottypes(cm, space, 3, 0), Error);
  CHECK_THROWS_AS(find_loc_best_lottypes(cm, 0, 0), Error);
}
