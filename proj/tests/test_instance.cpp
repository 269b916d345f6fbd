#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "ldp/instance.hpp"
#include "ldp/io.hpp"
#include "support.hpp"

using namespace ldp;
using namespace ldptest;

TEST_CASE("assignment cost hand values") {
  // zero deviation
  auto inst = make_instance({{2, 4}}, 1, 3, 0, 4, 0, 8, 0, 100, 1);
  CHECK(assignment_cost(inst, CostMode::Nominal, 0, {1, 2}, 2) == 0.0);
  CHECK(assignment_cost(inst, CostMode::Expected, 0, {1, 2}, 2) == 0.0);

  // fractional demands, single scenario
  auto inst2 = make_instance({{1.4, 2.6}}, 1, 3, 0, 4, 0, 8, 0, 100, 1);
  CHECK(assignment_cost(inst2, CostMode::Nominal, 0, {1, 2}, 1) == Catch::Approx(1.0));
  CHECK(assignment_cost(inst2, CostMode::Expected, 0, {1, 2}, 1) == Catch::Approx(1.0));

  // two equally likely scenarios
  auto inst3 = make_instance({{1, 2}}, 1, 3, 0, 4, 0, 8, 0, 100, 1);
  add_scenario(inst3, {{3, 2}});
  set_probabilities(inst3, {500000, 500000});
  CHECK(assignment_cost(inst3, CostMode::Expected, 0, {2, 2}, 1) == Catch::Approx(1.0));
  CHECK(assignment_cost(inst3, CostMode::Nominal, 0, {2, 2}, 1) == Catch::Approx(1.0));
}

TEST_CASE("assignment cost domain errors") {
  auto inst = make_instance({{2, 4}}, 1, 3, 0, 4, 2, 6, 0, 100, 1);
  CHECK_THROWS_AS(assignment_cost(inst, CostMode::Nominal, 0, {5, 0}, 1), Error);   // component too big
  CHECK_THROWS_AS(assignment_cost(inst, CostMode::Nominal, 0, {0, 1}, 1), Error);   // below min_t
  CHECK_THROWS_AS(assignment_cost(inst, CostMode::Nominal, 0, {1, 2}, 4), Error);   // mult out of range
  CHECK_THROWS_AS(assignment_cost(inst, CostMode::Nominal, 0, {1, 2, 1}, 1), Error);  // wrong arity
}

TEST_CASE("expected cost is the probability mix of scenario costs") {
  TestRng rng(7);
  auto inst = make_instance({{0, 0, 0}, {0, 0, 0}}, 1, 4, 0, 3, 1, 9, 0, 1000, 2);
  add_scenario(inst, {{0, 0, 0}, {0, 0, 0}});
  add_scenario(inst, {{0, 0, 0}, {0, 0, 0}});
  for (auto& sc : inst.scenarios)
    for (auto& d : sc.demand_scaled) d = rng.uniform(0, 12 * inst.demand_scale());
  set_probabilities(inst, {250000, 250000, 500000});

  for (int trial = 0; trial < 50; ++trial) {
    LotVec lot(3);
    do {
      for (auto& v : lot) v = static_cast<int>(rng.uniform(0, 3));
    } while (!is_applicable(inst, lot));
    const int m = static_cast<int>(rng.uniform(1, 4));
    for (int b = 0; b < 2; ++b) {
      CostInt mixed = 0;
      for (int w = 0; w < 3; ++w) {
        Instance probe = inst;
        probe.nominal_scenario = w;
        mixed += inst.scenarios[w].prob_scaled *
                 (assignment_cost_scaled(probe, CostMode::Nominal, b, lot, m) / inst.prob_scale());
      }
      CHECK(assignment_cost_scaled(inst, CostMode::Expected, b, lot, m) == mixed);
      CHECK(assignment_cost_scaled(inst, CostMode::Expected, b, lot, m) ==
            naive_assignment_cost(inst, CostMode::Expected, b, lot, m));
    }
  }
}

TEST_CASE("expected equals nominal on single-scenario instances") {
  TestRng rng(11);
  auto inst = make_instance({{3.5, 1.25}, {0.75, 2}}, 1, 3, 0, 4, 0, 8, 0, 100, 2);
  for (int trial = 0; trial < 25; ++trial) {
    LotVec lot = {static_cast<int>(rng.uniform(0, 4)), static_cast<int>(rng.uniform(0, 4))};
    const int m = static_cast<int>(rng.uniform(1, 3));
    for (int b = 0; b < 2; ++b)
      CHECK(assignment_cost_scaled(inst, CostMode::Expected, b, lot, m) ==
            assignment_cost_scaled(inst, CostMode::Nominal, b, lot, m));
  }
}

TEST_CASE("solution cost") {
  SECTION("empty branch set") {
    Instance inst;
    inst.size_ids = {"s0"};
    inst.mult_min = inst.mult_max = 1;
    inst.max_per_size = 2;
    inst.max_total = 2;
    inst.supply_max = 10;
    inst.max_lot_types = 1;
    Scenario sc;
    sc.prob_scaled = inst.prob_scale();
    inst.scenarios.push_back(sc);
    validate_instance(inst);
    Solution sol;
    auto [cost, pieces] = solution_cost(inst, CostMode::Nominal, sol);
    CHECK(cost == 0.0);
    CHECK(pieces == 0);
  }

  SECTION("additivity") {
    auto inst = make_instance({{1, 2}, {1, 2}}, 1, 3, 0, 4, 0, 8, 0, 100, 2);
    // each branch deviates by 1.0 and delivers 4 pieces
    Solution sol;
    sol.per_branch = {{{2, 2}, 1}, {{1, 3}, 1}};
    auto [cost, pieces] = solution_cost(inst, CostMode::Nominal, sol);
    CHECK(cost == Catch::Approx(2.0));
    CHECK(pieces == 8);
  }

  SECTION("matches naive recomputation on random tiny instances") {
    TestRng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::vector<double>> demand(3, std::vector<double>(2));
      for (auto& row : demand)
        for (auto& d : row) d = rng.uniform(0, 80) / 10.0;
      auto inst = make_instance(demand, 1, 2, 0, 4, 1, 8, 0, 1000, 3);
      Solution sol;
      CostInt want = 0;
      for (int b = 0; b < 3; ++b) {
        LotVec lot;
        do {
          lot = {static_cast<int>(rng.uniform(0, 4)), static_cast<int>(rng.uniform(0, 4))};
        } while (!is_applicable(inst, lot));
        const int m = static_cast<int>(rng.uniform(1, 2));
        sol.per_branch.push_back({lot, m});
        want += naive_assignment_cost(inst, CostMode::Nominal, b, lot, m);
      }
      CHECK(solution_cost_scaled(inst, CostMode::Nominal, sol).first == want);
    }
  }
}

TEST_CASE("solution structural checks") {
  auto inst = make_instance({{1, 2}, {1, 2}}, 1, 3, 0, 4, 0, 8, 4, 8, 1);
  Solution ok;
  ok.per_branch = {{{1, 1}, 1}, {{1, 1}, 2}};
  CHECK(check_solution(inst, ok).ok);
  Solution two_lots;
  two_lots.per_branch = {{{1, 1}, 1}, {{1, 2}, 1}};
  CHECK_FALSE(check_solution(inst, two_lots).ok);  // k = 1
  Solution window;
  window.per_branch = {{{1, 1}, 1}, {{0, 0}, 1}};
  CHECK_FALSE(check_solution(inst, window).ok);  // 2 pieces < supply_min
}

TEST_CASE("vss metrics") {
  auto inst = make_instance({{2, 2}}, 1, 2, 0, 4, 0, 8, 0, 100, 1);
  Solution sol;
  sol.per_branch = {{{2, 2}, 1}};
  SECTION("single scenario degenerates") {
    auto m = vss_metrics(inst, sol, solution_cost(inst, CostMode::Expected, sol).first);
    CHECK(m.vss == Catch::Approx(0.0));
    CHECK(m.ldp == Catch::Approx(m.eldp));
  }
  SECTION("zero expected cost flags degenerate relatives") {
    auto m = vss_metrics(inst, sol, 0.0);
    CHECK(m.degenerate);
    CHECK(m.rel_vss == 0.0);
    CHECK(m.gap_eldp == 0.0);
  }
}

TEST_CASE("instance validation rejects malformed data") {
  auto good = make_instance({{1, 2}}, 1, 3, 0, 4, 0, 8, 0, 100, 1);
  auto check_bad = [&](auto mutate) {
    Instance bad = good;
    mutate(bad);
    CHECK_THROWS_AS(validate_instance(bad), Error);
  };
  check_bad([](Instance& i) { i.mult_min = 0; });
  check_bad([](Instance& i) { i.max_per_size = -1; });
  check_bad([](Instance& i) { i.min_per_size = 3; i.max_per_size = 2; });
  check_bad([](Instance& i) { i.supply_min = 50; i.supply_max = 10; });
  check_bad([](Instance& i) { i.max_lot_types = 0; });
  check_bad([](Instance& i) { i.scenarios.clear(); });
  check_bad([](Instance& i) { i.scenarios[0].prob_scaled = i.prob_scale() / 2; });
  check_bad([](Instance& i) { i.scenarios[0].demand_scaled[0] = -1; });
  check_bad([](Instance& i) { i.nominal_scenario = 5; });
}

TEST_CASE("instance json roundtrip") {
  auto inst = make_instance({{1.4, 2.6}, {0.5, 3}}, 1, 5, 0, 5, 3, 9, 10, 30, 2);
  add_scenario(inst, {{2, 2}, {1, 1}});
  set_probabilities(inst, {333333, 666667});
  inst.metadata_json = "{\"note\":\"roundtrip\"}";

  const std::string path = "test_instance_roundtrip.json";
  save_instance(inst, path);
  const Instance back = load_instance(path);

  CHECK(back.branch_ids == inst.branch_ids);
  CHECK(back.size_ids == inst.size_ids);
  CHECK(back.mult_max == inst.mult_max);
  CHECK(back.supply_min == inst.supply_min);
  CHECK(back.supply_max == inst.supply_max);
  CHECK(back.max_lot_types == inst.max_lot_types);
  REQUIRE(back.num_scenarios() == 2);
  for (int w = 0; w < 2; ++w) {
    CHECK(back.scenarios[w].prob_scaled == inst.scenarios[w].prob_scaled);
    CHECK(back.scenarios[w].demand_scaled == inst.scenarios[w].demand_scaled);
  }
  CHECK(back.metadata_json == inst.metadata_json);

  // saving again must produce identical bytes
  const std::string path2 = "test_instance_roundtrip2.json";
  save_instance(back, path2);
  std::ifstream a(path), b(path2);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("solution json roundtrip") {
  auto inst = make_instance({{1, 2}, {3, 4}}, 1, 3, 0, 4, 0, 8, 0, 100, 2);
  Solution sol;
  sol.per_branch = {{{1, 2}, 1}, {{2, 2}, 3}};
  const double cost = solution_cost(inst, CostMode::Nominal, sol).first;
  const std::string path = "test_solution_roundtrip.json";
  save_solution(inst, sol, cost, path);
  auto [back, stored_cost] = load_solution(inst, path);
  CHECK(back.per_branch[0].lot == sol.per_branch[0].lot);
  CHECK(back.per_branch[1].mult == 3);
  CHECK(stored_cost == Catch::Approx(cost));
  std::remove(path.c_str());
}

TEST_CASE("cost tables agree with direct evaluation") {
  TestRng rng(31);
  std::vector<std::vector<double>> demand(4, std::vector<double>(3));
  for (auto& row : demand)
    for (auto& d : row) d = rng.uniform(0, 150) / 10.0;
  auto inst = make_instance(demand, 1, 4, 0, 4, 1, 10, 0, 1000, 2);
  add_scenario(inst, demand);
  for (auto& d : inst.scenarios[1].demand_scaled) d = rng.uniform(0, 15 * inst.demand_scale());
  set_probabilities(inst, {700000, 300000});

  for (CostMode mode : {CostMode::Nominal, CostMode::Expected}) {
    CostModel cm(inst, mode);
    for (int b = 0; b < 4; ++b) {
      for (int trial = 0; trial < 30; ++trial) {
        LotVec lot;
        do {
          lot = {static_cast<int>(rng.uniform(0, 4)), static_cast<int>(rng.uniform(0, 4)),
                 static_cast<int>(rng.uniform(0, 4))};
        } while (!is_applicable(inst, lot));
        const int m = static_cast<int>(rng.uniform(1, 4));
        CHECK(cm.lot_cost(b, lot, m) == naive_assignment_cost(inst, mode, b, lot, m));
      }
      // best multiplicity matches a brute scan, ties to the smaller m
      for (int trial = 0; trial < 10; ++trial) {
        LotVec lot;
        do {
          lot = {static_cast<int>(rng.uniform(0, 4)), static_cast<int>(rng.uniform(0, 4)),
                 static_cast<int>(rng.uniform(0, 4))};
        } while (!is_applicable(inst, lot));
        auto [bm, bc] = cm.best_multiplicity(b, lot);
        CostInt want = std::numeric_limits<CostInt>::max();
        int want_m = 0;
        for (int m = inst.mult_min; m <= inst.mult_max; ++m) {
          const CostInt c = naive_assignment_cost(inst, mode, b, lot, m);
          if (c < want) {
            want = c;
            want_m = m;
          }
        }
        CHECK(bc == want);
        CHECK(bm == want_m);
      }
      // suffix minima decompose into single-size minima
      for (int m = inst.mult_min; m <= inst.mult_max; ++m) {
        CostInt total = 0;
        for (int s = 2; s >= 0; --s) {
          CostInt best = std::numeric_limits<CostInt>::max();
          for (int v = 0; v <= 4; ++v) best = std::min(best, cm.size_cost(b, s, m, v));
          CHECK(cm.best_size_cost(b, s, m) == best);
          total += best;
          CHECK(cm.suffix_best(b, m, s) == total);
        }
      }
    }
  }
}
