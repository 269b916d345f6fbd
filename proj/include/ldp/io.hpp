#pragma once

// JSON I/O for instances and solutions ("ldp-1" format).
//
// Instance files:
//   { "format": "ldp-1",
//     "branches": ["b0", ...], "sizes": ["s0", ...],
//     "mult_min": 1, "mult_max": 5,
//     "min_c": 0, "max_c": 5, "min_t": 3, "max_t": 15,
//     "I_lower": 100, "I_upper": 140, "k": 5,
//     "nominal_scenario": 0,
//     "scenarios": [ { "p": 1.0, "demand": [[...one row per branch...]] } ] }
// Optional keys: demand_decimals (default 4), prob_decimals (default 6),
// metadata (free-form object, preserved).
//
// Solution files:
//   { "format": "ldp-1",
//     "assignments": [ { "branch": "b0", "lottype": [1,2,2,1], "mult": 2 } ],
//     "cost": 12.5, "total_pieces": 120 }

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ldp/instance.hpp"

namespace ldp {

namespace io_detail {

inline std::int64_t to_scaled(double value, std::int64_t scale, const char* what) {
  if (!(value >= 0.0) || value > 9.0e12)
    throw Error(Error::Kind::Io, std::string(what) + " out of range");
  const double scaled = value * static_cast<double>(scale);
  const std::int64_t r = std::llround(scaled);
  if (std::abs(scaled - static_cast<double>(r)) > 1e-3)
    throw Error(Error::Kind::Io,
                std::string(what) + " has more decimal digits than the declared precision");
  return r;
}

inline nlohmann::json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Error::Kind::Io, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(Error::Kind::Io, path + ": " + e.what());
  }
  return j;
}

inline void write_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Error::Kind::Io, "cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace io_detail

inline Instance instance_from_json(const nlohmann::json& j) {
  using nlohmann::json;
  if (!j.is_object() || j.value("format", "") != std::string("ldp-1"))
    throw Error(Error::Kind::Io, "not an ldp-1 instance file");
  Instance inst;
  try {
    inst.branch_ids = j.at("branches").get<std::vector<std::string>>();
    inst.size_ids = j.at("sizes").get<std::vector<std::string>>();
    inst.mult_min = j.at("mult_min").get<int>();
    inst.mult_max = j.at("mult_max").get<int>();
    inst.min_per_size = j.at("min_c").get<int>();
    inst.max_per_size = j.at("max_c").get<int>();
    inst.min_total = j.at("min_t").get<int>();
    inst.max_total = j.at("max_t").get<int>();
    inst.supply_min = j.at("I_lower").get<std::int64_t>();
    inst.supply_max = j.at("I_upper").get<std::int64_t>();
    inst.max_lot_types = j.at("k").get<int>();
    inst.nominal_scenario = j.value("nominal_scenario", 0);
    inst.demand_decimals = j.value("demand_decimals", 4);
    inst.prob_decimals = j.value("prob_decimals", 6);
    if (j.contains("metadata")) inst.metadata_json = j.at("metadata").dump();

    const auto& scen = j.at("scenarios");
    if (!scen.is_array() || scen.empty())
      throw Error(Error::Kind::Io, "scenarios must be a non-empty array");
    const int B = inst.num_branches();
    const int S = inst.num_sizes();
    for (const auto& sj : scen) {
      Scenario sc;
      sc.prob_scaled = io_detail::to_scaled(sj.at("p").get<double>(), inst.prob_scale(), "p");
      const auto& dm = sj.at("demand");
      if (static_cast<int>(dm.size()) != B)
        throw Error(Error::Kind::Io, "demand matrix must have one row per branch");
      sc.demand_scaled.reserve(static_cast<std::size_t>(B) * S);
      for (const auto& row : dm) {
        if (static_cast<int>(row.size()) != S)
          throw Error(Error::Kind::Io, "demand row must have one entry per size");
        for (const auto& cell : row)
          sc.demand_scaled.push_back(
              io_detail::to_scaled(cell.get<double>(), inst.demand_scale(), "demand"));
      }
      inst.scenarios.push_back(std::move(sc));
    }
  } catch (const json::exception& e) {
    throw Error(Error::Kind::Io, std::string("malformed instance: ") + e.what());
  }
  validate_instance(inst);
  return inst;
}

inline nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json j;
  j["format"] = "ldp-1";
  j["branches"] = inst.branch_ids;
  j["sizes"] = inst.size_ids;
  j["mult_min"] = inst.mult_min;
  j["mult_max"] = inst.mult_max;
  j["min_c"] = inst.min_per_size;
  j["max_c"] = inst.max_per_size;
  j["min_t"] = inst.min_total;
  j["max_t"] = inst.max_total;
  j["I_lower"] = inst.supply_min;
  j["I_upper"] = inst.supply_max;
  j["k"] = inst.max_lot_types;
  j["nominal_scenario"] = inst.nominal_scenario;
  j["demand_decimals"] = inst.demand_decimals;
  j["prob_decimals"] = inst.prob_decimals;
  if (!inst.metadata_json.empty()) j["metadata"] = nlohmann::json::parse(inst.metadata_json);
  nlohmann::json scen = nlohmann::json::array();
  const int B = inst.num_branches();
  const int S = inst.num_sizes();
  const double dscale = static_cast<double>(inst.demand_scale());
  for (const auto& sc : inst.scenarios) {
    nlohmann::json sj;
    sj["p"] = static_cast<double>(sc.prob_scaled) / static_cast<double>(inst.prob_scale());
    nlohmann::json dm = nlohmann::json::array();
    for (int b = 0; b < B; ++b) {
      nlohmann::json row = nlohmann::json::array();
      for (int s = 0; s < S; ++s)
        row.push_back(static_cast<double>(sc.demand_scaled[static_cast<std::size_t>(b) * S + s]) / dscale);
      dm.push_back(std::move(row));
    }
    sj["demand"] = std::move(dm);
    scen.push_back(std::move(sj));
  }
  j["scenarios"] = std::move(scen);
  return j;
}

inline Instance load_instance(const std::string& path) {
  return instance_from_json(io_detail::parse_file(path));
}

inline void save_instance(const Instance& inst, const std::string& path) {
  io_detail::write_file(path, instance_to_json(inst));
}

inline nlohmann::json solution_to_json(const Instance& inst, const Solution& sol, double cost) {
  nlohmann::json j;
  j["format"] = "ldp-1";
  nlohmann::json arr = nlohmann::json::array();
  for (int b = 0; b < inst.num_branches(); ++b) {
    const auto& a = sol.per_branch[b];
    nlohmann::json aj;
    aj["branch"] = inst.branch_ids[b];
    aj["lottype"] = a.lot;
    aj["mult"] = a.mult;
    arr.push_back(std::move(aj));
  }
  j["assignments"] = std::move(arr);
  j["cost"] = cost;
  j["total_pieces"] = total_pieces(sol);
  return j;
}

inline void save_solution(const Instance& inst, const Solution& sol, double cost,
                          const std::string& path) {
  io_detail::write_file(path, solution_to_json(inst, sol, cost));
}

// Returns the solution and the stored cost field.
inline std::pair<Solution, double> load_solution(const Instance& inst, const std::string& path) {
  const nlohmann::json j = io_detail::parse_file(path);
  if (!j.is_object() || j.value("format", "") != std::string("ldp-1"))
    throw Error(Error::Kind::Io, "not an ldp-1 solution file");
  Solution sol;
  sol.per_branch.assign(inst.num_branches(), Assignment{});
  std::vector<bool> seen(inst.num_branches(), false);
  try {
    for (const auto& aj : j.at("assignments")) {
      const std::string id = aj.at("branch").get<std::string>();
      const auto it = std::find(inst.branch_ids.begin(), inst.branch_ids.end(), id);
      if (it == inst.branch_ids.end())
        throw Error(Error::Kind::Io, "unknown branch id " + id);
      const int b = static_cast<int>(it - inst.branch_ids.begin());
      if (seen[b]) throw Error(Error::Kind::Io, "duplicate assignment for branch " + id);
      seen[b] = true;
      sol.per_branch[b].lot = aj.at("lottype").get<LotVec>();
      sol.per_branch[b].mult = aj.at("mult").get<int>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Error::Kind::Io, std::string("malformed solution: ") + e.what());
  }
  for (int b = 0; b < inst.num_branches(); ++b)
    if (!seen[b])
      throw Error(Error::Kind::Io, "missing assignment for branch " + inst.branch_ids[b]);
  return {sol, j.value("cost", 0.0)};
}

}  // namespace ldp
