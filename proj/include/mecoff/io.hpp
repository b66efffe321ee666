#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mecoff/cg_solver.hpp"
#include "mecoff/error.hpp"
#include "mecoff/graph.hpp"
#include "mecoff/model.hpp"
#include "mecoff/oracle.hpp"
#include "mecoff/simulator.hpp"

namespace mecoff {

inline nlohmann::ordered_json nodes_to_json(const OffloadDecision& d) {
  auto arr = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < d.location.size(); ++i) {
    arr.push_back({{"id", static_cast<NodeId>(i + 1)}, {"location", to_string(d.location[i])}, {"slot", d.slot[i]}});
  }
  return arr;
}

inline nlohmann::ordered_json energy_to_json(const EnergyReport& e) {
  return {{"local_exec", e.local_exec_energy}, {"uplink", e.uplink_energy}, {"downlink", e.downlink_energy}};
}

inline nlohmann::ordered_json decision_to_json(const CgResult& r, const std::string& unit) {
  nlohmann::ordered_json j;
  j["psi"] = r.energy.psi;
  j["psi_lower"] = r.bounds.psi_lower;
  j["psi_upper"] = r.bounds.psi_upper;
  j["epsilon"] = r.epsilon;
  j["iterations"] = r.iterations;
  j["exit"] = to_string(r.exit);
  j["energy_unit"] = unit;
  j["energy"] = energy_to_json(r.energy);
  j["nodes"] = nodes_to_json(r.decision);
  return j;
}

/// Same layout for decisions that carry no bounds (exact policies).
inline nlohmann::ordered_json exact_decision_to_json(const OffloadDecision& d, const EnergyReport& e,
                                                     const std::string& method, const std::string& unit) {
  nlohmann::ordered_json j;
  j["psi"] = e.psi;
  j["psi_lower"] = e.psi;
  j["psi_upper"] = e.psi;
  j["epsilon"] = 0.0;
  j["iterations"] = 0;
  j["exit"] = method;
  j["energy_unit"] = unit;
  j["energy"] = energy_to_json(e);
  j["nodes"] = nodes_to_json(d);
  return j;
}

inline nlohmann::ordered_json oracle_to_json(const OracleResult& r, const std::string& unit) {
  auto j = exact_decision_to_json(r.decision, r.energy, "oracle", unit);
  j["assignments_enumerated"] = r.assignments_enumerated;
  j["feasible_count"] = r.feasible_count;
  return j;
}

/// Reads the "nodes" array of a decision document.
inline OffloadDecision decision_from_json(const nlohmann::json& j, const TaskGraph& g) {
  OffloadDecision d;
  d.location.assign(g.size(), Location::client);
  d.slot.assign(g.size(), 0);
  std::vector<bool> seen(g.size(), false);
  try {
    for (const auto& node : j.at("nodes")) {
      const auto id = node.at("id").get<NodeId>();
      if (id < 1 || id > g.last()) throw ParseError("decision: node id " + std::to_string(id) + " out of range");
      const auto loc = node.at("location").get<std::string>();
      if (loc != "client" && loc != "server") throw ParseError("decision: bad location '" + loc + "'");
      const auto i = static_cast<std::size_t>(id - 1);
      d.location[i] = loc == "client" ? Location::client : Location::server;
      d.slot[i] = node.at("slot").get<std::int64_t>();
      seen[i] = true;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("decision: ") + e.what());
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw ParseError("decision: node " + std::to_string(i + 1) + " missing");
  }
  return d;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string iteration_log_csv(const std::vector<IterationRecord>& log) {
  std::ostringstream os;
  os << "iter,psi_upper,psi_lower,r_underbar,admitted_node\n";
  for (const auto& r : log) {
    os << r.iter << ',' << format_double(r.psi_upper) << ',' << format_double(r.psi_lower) << ','
       << format_double(r.r_underbar) << ',' << r.admitted_node << '\n';
  }
  return os.str();
}

inline nlohmann::ordered_json sim_report_to_json(const SimReport& r, const std::string& unit) {
  nlohmann::ordered_json j;
  j["replications"] = r.replications;
  j["energy_unit"] = unit;
  j["mean_energy"] = r.mean_energy;
  j["energy_stddev"] = r.energy_stddev;
  j["energy_quantiles"] = {{"min", r.energy_min}, {"p05", r.energy_p05}, {"p50", r.energy_p50},
                           {"p95", r.energy_p95}, {"max", r.energy_max}};
  j["mean_completion_slots"] = r.mean_completion_slots;
  j["deadline_violation_rate"] = r.deadline_violation_rate;
  auto edges = nlohmann::ordered_json::array();
  for (const auto& e : r.edges) {
    edges.push_back({{"from", e.from},
                     {"to", e.to},
                     {"direction", e.uplink ? "up" : "down"},
                     {"z_s", e.z_s},
                     {"events", e.events},
                     {"exceedances", e.exceedances},
                     {"exceedance_rate", e.rate()}});
  }
  j["edges"] = edges;
  return j;
}

inline std::string dump_json(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace mecoff
