#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mecoff/error.hpp"
#include "mecoff/graph.hpp"
#include "mecoff/params.hpp"
#include "mecoff/traces.hpp"

namespace mecoff {

enum class Location { client, server };

inline const char* to_string(Location l) { return l == Location::client ? "client" : "server"; }

using Assignment = std::vector<Location>;

/// One (location, completion slot) pair per node, indexed by id - 1.
struct OffloadDecision {
  Assignment location;
  std::vector<std::int64_t> slot;

  [[nodiscard]] Location at(NodeId n) const { return location[static_cast<std::size_t>(n - 1)]; }
  [[nodiscard]] std::int64_t slot_of(NodeId n) const { return slot[static_cast<std::size_t>(n - 1)]; }
  [[nodiscard]] bool on_server(NodeId n) const { return at(n) == Location::server; }
  [[nodiscard]] std::size_t offloaded_count() const {
    std::size_t c = 0;
    for (auto l : location) c += l == Location::server;
    return c;
  }

  friend bool operator==(const OffloadDecision&, const OffloadDecision&) = default;
};

inline Assignment all_local(const TaskGraph& g) { return Assignment(g.size(), Location::client); }

struct EnergyReport {
  double psi = 0;
  double local_exec_energy = 0;
  double uplink_energy = 0;
  double downlink_energy = 0;
};

/// Worst-case expected client energy of a location assignment.
inline EnergyReport worst_case_expected_energy(const TaskGraph& g, const Assignment& loc, const SystemParams& p) {
  EnergyReport r;
  for (const auto& m : g.modules()) {
    if (loc[static_cast<std::size_t>(m.id - 1)] == Location::client) r.local_exec_energy += p.local_energy(m.workload_cycles);
  }
  for (const auto& e : g.edges()) {
    const auto a = loc[static_cast<std::size_t>(e.from - 1)];
    const auto b = loc[static_cast<std::size_t>(e.to - 1)];
    if (a == Location::client && b == Location::server) r.uplink_energy += static_cast<double>(e.bits) * p.theta_up;
    if (a == Location::server && b == Location::client) r.downlink_energy += static_cast<double>(e.bits) * p.theta_down;
  }
  r.psi = r.local_exec_energy + r.uplink_energy + r.downlink_energy;
  return r;
}

inline EnergyReport worst_case_expected_energy(const TaskGraph& g, const OffloadDecision& d, const SystemParams& p) {
  return worst_case_expected_energy(g, d.location, p);
}

inline std::int64_t exec_slots_at(const TaskGraph& g, NodeId n, Location l, const SystemParams& p) {
  return l == Location::client ? p.client_slots(g.workload(n)) : p.server_slots(g.workload(n));
}

// Slots a transfer along (from, to) occupies under the given endpoint locations.
inline std::int64_t transfer_slots(Location from, Location to, const SystemParams& p) {
  if (from == Location::client && to == Location::server) return p.z_up_slots();
  if (from == Location::server && to == Location::client) return p.z_down_slots();
  return 0;
}

/// b^{c,s}_{m,n}: completion gap minus the server execution time of n.
inline std::int64_t dependency_bound_upload(const TaskGraph& g, const OffloadDecision& d, NodeId m, NodeId n,
                                            const SystemParams& p) {
  return d.slot_of(n) - d.slot_of(m) - p.server_slots(g.workload(n));
}

/// b^{s,c}_{m,n}: completion gap minus the client execution time of n.
inline std::int64_t dependency_bound_download(const TaskGraph& g, const OffloadDecision& d, NodeId m, NodeId n,
                                              const SystemParams& p) {
  return d.slot_of(n) - d.slot_of(m) - p.client_slots(g.workload(n));
}

struct ConstraintViolation {
  std::string code;
  NodeId from = 0;
  NodeId to = 0;
  std::string detail;
};

/// Every violated MP constraint. Codes: "shape", "location", "slot-range",
/// "deadline", "start", "dependency".
inline std::vector<ConstraintViolation> check_constraints(const TaskGraph& g, const OffloadDecision& d,
                                                          const SystemParams& p) {
  std::vector<ConstraintViolation> out;
  const std::size_t n = g.size();
  if (d.location.size() != n || d.slot.size() != n) {
    out.push_back({"shape", 0, 0, "decision does not cover every node"});
    return out;
  }
  const NodeId last = g.last();
  if (d.at(1) != Location::client) out.push_back({"location", 1, 1, "node 1 must run on the client"});
  if (d.at(last) != Location::client) out.push_back({"location", last, last, "last node must run on the client"});

  const std::int64_t T = p.deadline_slots;
  for (const auto& m : g.modules()) {
    const auto s = d.slot_of(m.id);
    if (s < 0 || (s > T && m.id != last)) {
      out.push_back({"slot-range", m.id, m.id, "slot " + std::to_string(s) + " outside 0.." + std::to_string(T)});
    }
  }
  if (d.slot_of(last) > T) {
    out.push_back({"deadline", last, last, "completes at " + std::to_string(d.slot_of(last)) + " > " + std::to_string(T)});
  }

  for (const auto& m : g.modules()) {
    if (!g.parents(m.id).empty()) continue;
    const auto need = exec_slots_at(g, m.id, d.at(m.id), p);
    if (d.slot_of(m.id) < need) {
      out.push_back({"start", m.id, m.id, "completes before its own execution time " + std::to_string(need)});
    }
  }

  for (const auto& e : g.edges()) {
    const auto lm = d.at(e.from), ln = d.at(e.to);
    const auto gap = d.slot_of(e.to) - d.slot_of(e.from) - exec_slots_at(g, e.to, ln, p);
    const auto need = transfer_slots(lm, ln, p);
    if (gap < need) {
      out.push_back({"dependency", e.from, e.to,
                     "gap " + std::to_string(gap) + " < required transfer " + std::to_string(need)});
    }
  }
  return out;
}

/// Client energy realized along one trace: local execution plus P*o/R for
/// every cross-boundary edge, consuming one row per such edge in canonical
/// edge order.
inline double realized_energy(const TaskGraph& g, const OffloadDecision& d, const SystemParams& p,
                              const std::vector<TraceRow>& rows, std::size_t first_row = 0) {
  double e = 0;
  for (const auto& m : g.modules()) {
    if (d.at(m.id) == Location::client) e += p.local_energy(m.workload_cycles);
  }
  std::size_t next = first_row;
  for (const auto& edge : g.edges()) {
    const auto a = d.at(edge.from), b = d.at(edge.to);
    if (a == b) continue;
    if (next >= rows.size()) throw Error("realized_energy: trace exhausted");
    const auto& r = rows[next++];
    const double o = static_cast<double>(edge.bits);
    e += a == Location::client ? r.power_up_mw * o / r.rate_up_bps : r.power_down_mw * o / r.rate_down_bps;
  }
  return e;
}

}  // namespace mecoff
