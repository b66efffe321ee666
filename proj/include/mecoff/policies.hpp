#pragma once

#include <optional>
#include <string>

#include "mecoff/cg_solver.hpp"
#include "mecoff/error.hpp"
#include "mecoff/graph.hpp"
#include "mecoff/model.hpp"
#include "mecoff/schedule.hpp"

namespace mecoff {

/// Edges are exactly 1->2->...->N.
inline bool is_chain(const TaskGraph& g) {
  if (g.edges().size() + 1 != g.size()) return false;
  for (const auto& e : g.edges()) {
    if (e.to != e.from + 1) return false;
  }
  return true;
}

/// Node 1 feeds every interior node and each of them feeds node N; nothing
/// else.
inline bool is_fan(const TaskGraph& g) {
  const NodeId last = g.last();
  if (g.size() < 3) return false;
  if (g.edges().size() != 2 * (g.size() - 2)) return false;
  for (NodeId n = 2; n < last; ++n) {
    const auto ps = g.parents(n);
    const auto cs = g.children(n);
    if (ps.size() != 1 || ps[0].node != 1 || cs.size() != 1 || cs[0].node != last) return false;
  }
  return true;
}

struct PolicyResult {
  OffloadDecision decision;
  EnergyReport energy;
  std::string method;  // "sequential", "parallel" or "cg"
};

/// Best single contiguous offload window [u, v] of a chain, or none.
inline PolicyResult solve_sequential(const TaskGraph& g, const SystemParams& p) {
  if (!is_chain(g)) throw Error("solve_sequential: graph is not a chain 1->2->...->N");
  const auto order = topological_order(g);
  const NodeId last = g.last();

  std::optional<PolicyResult> best;
  auto consider = [&](const Assignment& loc) {
    const auto ec = earliest_completion(g, loc, p, order);
    if (!ec.feasible) return;
    const auto e = worst_case_expected_energy(g, loc, p);
    if (!best || e.psi < best->energy.psi) best = PolicyResult{make_decision(loc, ec), e, "sequential"};
  };

  consider(all_local(g));
  for (NodeId u = 2; u < last; ++u) {
    for (NodeId v = u; v < last; ++v) {
      auto loc = all_local(g);
      for (NodeId n = u; n <= v; ++n) loc[static_cast<std::size_t>(n - 1)] = Location::server;
      consider(loc);
    }
  }
  if (!best) throw InfeasibleError("solve_sequential: no offload window meets the deadline");
  return *best;
}

/// Offloads every interior node whose local energy exceeds its transfer
/// energy; falls back to column generation when that misses the deadline.
inline PolicyResult solve_parallel(const TaskGraph& g, const SystemParams& p, const CgOptions& fallback = {}) {
  if (!is_fan(g)) throw Error("solve_parallel: graph is not a fan 1->{2..N-1}->N");
  const NodeId last = g.last();
  auto loc = all_local(g);
  for (NodeId n = 2; n < last; ++n) {
    const auto up = g.edges()[*g.edge_index(1, n)].bits;
    const auto down = g.edges()[*g.edge_index(n, last)].bits;
    const double transfer = static_cast<double>(up) * p.theta_up + static_cast<double>(down) * p.theta_down;
    if (p.local_energy(g.workload(n)) > transfer) loc[static_cast<std::size_t>(n - 1)] = Location::server;
  }
  const auto ec = earliest_completion(g, loc, p);
  if (ec.feasible) return {make_decision(loc, ec), worst_case_expected_energy(g, loc, p), "parallel"};
  auto cg = solve(g, p, fallback);
  return {cg.decision, cg.energy, "cg"};
}

}  // namespace mecoff
