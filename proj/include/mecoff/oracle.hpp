#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "mecoff/error.hpp"
#include "mecoff/graph.hpp"
#include "mecoff/model.hpp"
#include "mecoff/schedule.hpp"

namespace mecoff {

inline constexpr std::size_t kOracleMaxNodes = 22;

struct OracleResult {
  double psi_star = std::numeric_limits<double>::infinity();
  OffloadDecision decision;
  EnergyReport energy;
  std::uint64_t assignments_enumerated = 0;
  std::uint64_t feasible_count = 0;
  std::uint64_t best_mask = 0;
  bool feasible = false;
};

/// Assignment with bit i of `mask` placing node i + 2 on the server.
inline Assignment assignment_from_mask(const TaskGraph& g, std::uint64_t mask) {
  auto loc = all_local(g);
  for (std::size_t i = 0; i + 2 < g.size(); ++i) {
    if (mask >> i & 1U) loc[i + 1] = Location::server;
  }
  return loc;
}

/// Exhaustive minimum of Psi over every interior location assignment that
/// meets the deadline under earliest completion. Ties go to the smallest
/// mask. Throws InfeasibleError when nothing is feasible.
inline OracleResult brute_force_optimum(const TaskGraph& g, const SystemParams& p) {
  if (g.size() > kOracleMaxNodes) {
    throw Error("brute_force_optimum: " + std::to_string(g.size()) + " nodes exceeds the cap of " +
                std::to_string(kOracleMaxNodes));
  }
  const auto order = topological_order(g);
  const std::uint64_t count = std::uint64_t{1} << (g.size() - 2);
  OracleResult r;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    const auto loc = assignment_from_mask(g, mask);
    ++r.assignments_enumerated;
    const auto ec = earliest_completion(g, loc, p, order);
    if (!ec.feasible) continue;
    ++r.feasible_count;
    const auto e = worst_case_expected_energy(g, loc, p);
    if (!r.feasible || e.psi < r.psi_star) {
      r.feasible = true;
      r.psi_star = e.psi;
      r.energy = e;
      r.decision = make_decision(loc, ec);
      r.best_mask = mask;
    }
  }
  if (!r.feasible) throw InfeasibleError("brute_force_optimum: no assignment meets the deadline");
  return r;
}

}  // namespace mecoff
