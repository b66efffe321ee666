#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "mecoff/graph.hpp"
#include "mecoff/model.hpp"
#include "mecoff/params.hpp"

namespace mecoff {

struct Schedule {
  std::vector<std::int64_t> completion;  // indexed by id - 1
  bool feasible = false;                 // last node completes by the deadline
};

/// Earliest completion slot of every node for a fixed assignment:
/// EC(n) = max over parents m of (EC(m) + transfer) + exec(n).
inline Schedule earliest_completion(const TaskGraph& g, const Assignment& loc, const SystemParams& p,
                                    const std::vector<NodeId>& order) {
  Schedule s;
  s.completion.assign(g.size(), 0);
  for (NodeId n : order) {
    const auto ln = loc[static_cast<std::size_t>(n - 1)];
    std::int64_t ready = 0;
    for (const auto& l : g.parents(n)) {
      const auto lm = loc[static_cast<std::size_t>(l.node - 1)];
      ready = std::max(ready, s.completion[static_cast<std::size_t>(l.node - 1)] + transfer_slots(lm, ln, p));
    }
    s.completion[static_cast<std::size_t>(n - 1)] = ready + exec_slots_at(g, n, ln, p);
  }
  s.feasible = s.completion[static_cast<std::size_t>(g.last() - 1)] <= p.deadline_slots;
  return s;
}

inline Schedule earliest_completion(const TaskGraph& g, const Assignment& loc, const SystemParams& p) {
  return earliest_completion(g, loc, p, topological_order(g));
}

/// Latest completion slot of every node that still lets the last node finish
/// by the deadline. Nodes without children may finish as late as T.
inline std::vector<std::int64_t> latest_completion(const TaskGraph& g, const Assignment& loc, const SystemParams& p,
                                                   const std::vector<NodeId>& order) {
  std::vector<std::int64_t> lc(g.size(), p.deadline_slots);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId m = *it;
    const auto lm = loc[static_cast<std::size_t>(m - 1)];
    std::int64_t bound = p.deadline_slots;
    for (const auto& l : g.children(m)) {
      const auto lk = loc[static_cast<std::size_t>(l.node - 1)];
      bound = std::min(bound, lc[static_cast<std::size_t>(l.node - 1)] - exec_slots_at(g, l.node, lk, p) -
                                  transfer_slots(lm, lk, p));
    }
    lc[static_cast<std::size_t>(m - 1)] = bound;
  }
  return lc;
}

inline OffloadDecision make_decision(const Assignment& loc, const Schedule& s) { return {loc, s.completion}; }

}  // namespace mecoff
