#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mecoff/error.hpp"

namespace mecoff {

// Node ids are 1-based; node 1 is the launch module and node N the display
// module, both pinned to the client.
using NodeId = int;

struct TaskModule {
  NodeId id = 0;
  std::int64_t workload_cycles = 0;
  std::string name;
};

struct DataEdge {
  NodeId from = 0;
  NodeId to = 0;
  std::int64_t bits = 0;
};

// Neighbour reference stored in the adjacency lists.
struct Link {
  NodeId node = 0;
  std::size_t edge = 0;
};

/// Directed acyclic application graph.
///
/// Construction never throws: modules are sorted by id and edges by
/// (from, to), which is the canonical form used for serialization. Structural
/// problems are reported by validate_graph(); the algorithms in this library
/// assume a graph that passed validation.
class TaskGraph {
 public:
  TaskGraph() = default;

  TaskGraph(std::vector<TaskModule> modules, std::vector<DataEdge> edges,
            std::string description = {})
      : modules_(std::move(modules)), edges_(std::move(edges)), description_(std::move(description)) {
    std::stable_sort(modules_.begin(), modules_.end(),
                     [](const TaskModule& a, const TaskModule& b) { return a.id < b.id; });
    std::stable_sort(edges_.begin(), edges_.end(), [](const DataEdge& a, const DataEdge& b) {
      return std::pair(a.from, a.to) < std::pair(b.from, b.to);
    });
    contiguous_ = true;
    for (std::size_t i = 0; i < modules_.size(); ++i) {
      if (modules_[i].id != static_cast<NodeId>(i + 1)) contiguous_ = false;
      index_.emplace(modules_[i].id, i);
    }
    parents_.assign(modules_.size(), {});
    children_.assign(modules_.size(), {});
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto from = find(edges_[e].from);
      const auto to = find(edges_[e].to);
      if (!from || !to) continue;
      children_[*from].push_back({edges_[e].to, e});
      parents_[*to].push_back({edges_[e].from, e});
    }
  }

  [[nodiscard]] std::size_t size() const { return modules_.size(); }
  [[nodiscard]] NodeId last() const { return static_cast<NodeId>(modules_.size()); }
  [[nodiscard]] const std::vector<TaskModule>& modules() const { return modules_; }
  [[nodiscard]] const std::vector<DataEdge>& edges() const { return edges_; }
  [[nodiscard]] const std::string& description() const { return description_; }

  [[nodiscard]] const TaskModule& module(NodeId id) const { return modules_[pos(id)]; }
  [[nodiscard]] std::int64_t workload(NodeId id) const { return modules_[pos(id)].workload_cycles; }
  [[nodiscard]] std::span<const Link> parents(NodeId id) const { return parents_[pos(id)]; }
  [[nodiscard]] std::span<const Link> children(NodeId id) const { return children_[pos(id)]; }

  [[nodiscard]] bool is_interior(NodeId id) const { return id > 1 && id < last(); }

  [[nodiscard]] std::optional<std::size_t> edge_index(NodeId from, NodeId to) const {
    if (!find(from)) return std::nullopt;
    for (const auto& l : children(from)) {
      if (l.node == to) return l.edge;
    }
    return std::nullopt;
  }

  friend bool operator==(const TaskGraph& a, const TaskGraph& b) {
    auto mod_eq = [](const TaskModule& x, const TaskModule& y) {
      return x.id == y.id && x.workload_cycles == y.workload_cycles && x.name == y.name;
    };
    auto edge_eq = [](const DataEdge& x, const DataEdge& y) {
      return x.from == y.from && x.to == y.to && x.bits == y.bits;
    };
    return a.description_ == b.description_ &&
           std::equal(a.modules_.begin(), a.modules_.end(), b.modules_.begin(), b.modules_.end(), mod_eq) &&
           std::equal(a.edges_.begin(), a.edges_.end(), b.edges_.begin(), b.edges_.end(), edge_eq);
  }

 private:
  [[nodiscard]] std::optional<std::size_t> find(NodeId id) const {
    if (contiguous_) {
      if (id < 1 || id > last()) return std::nullopt;
      return static_cast<std::size_t>(id - 1);
    }
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  [[nodiscard]] std::size_t pos(NodeId id) const {
    if (contiguous_) return static_cast<std::size_t>(id - 1);
    return index_.at(id);
  }

  std::vector<TaskModule> modules_;
  std::vector<DataEdge> edges_;
  std::string description_;
  bool contiguous_ = true;
  std::map<NodeId, std::size_t> index_;
  std::vector<std::vector<Link>> parents_;
  std::vector<std::vector<Link>> children_;
};

struct GraphViolation {
  std::string code;
  std::string detail;
};

using ValidationReport = std::vector<GraphViolation>;

namespace detail {

// Kahn's algorithm over positions 0..size-1 with ties broken by ascending id.
// Returns the processed ids; fewer than size() entries means a cycle.
inline std::vector<NodeId> kahn(const TaskGraph& g) {
  std::map<NodeId, int> indegree;
  for (const auto& m : g.modules()) indegree[m.id] = 0;
  for (const auto& e : g.edges()) {
    if (indegree.count(e.from) && indegree.count(e.to) && e.from != e.to) ++indegree[e.to];
  }
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (const auto& [id, d] : indegree) {
    if (d == 0) ready.push(id);
  }
  std::vector<NodeId> order;
  order.reserve(g.size());
  while (!ready.empty()) {
    const NodeId n = ready.top();
    ready.pop();
    order.push_back(n);
    for (const auto& l : g.children(n)) {
      if (l.node == n) continue;
      if (--indegree[l.node] == 0) ready.push(l.node);
    }
  }
  return order;
}

}  // namespace detail

/// Lists every violated structural invariant; empty iff the graph is valid.
inline ValidationReport validate_graph(const TaskGraph& g) {
  ValidationReport report;
  auto add = [&](std::string code, std::string detail) {
    report.push_back({std::move(code), std::move(detail)});
  };
  const auto& mods = g.modules();
  if (mods.size() < 2) {
    add("too few nodes", "a graph needs at least the launch and display modules (N >= 2)");
  }

  std::set<NodeId> ids;
  for (const auto& m : mods) {
    if (!ids.insert(m.id).second) add("duplicate id", "node id " + std::to_string(m.id) + " repeats");
    if (m.workload_cycles < 0) add("negative workload", "node " + std::to_string(m.id));
  }
  bool contiguous = !ids.empty() && *ids.begin() == 1 && *ids.rbegin() == static_cast<NodeId>(ids.size()) &&
                    ids.size() == mods.size();
  if (!mods.empty() && !contiguous) add("non-contiguous ids", "node ids must form the range 1..N");

  const auto n = static_cast<NodeId>(mods.size());
  if (contiguous) {
    for (const auto& m : mods) {
      if (m.id > 1 && m.id < n && m.workload_cycles <= 0) {
        add("zero interior workload", "interior node " + std::to_string(m.id) + " needs a positive workload");
      }
    }
  }

  std::set<std::pair<NodeId, NodeId>> seen;
  for (const auto& e : g.edges()) {
    const std::string tag = std::to_string(e.from) + "->" + std::to_string(e.to);
    if (e.from == e.to) add("self loop", tag);
    if (!ids.count(e.from) || !ids.count(e.to)) add("unknown endpoint", tag);
    if (!seen.insert({e.from, e.to}).second) add("duplicate edge", tag);
    if (e.bits < 0) add("negative bits", tag);
  }

  if (detail::kahn(g).size() != mods.size() && ids.size() == mods.size()) {
    add("cycle detected", "the edge set contains a directed cycle");
  }

  if (contiguous && n >= 2) {
    if (!g.parents(1).empty()) add("first node has parents", "node 1 must be a source");
    if (!g.children(n).empty()) add("last node has children", "node N must be a sink");
  }
  return report;
}

/// Topological order with ties broken by ascending id. Throws on a cycle,
/// naming one edge that lies on it.
inline std::vector<NodeId> topological_order(const TaskGraph& g) {
  auto order = detail::kahn(g);
  if (order.size() == g.size()) return order;

  // Every unprocessed node keeps an unprocessed parent, so walking parents
  // from any of them must revisit a node.
  std::set<NodeId> done(order.begin(), order.end());
  NodeId cur = 0;
  for (const auto& m : g.modules()) {
    if (!done.count(m.id)) {
      cur = m.id;
      break;
    }
  }
  std::map<NodeId, NodeId> parent_of;
  while (!parent_of.count(cur)) {
    NodeId parent = cur;
    for (const auto& l : g.parents(cur)) {
      if (!done.count(l.node)) {
        parent = l.node;
        break;
      }
    }
    parent_of[cur] = parent;
    cur = parent;
  }
  // cur now lies on the cycle, entered from parent_of[cur].
  throw Error("cycle detected through edge " + std::to_string(parent_of[cur]) + "->" + std::to_string(cur));
}

}  // namespace mecoff
