#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "mecoff/mecoff.hpp"

namespace testing_support {

using namespace mecoff;

// Unit-scale parameters: one cycle per slot on the client, two on the
// server, so small instances have short, hand-checkable schedules.
inline SystemParams unit_params(Rng& rng, std::int64_t deadline = 40) {
  SystemParams p;
  p.f_c_hz = 1.0;
  p.f_s_hz = 2.0;
  p.kappa = 1.0;
  p.delta_s = 1.0;
  p.deadline_slots = deadline;
  p.z_up_s = static_cast<double>(uniform_int(rng, 1, 6));
  p.z_down_s = static_cast<double>(uniform_int(rng, 1, 6));
  p.theta_up = 0.05 + 0.95 * uniform_open01(rng);
  p.theta_down = 0.05 + 0.95 * uniform_open01(rng);
  return p;
}

// Random DAG on 1..n where node 1 is the only source and node n the only
// sink.
inline TaskGraph random_dag(Rng& rng, int n, double edge_prob = 0.4, std::int64_t max_work = 5,
                            std::int64_t max_bits = 10) {
  std::vector<TaskModule> mods;
  for (int id = 1; id <= n; ++id) {
    const bool interior = id > 1 && id < n;
    mods.push_back({id, uniform_int(rng, interior ? 1 : 0, interior ? max_work : 2), {}});
  }
  std::set<std::pair<int, int>> links;
  for (int a = 1; a <= n; ++a) {
    for (int b = a + 1; b <= n; ++b) {
      if (uniform_open01(rng) < edge_prob) links.insert({a, b});
    }
  }
  auto has_parent = [&](int v) {
    return std::any_of(links.begin(), links.end(), [&](const auto& e) { return e.second == v; });
  };
  auto has_child = [&](int v) {
    return std::any_of(links.begin(), links.end(), [&](const auto& e) { return e.first == v; });
  };
  for (int v = 2; v <= n; ++v) {
    if (!has_parent(v)) links.insert({static_cast<int>(uniform_int(rng, 1, v - 1)), v});
  }
  for (int v = 1; v < n; ++v) {
    if (!has_child(v)) links.insert({v, static_cast<int>(uniform_int(rng, v + 1, n))});
  }
  std::vector<DataEdge> edges;
  for (const auto& [a, b] : links) edges.push_back({a, b, uniform_int(rng, 1, max_bits)});
  return TaskGraph(std::move(mods), std::move(edges));
}

inline TaskGraph random_chain(Rng& rng, int n, std::int64_t max_work = 5, std::int64_t max_bits = 10) {
  std::vector<TaskModule> mods;
  std::vector<DataEdge> edges;
  for (int id = 1; id <= n; ++id) {
    const bool interior = id > 1 && id < n;
    mods.push_back({id, uniform_int(rng, interior ? 1 : 0, interior ? max_work : 2), {}});
    if (id < n) edges.push_back({id, id + 1, uniform_int(rng, 1, max_bits)});
  }
  return TaskGraph(std::move(mods), std::move(edges));
}

inline TaskGraph random_fan(Rng& rng, int n, std::int64_t max_work = 5, std::int64_t max_bits = 10) {
  std::vector<TaskModule> mods;
  std::vector<DataEdge> edges;
  for (int id = 1; id <= n; ++id) {
    const bool interior = id > 1 && id < n;
    mods.push_back({id, uniform_int(rng, interior ? 1 : 0, interior ? max_work : 2), {}});
    if (interior) {
      edges.push_back({1, id, uniform_int(rng, 1, max_bits)});
      edges.push_back({id, n, uniform_int(rng, 1, max_bits)});
    }
  }
  return TaskGraph(std::move(mods), std::move(edges));
}

inline Assignment random_assignment(Rng& rng, const TaskGraph& g) {
  auto loc = all_local(g);
  for (NodeId n = 2; n < g.last(); ++n) {
    if (uniform_open01(rng) < 0.5) loc[static_cast<std::size_t>(n - 1)] = Location::server;
  }
  return loc;
}

inline bool rel_close(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace testing_support
