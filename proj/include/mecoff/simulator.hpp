#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mecoff/error.hpp"
#include "mecoff/gev.hpp"
#include "mecoff/graph.hpp"
#include "mecoff/model.hpp"
#include "mecoff/params.hpp"
#include "mecoff/random.hpp"
#include "mecoff/traces.hpp"

namespace mecoff {

/// One-dimensional draw law for a trace variable.
struct Distribution {
  enum class Kind { constant, lognormal, uniform, gev, empirical };
  Kind kind = Kind::constant;
  double a = 0;  // constant value, lognormal log-mean, uniform low
  double b = 0;  // lognormal log-sd, uniform high
  GevParams gev;
  std::vector<double> values;  // empirical resampling pool

  static Distribution constant(double v) { return {Kind::constant, v, 0, {}, {}}; }
  static Distribution lognormal(double mu, double sigma) { return {Kind::lognormal, mu, sigma, {}, {}}; }
  static Distribution uniform(double lo, double hi) { return {Kind::uniform, lo, hi, {}, {}}; }
  static Distribution gev_law(GevParams p) { return {Kind::gev, 0, 0, p, {}}; }
  static Distribution empirical(std::vector<double> v) { return {Kind::empirical, 0, 0, {}, std::move(v)}; }
};

inline double draw(const Distribution& d, Rng& rng) {
  switch (d.kind) {
    case Distribution::Kind::constant: return d.a;
    case Distribution::Kind::lognormal: return std::exp(d.a + d.b * standard_normal(rng));
    case Distribution::Kind::uniform: return d.a + (d.b - d.a) * uniform_open01(rng);
    case Distribution::Kind::gev: return gev_sample(d.gev, rng);
    case Distribution::Kind::empirical:
      return d.values[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(d.values.size()) - 1))];
  }
  return 0;
}

/// Per-transfer laws of queue backlog, rate and power. Each transfer event
/// draws fresh values. `transfer_time_*`, when set, replaces (Q + o) / R as
/// the transfer time; `replay`, when set, supplies whole rows in order
/// instead of the parametric laws.
struct TraceModel {
  Distribution rate_up = Distribution::constant(1e6);
  Distribution rate_down = Distribution::constant(1e6);
  Distribution queue_up = Distribution::constant(0);
  Distribution queue_down = Distribution::constant(0);
  Distribution power_up = Distribution::constant(1000);
  Distribution power_down = Distribution::constant(500);
  std::optional<Distribution> transfer_time_up;
  std::optional<Distribution> transfer_time_down;
  std::vector<TraceRow> replay;
  double rate_floor_bps = 1e3;
  std::uint64_t seed = 20240611;
};

struct TransferEvent {
  std::size_t edge = 0;
  bool uplink = true;
  double seconds = 0;
  std::int64_t slots = 0;
  double energy = 0;
};

struct SimRun {
  double energy = 0;
  std::vector<std::int64_t> completion;
  bool deadline_met = false;
  std::vector<TransferEvent> transfers;
};

inline std::size_t cross_edge_count(const TaskGraph& g, const OffloadDecision& d) {
  std::size_t c = 0;
  for (const auto& e : g.edges()) c += d.at(e.from) != d.at(e.to);
  return c;
}

/// Replays the decision's locations once: every cross-boundary edge draws a
/// realized transfer, and completion times are recomputed from them.
inline SimRun simulate_execution(const TaskGraph& g, const OffloadDecision& d, const SystemParams& p,
                                 const TraceModel& model, Rng& rng, std::size_t replay_offset = 0) {
  SimRun run;
  for (const auto& m : g.modules()) {
    if (d.at(m.id) == Location::client) run.energy += p.local_energy(m.workload_cycles);
  }
  const auto& edges = g.edges();
  std::vector<std::int64_t> delay(edges.size(), 0);
  std::size_t next_row = replay_offset;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    const auto a = d.at(e.from), b = d.at(e.to);
    if (a == b) continue;
    const bool up = a == Location::client;
    const double o = static_cast<double>(e.bits);
    double q, r, pw;
    if (!model.replay.empty()) {
      const auto& row = model.replay[next_row++ % model.replay.size()];
      q = up ? row.queue_up_bits : row.queue_down_bits;
      r = up ? row.rate_up_bps : row.rate_down_bps;
      pw = up ? row.power_up_mw : row.power_down_mw;
    } else {
      q = draw(up ? model.queue_up : model.queue_down, rng);
      r = draw(up ? model.rate_up : model.rate_down, rng);
      pw = draw(up ? model.power_up : model.power_down, rng);
    }
    q = std::max(0.0, q);
    r = std::max(model.rate_floor_bps, r);
    pw = std::max(0.0, pw);
    TransferEvent ev{k, up, (q + o) / r, 0, pw * o / r};
    const auto& override_law = up ? model.transfer_time_up : model.transfer_time_down;
    if (override_law) ev.seconds = std::max(0.0, draw(*override_law, rng));
    ev.slots = static_cast<std::int64_t>(std::ceil(ev.seconds / p.delta_s));
    delay[k] = ev.slots;
    run.energy += ev.energy;
    run.transfers.push_back(ev);
  }

  run.completion.assign(g.size(), 0);
  for (NodeId n : topological_order(g)) {
    std::int64_t ready = 0;
    for (const auto& l : g.parents(n)) {
      ready = std::max(ready, run.completion[static_cast<std::size_t>(l.node - 1)] + delay[l.edge]);
    }
    run.completion[static_cast<std::size_t>(n - 1)] = ready + exec_slots_at(g, n, d.at(n), p);
  }
  run.deadline_met = run.completion[static_cast<std::size_t>(g.last() - 1)] <= p.deadline_slots;
  return run;
}

struct EdgeExceedance {
  NodeId from = 0;
  NodeId to = 0;
  bool uplink = true;
  double z_s = 0;
  std::uint64_t events = 0;
  std::uint64_t exceedances = 0;
  [[nodiscard]] double rate() const { return events ? static_cast<double>(exceedances) / static_cast<double>(events) : 0.0; }
};

struct SimReport {
  std::uint64_t replications = 0;
  double mean_energy = 0;
  double energy_stddev = 0;
  double energy_min = 0;
  double energy_p05 = 0;
  double energy_p50 = 0;
  double energy_p95 = 0;
  double energy_max = 0;
  double mean_completion_slots = 0;
  double deadline_violation_rate = 0;
  std::vector<EdgeExceedance> edges;
};

// Linear-interpolation quantile of sorted data.
inline double sorted_quantile(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// Aggregates independent replications; replication r draws from stream r of
/// the model seed and, when replaying rows, starts at row r * cross_edges.
inline SimReport monte_carlo(const TaskGraph& g, const OffloadDecision& d, const SystemParams& p,
                             const TraceModel& model, std::uint64_t replications) {
  if (replications < 1) throw Error("monte_carlo: replications must be at least 1");
  SimReport rep;
  rep.replications = replications;
  const auto& edges = g.edges();
  std::vector<std::size_t> slot_of_edge(edges.size(), SIZE_MAX);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto a = d.at(edges[k].from), b = d.at(edges[k].to);
    if (a == b) continue;
    slot_of_edge[k] = rep.edges.size();
    const bool up = a == Location::client;
    rep.edges.push_back({edges[k].from, edges[k].to, up, up ? p.z_up_s : p.z_down_s, 0, 0});
  }
  const std::size_t cross = rep.edges.size();

  std::vector<double> energies;
  energies.reserve(replications);
  double completion_sum = 0;
  std::uint64_t violations = 0;
  for (std::uint64_t r = 0; r < replications; ++r) {
    Rng rng = make_rng(model.seed, r);
    const auto run = simulate_execution(g, d, p, model, rng, static_cast<std::size_t>(r) * cross);
    energies.push_back(run.energy);
    completion_sum += static_cast<double>(run.completion[static_cast<std::size_t>(g.last() - 1)]);
    violations += !run.deadline_met;
    for (const auto& ev : run.transfers) {
      auto& ex = rep.edges[slot_of_edge[ev.edge]];
      ++ex.events;
      ex.exceedances += ev.seconds > ex.z_s;
    }
  }
  const double n = static_cast<double>(replications);
  double sum = 0;
  for (double e : energies) sum += e;
  rep.mean_energy = sum / n;
  double ss = 0;
  for (double e : energies) ss += (e - rep.mean_energy) * (e - rep.mean_energy);
  rep.energy_stddev = replications > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
  std::sort(energies.begin(), energies.end());
  rep.energy_min = energies.front();
  rep.energy_p05 = sorted_quantile(energies, 0.05);
  rep.energy_p50 = sorted_quantile(energies, 0.5);
  rep.energy_p95 = sorted_quantile(energies, 0.95);
  rep.energy_max = energies.back();
  rep.mean_completion_slots = completion_sum / n;
  rep.deadline_violation_rate = static_cast<double>(violations) / n;
  return rep;
}

/// Layer-by-layer random DAG: node 1, interior layers of random width, node N.
struct LayeredDagSpec {
  int nodes = 10;
  double edge_prob = 0.05;
  int max_layer_width = 0;  // 0 picks ceil(sqrt(N - 2))
  double workload_scale = 1e6;
  double bits_scale = 1.2e4;
};

inline TaskGraph gen_layered_dag(const LayeredDagSpec& spec, Rng& rng) {
  if (spec.nodes < 2) throw Error("gen_layered_dag: need at least 2 nodes");
  if (!(spec.edge_prob > 0 && spec.edge_prob <= 1)) throw Error("gen_layered_dag: edge probability must lie in (0, 1]");
  const int n = spec.nodes;
  const int interior = n - 2;
  auto half_normal = [&](double scale) { return std::llround(std::abs(standard_normal(rng)) * scale); };

  std::vector<std::vector<NodeId>> layers;
  if (interior > 0) {
    const int width_cap = spec.max_layer_width > 0
                              ? spec.max_layer_width
                              : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(interior))));
    NodeId next = 2;
    while (next < n) {
      const auto w = uniform_int(rng, 1, std::min<std::int64_t>(width_cap, n - next));
      layers.emplace_back();
      for (std::int64_t i = 0; i < w; ++i) layers.back().push_back(next++);
    }
  }

  std::vector<TaskModule> mods;
  for (NodeId id = 1; id <= n; ++id) {
    auto w = half_normal(spec.workload_scale);
    if (id > 1 && id < n) w = std::max<std::int64_t>(1, w);
    mods.push_back({id, w, {}});
  }

  std::vector<std::pair<NodeId, NodeId>> links;
  if (layers.empty()) {
    links.emplace_back(1, n);
  } else {
    for (NodeId v : layers.front()) links.emplace_back(1, v);
    for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
      const auto& a = layers[l];
      const auto& b = layers[l + 1];
      std::vector<bool> has_parent(b.size(), false), has_child(a.size(), false);
      for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
          if (uniform_open01(rng) < spec.edge_prob) {
            links.emplace_back(a[i], b[j]);
            has_parent[j] = has_child[i] = true;
          }
        }
      }
      for (std::size_t j = 0; j < b.size(); ++j) {
        if (has_parent[j]) continue;
        const auto i = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(a.size()) - 1));
        links.emplace_back(a[i], b[j]);
        has_child[i] = true;
      }
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (has_child[i]) continue;
        const auto j = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(b.size()) - 1));
        links.emplace_back(a[i], b[j]);
      }
    }
    for (NodeId v : layers.back()) links.emplace_back(v, n);
  }

  std::vector<DataEdge> edges;
  edges.reserve(links.size());
  for (const auto& [from, to] : links) edges.push_back({from, to, half_normal(spec.bits_scale)});
  return TaskGraph(std::move(mods), std::move(edges));
}

inline Distribution distribution_from_json(const nlohmann::json& j, const std::string& what) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "constant") return Distribution::constant(j.at("value").get<double>());
    if (kind == "lognormal") return Distribution::lognormal(j.at("mu").get<double>(), j.at("sigma").get<double>());
    if (kind == "uniform") {
      const double lo = j.at("low").get<double>(), hi = j.at("high").get<double>();
      if (!(hi >= lo)) throw ParseError(what + ": uniform needs high >= low");
      return Distribution::uniform(lo, hi);
    }
    if (kind == "gev") return Distribution::gev_law(gev_from_json(j));
    if (kind == "empirical") {
      auto v = j.at("values").get<std::vector<double>>();
      if (v.empty()) throw ParseError(what + ": empirical pool is empty");
      return Distribution::empirical(std::move(v));
    }
    throw ParseError(what + ": unknown distribution kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(what + ": " + e.what());
  }
}

inline nlohmann::ordered_json distribution_to_json(const Distribution& d) {
  switch (d.kind) {
    case Distribution::Kind::constant: return {{"kind", "constant"}, {"value", d.a}};
    case Distribution::Kind::lognormal: return {{"kind", "lognormal"}, {"mu", d.a}, {"sigma", d.b}};
    case Distribution::Kind::uniform: return {{"kind", "uniform"}, {"low", d.a}, {"high", d.b}};
    case Distribution::Kind::gev:
      return {{"kind", "gev"}, {"mu", d.gev.mu}, {"sigma", d.gev.sigma}, {"xi", d.gev.xi}};
    case Distribution::Kind::empirical: return {{"kind", "empirical"}, {"values", d.values}};
  }
  return {};
}

/// Trace-model document; `replay_csv` paths are resolved by the caller and
/// passed as `replay_rows`.
inline TraceModel trace_model_from_json(const nlohmann::json& j, std::vector<TraceRow> replay_rows = {}) {
  if (!j.is_object()) throw ParseError("trace model: document must be an object");
  TraceModel m;
  auto opt = [&](const char* key, Distribution& dst) {
    if (j.contains(key)) dst = distribution_from_json(j.at(key), std::string("trace model '") + key + "'");
  };
  opt("rate_up", m.rate_up);
  opt("rate_down", m.rate_down);
  opt("queue_up", m.queue_up);
  opt("queue_down", m.queue_down);
  opt("power_up", m.power_up);
  opt("power_down", m.power_down);
  if (j.contains("transfer_time_up")) m.transfer_time_up = distribution_from_json(j.at("transfer_time_up"), "transfer_time_up");
  if (j.contains("transfer_time_down")) {
    m.transfer_time_down = distribution_from_json(j.at("transfer_time_down"), "transfer_time_down");
  }
  try {
    if (j.contains("rate_floor_bps")) m.rate_floor_bps = j.at("rate_floor_bps").get<double>();
    if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("trace model: ") + e.what());
  }
  if (!(m.rate_floor_bps > 0)) throw ParseError("trace model: rate_floor_bps must be positive");
  m.replay = std::move(replay_rows);
  return m;
}

}  // namespace mecoff
