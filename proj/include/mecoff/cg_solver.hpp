#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mecoff/error.hpp"
#include "mecoff/graph.hpp"
#include "mecoff/model.hpp"
#include "mecoff/params.hpp"
#include "mecoff/schedule.hpp"
#include "mecoff/simplex.hpp"

namespace mecoff {

enum class PricingMode { exact_grid, alternating };

enum class ExitReason { certified_optimal, ratio_test, no_column, all_admitted };

inline const char* to_string(ExitReason r) {
  switch (r) {
    case ExitReason::certified_optimal: return "certified_optimal";
    case ExitReason::ratio_test: return "ratio_test";
    case ExitReason::no_column: return "no_column";
    case ExitReason::all_admitted: return "all_admitted";
  }
  return "unknown";
}

struct CgOptions {
  double epsilon = 0.03;
  PricingMode pricing = PricingMode::exact_grid;
  int npp_max_iter = 20;
  // Phase-one LPs with more tableau cells than this fall back to the
  // slack-weighted prices.
  std::size_t lp_cell_cap = 100000;
};

/// Column pool, current schedule, prices and bounds of one solve.
struct SolverState {
  Assignment location;
  OffloadDecision schedule;
  std::vector<std::int64_t> latest;  // latest completion per node
  std::vector<double> duals;         // one price per edge, canonical order
  bool duals_from_lp = false;
  double psi_upper = 0;
  double psi_lower = 0;
  double r_underbar = 0;
  int iterations = 0;
  int k_const = 0;
  std::vector<bool> blacklisted;
  std::vector<NodeId> order;
};

struct SlotRange {
  std::int64_t t_min = 0;
  std::int64_t t_max = 0;
};

struct PricedColumn {
  NodeId node = 0;
  double reduced_cost = 0;
  std::int64_t t_min = 0;
  std::int64_t t_max = 0;
  std::int64_t slot = 0;
};

struct IterationRecord {
  int iter = 0;
  double psi_upper = 0;
  double psi_lower = 0;
  double r_underbar = 0;
  NodeId admitted_node = -1;
};

struct Bounds {
  double psi_lower = 0;
  double psi_upper = 0;
  double r_underbar = 0;
};

struct CgResult {
  OffloadDecision decision;
  EnergyReport energy;
  Bounds bounds;
  std::vector<IterationRecord> log;
  ExitReason exit = ExitReason::no_column;
  int iterations = 0;
  double epsilon = 0;
};

namespace detail {

inline std::size_t ix(NodeId n) { return static_cast<std::size_t>(n - 1); }

inline Location flipped(Location l) { return l == Location::client ? Location::server : Location::client; }

inline double edge_energy(Location from, Location to, std::int64_t bits, const SystemParams& p) {
  if (from == Location::client && to == Location::server) return static_cast<double>(bits) * p.theta_up;
  if (from == Location::server && to == Location::client) return static_cast<double>(bits) * p.theta_down;
  return 0.0;
}

// Exact change of Psi when only node n changes location.
inline double flip_delta(const TaskGraph& g, const Assignment& loc, NodeId n, const SystemParams& p) {
  const auto ln = loc[ix(n)];
  double d = ln == Location::client ? -p.local_energy(g.workload(n)) : p.local_energy(g.workload(n));
  const auto& edges = g.edges();
  for (const auto& l : g.parents(n)) {
    const auto lm = loc[ix(l.node)];
    const auto bits = edges[l.edge].bits;
    d += edge_energy(lm, flipped(ln), bits, p) - edge_energy(lm, ln, bits, p);
  }
  for (const auto& l : g.children(n)) {
    const auto lk = loc[ix(l.node)];
    const auto bits = edges[l.edge].bits;
    d += edge_energy(flipped(ln), lk, bits, p) - edge_energy(ln, lk, bits, p);
  }
  return d;
}

}  // namespace detail

/// All-local start: the serial schedule when it fits, else the earliest
/// schedule; throws when not even the earliest all-local schedule meets T.
inline SolverState initial_rmp(const TaskGraph& g, const SystemParams& p) {
  SolverState s;
  s.order = topological_order(g);
  s.location = all_local(g);
  s.k_const = static_cast<int>(g.size()) - 2;
  s.blacklisted.assign(g.size(), false);
  s.duals.assign(g.edges().size(), 0.0);

  std::vector<std::int64_t> serial(g.size(), 0);
  std::int64_t clock = 0;
  for (NodeId n : s.order) {
    clock += p.client_slots(g.workload(n));
    serial[detail::ix(n)] = clock;
  }
  if (clock <= p.deadline_slots) {
    s.schedule = {s.location, serial};
  } else {
    const auto ec = earliest_completion(g, s.location, p, s.order);
    if (!ec.feasible) throw InfeasibleError("deadline too tight for local execution");
    s.schedule = make_decision(s.location, ec);
  }
  s.latest = latest_completion(g, s.location, p, s.order);
  s.psi_upper = worst_case_expected_energy(g, s.location, p).psi;
  s.psi_lower = 0;
  return s;
}

struct DualPrices {
  std::vector<double> pi;
  bool from_lp = false;
};

/// Prices for the dependency rows of the fixed-location schedule.
///
/// Phase-one LP: completion times t_n in [exec_n, T], one nonnegative slack
/// per dependency row and one on the deadline row, minimize total slack.
/// The dependency-row multipliers are the prices. When they all vanish, or
/// the LP is too large, each edge gets 1 / (1 + float) normalized to sum 1,
/// where float is the spare room between its tail's earliest and its head's
/// latest completion.
inline DualPrices phase_one_duals(const TaskGraph& g, const Assignment& loc, const SystemParams& p,
                                  const std::vector<std::int64_t>& earliest, const std::vector<std::int64_t>& latest,
                                  std::size_t cell_cap) {
  const auto& edges = g.edges();
  const std::size_t n = g.size(), e = edges.size();
  const std::int64_t T = p.deadline_slots;
  DualPrices out;
  out.pi.assign(e, 0.0);
  if (e == 0) return out;

  std::vector<std::int64_t> lb(n);
  for (const auto& m : g.modules()) lb[detail::ix(m.id)] = exec_slots_at(g, m.id, loc[detail::ix(m.id)], p);
  auto required = [&](const DataEdge& ed) {
    const auto lm = loc[detail::ix(ed.from)], lk = loc[detail::ix(ed.to)];
    return exec_slots_at(g, ed.to, lk, p) + transfer_slots(lm, lk, p);
  };

  const std::size_t vars = n + e + 1;
  const std::size_t rows = e + 1 + n;
  const std::size_t cells = (rows + 1) * (vars + rows + e + 2);
  bool all_zero = true;
  if (cells <= cell_cap) {
    LinearProgram lp;
    lp.cost.assign(vars, 0.0);
    for (std::size_t j = n; j < vars; ++j) lp.cost[j] = 1.0;
    for (std::size_t k = 0; k < e; ++k) {
      const auto& ed = edges[k];
      LpRow r{std::vector<double>(vars, 0.0), RowSense::greater_equal, 0.0};
      r.coeffs[detail::ix(ed.to)] += 1.0;
      r.coeffs[detail::ix(ed.from)] -= 1.0;
      r.coeffs[n + k] = 1.0;
      r.rhs = static_cast<double>(required(ed) - lb[detail::ix(ed.to)] + lb[detail::ix(ed.from)]);
      lp.rows.push_back(std::move(r));
    }
    {
      LpRow r{std::vector<double>(vars, 0.0), RowSense::less_equal, 0.0};
      r.coeffs[detail::ix(g.last())] = 1.0;
      r.coeffs[n + e] = -1.0;
      r.rhs = static_cast<double>(T - lb[detail::ix(g.last())]);
      lp.rows.push_back(std::move(r));
    }
    for (std::size_t i = 0; i < n; ++i) {
      LpRow r{std::vector<double>(vars, 0.0), RowSense::less_equal, static_cast<double>(T - lb[i])};
      r.coeffs[i] = 1.0;
      lp.rows.push_back(std::move(r));
    }
    const auto res = solve_lp(lp);
    if (res.status == LpStatus::optimal) {
      for (std::size_t k = 0; k < e; ++k) {
        out.pi[k] = std::max(0.0, res.duals[k]);
        if (out.pi[k] > 1e-12) all_zero = false;
      }
    }
  }
  if (!all_zero) {
    out.from_lp = true;
    return out;
  }

  double total = 0;
  for (std::size_t k = 0; k < e; ++k) {
    const auto& ed = edges[k];
    const auto room = latest[detail::ix(ed.to)] - earliest[detail::ix(ed.from)] - required(ed);
    out.pi[k] = 1.0 / (1.0 + static_cast<double>(std::max<std::int64_t>(0, room)));
    total += out.pi[k];
  }
  for (auto& v : out.pi) v /= total;
  return out;
}

struct RmpSolution {
  double psi_upper = 0;
  OffloadDecision schedule;
  std::vector<std::int64_t> latest;
  DualPrices duals;
};

/// Feasibility check of the fixed locations: earliest schedule, latest
/// completion times, Psi and prices. Empty when no schedule meets T, which
/// tells the caller to reject the last column.
inline std::optional<RmpSolution> solve_rmp(const TaskGraph& g, const Assignment& loc, const SystemParams& p,
                                            const std::vector<NodeId>& order, std::size_t cell_cap) {
  const auto ec = earliest_completion(g, loc, p, order);
  if (!ec.feasible) return std::nullopt;
  RmpSolution s;
  s.schedule = make_decision(loc, ec);
  s.latest = latest_completion(g, loc, p, order);
  s.psi_upper = worst_case_expected_energy(g, loc, p).psi;
  s.duals = phase_one_duals(g, loc, p, s.schedule.slot, s.latest, cell_cap);
  return s;
}

inline bool solve_rmp(SolverState& state, const TaskGraph& g, const SystemParams& p, const CgOptions& opts = {}) {
  auto sol = solve_rmp(g, state.location, p, state.order, opts.lp_cell_cap);
  if (!sol) return false;
  state.psi_upper = sol->psi_upper;
  state.schedule = std::move(sol->schedule);
  state.latest = std::move(sol->latest);
  state.duals = std::move(sol->duals.pi);
  state.duals_from_lp = sol->duals.from_lp;
  return true;
}

/// Completion slots at which node g could run on the server with its
/// parents at their earliest and its children at their latest slots.
inline std::optional<SlotRange> feasible_slot_range(NodeId gid, const SolverState& s, const TaskGraph& g,
                                                    const SystemParams& p) {
  const auto exec_s = p.server_slots(g.workload(gid));
  std::int64_t lo = exec_s;
  for (const auto& l : g.parents(gid)) {
    lo = std::max(lo, s.schedule.slot_of(l.node) + transfer_slots(s.location[detail::ix(l.node)], Location::server, p) +
                          exec_s);
  }
  std::int64_t hi = p.deadline_slots;
  for (const auto& l : g.children(gid)) {
    const auto lk = s.location[detail::ix(l.node)];
    hi = std::min(hi, s.latest[detail::ix(l.node)] - transfer_slots(Location::server, lk, p) -
                          exec_slots_at(g, l.node, lk, p));
  }
  if (lo > hi) return std::nullopt;
  return SlotRange{lo, hi};
}

/// zeta_n(t) = intercept + slope * t for a candidate completing at slot t.
struct ReducedCostLine {
  double intercept = 0;
  double slope = 0;
  [[nodiscard]] double at(std::int64_t t) const { return intercept + slope * static_cast<double>(t); }
};

/// Reduced cost of moving node n to the server: the transfer terms minus the
/// node's current cost (its assignment-row price), minus the dependency
/// prices times the resulting dependency bounds.
inline ReducedCostLine reduced_cost_line(NodeId n, const SolverState& s, const TaskGraph& g, const SystemParams& p) {
  ReducedCostLine z;
  z.intercept = detail::flip_delta(g, s.location, n, p);
  const auto exec_s = static_cast<double>(p.server_slots(g.workload(n)));
  for (const auto& l : g.parents(n)) {
    const double pi = s.duals[l.edge];
    // b = t - slot(m) - exec_s(n)
    z.slope -= pi;
    z.intercept += pi * (static_cast<double>(s.schedule.slot_of(l.node)) + exec_s);
  }
  for (const auto& l : g.children(n)) {
    const double pi = s.duals[l.edge];
    const auto lk = s.location[detail::ix(l.node)];
    // b = latest(k) - t - exec(k)
    z.slope += pi;
    z.intercept -= pi * static_cast<double>(s.latest[detail::ix(l.node)] - exec_slots_at(g, l.node, lk, p));
  }
  return z;
}

inline double reduced_cost(NodeId n, std::int64_t t, const SolverState& s, const TaskGraph& g, const SystemParams& p) {
  return reduced_cost_line(n, s, g, p).at(t);
}

/// Column selection: smallest reduced cost, ties to the smallest id.
inline std::optional<NodeId> solve_cs(const std::vector<std::pair<NodeId, double>>& candidates) {
  std::optional<NodeId> best;
  double best_v = std::numeric_limits<double>::infinity();
  for (const auto& [n, v] : candidates) {
    if (!best || v < best_v || (v == best_v && n < *best)) {
      best = n;
      best_v = v;
    }
  }
  return best;
}

/// Slot choice for node l: scans every slot of its feasible range, earliest
/// slot among ties.
inline std::optional<PricedColumn> solve_td(NodeId l, const SolverState& s, const TaskGraph& g, const SystemParams& p) {
  const auto range = feasible_slot_range(l, s, g, p);
  if (!range) return std::nullopt;
  const auto line = reduced_cost_line(l, s, g, p);
  PricedColumn c{l, line.at(range->t_min), range->t_min, range->t_max, range->t_min};
  for (auto t = range->t_min + 1; t <= range->t_max; ++t) {
    const double v = line.at(t);
    if (v < c.reduced_cost) {
      c.reduced_cost = v;
      c.slot = t;
    }
  }
  return c;
}

struct NppResult {
  std::optional<PricedColumn> column;
  double value = 0;  // reduced cost of the returned column, 0 when none
};

inline std::vector<NodeId> pricing_candidates(const SolverState& s, const TaskGraph& g) {
  std::vector<NodeId> out;
  for (NodeId n = 2; n < g.last(); ++n) {
    if (s.location[detail::ix(n)] == Location::client && !s.blacklisted[detail::ix(n)]) out.push_back(n);
  }
  return out;
}

/// Pricing over the non-admitted nodes. exact_grid evaluates every candidate
/// at its best slot; alternating starts from the bounds b = z and re-solves
/// the slot problem of the current selection until it stops changing.
inline NppResult solve_npp(const SolverState& s, const TaskGraph& g, const SystemParams& p, const CgOptions& opts = {}) {
  NppResult out;
  const auto cands = pricing_candidates(s, g);
  if (cands.empty()) return out;

  if (opts.pricing == PricingMode::exact_grid) {
    std::vector<std::pair<NodeId, double>> values;
    std::vector<PricedColumn> cols;
    for (NodeId n : cands) {
      if (auto c = solve_td(n, s, g, p)) {
        values.emplace_back(n, c->reduced_cost);
        cols.push_back(*c);
      }
    }
    const auto pick = solve_cs(values);
    if (!pick) return out;
    for (const auto& c : cols) {
      if (c.node == *pick) out.column = c;
    }
    out.value = out.column->reduced_cost;
    return out;
  }

  std::vector<std::pair<NodeId, double>> values;
  for (NodeId n : cands) {
    double v = detail::flip_delta(g, s.location, n, p);
    for (const auto& l : g.parents(n)) v -= s.duals[l.edge] * static_cast<double>(p.z_up_slots());
    for (const auto& l : g.children(n)) v -= s.duals[l.edge] * static_cast<double>(p.z_down_slots());
    values.emplace_back(n, v);
  }
  std::vector<std::optional<PricedColumn>> solved(values.size());
  std::vector<bool> done(values.size(), false);
  for (int it = 0; it < opts.npp_max_iter; ++it) {
    const auto pick = solve_cs(values);
    if (!pick) break;
    std::size_t i = 0;
    while (values[i].first != *pick) ++i;
    if (done[i]) break;
    done[i] = true;
    solved[i] = solve_td(*pick, s, g, p);
    if (solved[i]) {
      values[i].second = solved[i]->reduced_cost;
    } else {
      values.erase(values.begin() + static_cast<std::ptrdiff_t>(i));
      solved.erase(solved.begin() + static_cast<std::ptrdiff_t>(i));
      done.erase(done.begin() + static_cast<std::ptrdiff_t>(i));
    }
  }
  std::vector<std::pair<NodeId, double>> finished;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (solved[i]) finished.emplace_back(values[i].first, solved[i]->reduced_cost);
  }
  const auto pick = solve_cs(finished);
  if (!pick) return out;
  for (const auto& c : solved) {
    if (c && c->node == *pick) out.column = c;
  }
  out.value = out.column->reduced_cost;
  return out;
}

/// Lower bound on the per-node share of any improvement over the current
/// locations, timing ignored.
///
/// Every interior node n gets +-L_n plus, per incident edge, the smallest
/// edge-energy change it could be charged with: an incoming edge is charged
/// the change for n moving alone or together with its tail, an outgoing edge
/// the change for n moving alone or nothing. Summing over any set C of moved
/// nodes never exceeds the true change of Psi, so
/// Psi* >= Psi_u + |C| * min(0, min_n v_n) >= Psi_u + K * min(0, r).
inline double relaxed_pricing_bound(const SolverState& s, const TaskGraph& g, const SystemParams& p) {
  const auto& edges = g.edges();
  const auto& loc = s.location;
  double r = std::numeric_limits<double>::infinity();
  for (NodeId n = 2; n < g.last(); ++n) {
    const auto ln = loc[detail::ix(n)];
    double v = ln == Location::client ? -p.local_energy(g.workload(n)) : p.local_energy(g.workload(n));
    for (const auto& l : g.parents(n)) {
      const auto lm = loc[detail::ix(l.node)];
      const auto bits = edges[l.edge].bits;
      const double now = detail::edge_energy(lm, ln, bits, p);
      const double alone = detail::edge_energy(lm, detail::flipped(ln), bits, p) - now;
      const double both = detail::edge_energy(detail::flipped(lm), detail::flipped(ln), bits, p) - now;
      v += l.node == 1 ? alone : std::min(alone, both);
    }
    for (const auto& l : g.children(n)) {
      const auto lk = loc[detail::ix(l.node)];
      const auto bits = edges[l.edge].bits;
      const double alone = detail::edge_energy(detail::flipped(ln), lk, bits, p) - detail::edge_energy(ln, lk, bits, p);
      v += l.node == g.last() ? alone : std::min(0.0, alone);
    }
    r = std::min(r, v);
  }
  return std::isfinite(r) ? r : 0.0;
}

/// Column generation with an epsilon-bounded stop.
///
/// Each round re-solves the restricted master, updates the bounds and exits
/// when the relaxed pricing value is nonnegative (optimal), when
/// Psi_u <= (1 + eps) Psi_l, or when no candidate has a negative reduced
/// cost. Otherwise the priced column is admitted if it lowers Psi_u and
/// blacklisted if it does not.
inline CgResult solve(const TaskGraph& g, const SystemParams& p, const CgOptions& opts = {}) {
  if (!(opts.epsilon >= 0 && opts.epsilon < 1)) throw Error("solve: epsilon must lie in [0, 1)");
  auto state = initial_rmp(g, p);
  if (!solve_rmp(state, g, p, opts)) throw InfeasibleError("deadline too tight for local execution");

  CgResult res;
  res.epsilon = opts.epsilon;
  const int max_admissions = std::max(0, static_cast<int>(g.size()) - 2);
  for (int round = 1;; ++round) {
    IterationRecord rec;
    rec.iter = round;
    state.r_underbar = relaxed_pricing_bound(state, g, p);
    state.psi_lower = std::max(0.0, state.psi_upper + state.k_const * std::min(state.r_underbar, 0.0));
    rec.psi_upper = state.psi_upper;
    rec.psi_lower = state.psi_lower;
    rec.r_underbar = state.r_underbar;

    std::optional<ExitReason> stop;
    if (state.r_underbar >= 0) {
      stop = ExitReason::certified_optimal;
    } else if (state.psi_upper <= (1.0 + opts.epsilon) * state.psi_lower) {
      stop = ExitReason::ratio_test;
    } else if (state.iterations >= max_admissions) {
      stop = ExitReason::all_admitted;
    } else {
      const auto npp = solve_npp(state, g, p, opts);
      if (!npp.column || !(npp.column->reduced_cost < 0)) {
        stop = ExitReason::no_column;
      } else {
        const NodeId n = npp.column->node;
        auto trial = state.location;
        trial[detail::ix(n)] = Location::server;
        auto sol = solve_rmp(g, trial, p, state.order, opts.lp_cell_cap);
        if (sol && sol->psi_upper < state.psi_upper) {
          state.location = std::move(trial);
          state.psi_upper = sol->psi_upper;
          state.schedule = std::move(sol->schedule);
          state.latest = std::move(sol->latest);
          state.duals = std::move(sol->duals.pi);
          state.duals_from_lp = sol->duals.from_lp;
          ++state.iterations;
          rec.admitted_node = n;
        } else {
          state.blacklisted[detail::ix(n)] = true;
        }
      }
    }
    res.log.push_back(rec);
    if (stop) {
      res.exit = *stop;
      break;
    }
  }

  res.decision = state.schedule;
  res.energy = worst_case_expected_energy(g, res.decision, p);
  res.bounds = {state.psi_lower, state.psi_upper, state.r_underbar};
  res.iterations = state.iterations;
  return res;
}

}  // namespace mecoff
