// Command-line front end: fit, solve, oracle, simulate, gen, compare.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mecoff/mecoff.hpp"

namespace {

using mecoff::SystemParams;
using nlohmann::ordered_json;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

SystemParams load_params(const Globals& g) {
  SystemParams p;
  if (!g.config.empty()) p = mecoff::params_from_json(mecoff::read_json_file(g.config));
  if (g.seed) p.seed = *g.seed;
  return p;
}

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
  } else {
    mecoff::write_text_file(g.out, text);
  }
}

double offload_percentage(const mecoff::OffloadDecision& d) {
  const auto interior = d.location.size() > 2 ? d.location.size() - 2 : 0;
  if (interior == 0) return 0.0;
  return 100.0 * static_cast<double>(d.offloaded_count()) / static_cast<double>(interior);
}

// fit ------------------------------------------------------------------------

struct FitArgs {
  std::string traces;
  std::optional<std::int64_t> k;
  std::optional<double> eps_up, eps_down;
  double payload_bits = 1e5;
  bool paper_defaults = false;
};

int cmd_fit(const Globals& g, const FitArgs& a) {
  SystemParams p = load_params(g);
  if (a.eps_up) p.eps_m_up = *a.eps_up;
  if (a.eps_down) p.eps_m_down = *a.eps_down;
  if (a.k) p.block_size_k = *a.k;
  mecoff::validate_params(p);

  if (a.paper_defaults) {
    const SystemParams d;
    p.z_up_s = d.z_up_s;
    p.z_down_s = d.z_down_s;
    p.theta_up = d.theta_up;
    p.theta_down = d.theta_down;
    emit(g, mecoff::dump_json(mecoff::params_to_json(p)));
    return 0;
  }
  if (a.traces.empty()) throw mecoff::Error("fit: --traces is required unless --paper-defaults is given");

  const auto rows = mecoff::load_trace_csv(a.traces);
  const auto k = static_cast<std::size_t>(p.block_size_k);
  auto fit = [&](const mecoff::SampleSet& s) {
    return mecoff::fit_gev_mle(mecoff::block_maxima(s.values, k));
  };
  const auto v_up = fit(mecoff::upload_time_samples(rows, a.payload_bits));
  const auto v_down = fit(mecoff::download_time_samples(rows, a.payload_bits));
  const auto j_fit = fit(mecoff::upload_energy_per_bit_samples(rows));
  const auto h_fit = fit(mecoff::download_energy_per_bit_samples(rows));

  p.gev_v_up = v_up;
  p.gev_v_down = v_down;
  p.z_up_s = mecoff::gev_quantile(v_up, p.eps_m_up);
  p.z_down_s = mecoff::gev_quantile(v_down, p.eps_m_down);
  p.theta_up = mecoff::gev_mean(j_fit);
  p.theta_down = mecoff::gev_mean(h_fit);
  auto j = mecoff::params_to_json(p);
  j["gev_j"] = mecoff::gev_to_json(j_fit);
  j["gev_h"] = mecoff::gev_to_json(h_fit);
  j["payload_bits"] = a.payload_bits;
  j["trace_rows"] = rows.size();
  emit(g, mecoff::dump_json(j));
  return 0;
}

// solve ----------------------------------------------------------------------

struct SolveArgs {
  std::string dag;
  std::optional<double> epsilon;
  std::string policy = "auto";
  std::string pricing = "exact";
  std::string log;
};

mecoff::CgOptions cg_options(const SystemParams& p, const SolveArgs& a) {
  mecoff::CgOptions o;
  o.epsilon = a.epsilon ? *a.epsilon : p.epsilon;
  o.pricing = a.pricing == "alternating" ? mecoff::PricingMode::alternating : mecoff::PricingMode::exact_grid;
  return o;
}

int cmd_solve(const Globals& g, const SolveArgs& a) {
  const auto p = load_params(g);
  const auto graph = mecoff::load_graph(a.dag);
  const auto opts = cg_options(p, a);

  std::string policy = a.policy;
  if (policy == "auto") {
    policy = mecoff::is_chain(graph) ? "sequential" : mecoff::is_fan(graph) ? "parallel" : "cg";
  }
  if (policy == "sequential" || policy == "parallel") {
    const auto r = policy == "sequential" ? mecoff::solve_sequential(graph, p) : mecoff::solve_parallel(graph, p, opts);
    emit(g, mecoff::dump_json(mecoff::exact_decision_to_json(r.decision, r.energy, r.method, p.energy_unit)));
    if (!a.log.empty()) mecoff::write_text_file(a.log, mecoff::iteration_log_csv({}));
    return 0;
  }
  const auto r = mecoff::solve(graph, p, opts);
  emit(g, mecoff::dump_json(mecoff::decision_to_json(r, p.energy_unit)));
  if (!a.log.empty()) mecoff::write_text_file(a.log, mecoff::iteration_log_csv(r.log));
  return 0;
}

// oracle ---------------------------------------------------------------------

int cmd_oracle(const Globals& g, const std::string& dag) {
  const auto p = load_params(g);
  const auto graph = mecoff::load_graph(dag);
  emit(g, mecoff::dump_json(mecoff::oracle_to_json(mecoff::brute_force_optimum(graph, p), p.energy_unit)));
  return 0;
}

// simulate -------------------------------------------------------------------

struct SimArgs {
  std::string dag;
  std::string decision;
  std::string model;
  std::string traces;
  std::uint64_t replications = 1000;
};

int cmd_simulate(const Globals& g, const SimArgs& a) {
  const auto p = load_params(g);
  const auto graph = mecoff::load_graph(a.dag);
  std::vector<mecoff::TraceRow> rows;
  if (!a.traces.empty()) rows = mecoff::load_trace_csv(a.traces);
  auto model = a.model.empty() ? mecoff::TraceModel{} : mecoff::trace_model_from_json(mecoff::read_json_file(a.model));
  if (!rows.empty()) model.replay = rows;
  if (g.seed) model.seed = *g.seed;

  mecoff::OffloadDecision d;
  if (!a.decision.empty()) {
    d = mecoff::decision_from_json(mecoff::read_json_file(a.decision), graph);
  } else {
    mecoff::CgOptions o;
    o.epsilon = p.epsilon;
    d = mecoff::solve(graph, p, o).decision;
  }
  const auto v = mecoff::check_constraints(graph, d, p);
  if (!v.empty()) throw mecoff::Error("simulate: decision violates '" + v.front().code + "' (" + v.front().detail + ")");
  const auto rep = mecoff::monte_carlo(graph, d, p, model, a.replications);
  emit(g, mecoff::dump_json(mecoff::sim_report_to_json(rep, p.energy_unit)));
  return 0;
}

// gen ------------------------------------------------------------------------

int cmd_gen(const Globals& g, const mecoff::LayeredDagSpec& spec) {
  const auto p = load_params(g);
  auto rng = mecoff::make_rng(p.seed, 0);
  const auto graph = mecoff::gen_layered_dag(spec, rng);
  emit(g, mecoff::dump_json(mecoff::graph_to_json(graph)));
  return 0;
}

// compare --------------------------------------------------------------------

struct CompareArgs {
  std::string dag;
  std::vector<double> epsilons{0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1};
  std::vector<double> eps_m{0.01, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  int random_samples = 100;
};

int cmd_compare(const Globals& g, const CompareArgs& a) {
  const auto p = load_params(g);
  const auto graph = mecoff::load_graph(a.dag);
  ordered_json out;
  out["energy_unit"] = p.energy_unit;

  auto eps_rows = ordered_json::array();
  for (double eps : a.epsilons) {
    mecoff::CgOptions o;
    o.epsilon = eps;
    const auto r = mecoff::solve(graph, p, o);
    eps_rows.push_back({{"epsilon", eps},
                        {"psi", r.energy.psi},
                        {"psi_lower", r.bounds.psi_lower},
                        {"offload_pct", offload_percentage(r.decision)},
                        {"iterations", r.iterations},
                        {"exit", mecoff::to_string(r.exit)}});
  }
  out["epsilon_sweep"] = eps_rows;

  auto em_rows = ordered_json::array();
  if (p.gev_v_up && p.gev_v_down) {
    for (double em : a.eps_m) {
      auto q = p;
      q.set_extreme_probabilities(em, em);
      mecoff::CgOptions o;
      o.epsilon = p.epsilon;
      ordered_json row{{"eps_m", em}, {"z_up_s", q.z_up_s}, {"z_down_s", q.z_down_s}};
      try {
        const auto r = mecoff::solve(graph, q, o);
        row["psi"] = r.energy.psi;
        row["offload_pct"] = offload_percentage(r.decision);
      } catch (const mecoff::InfeasibleError&) {
        row["psi"] = nullptr;
        row["offload_pct"] = nullptr;
      }
      em_rows.push_back(row);
    }
  }
  out["eps_m_sweep"] = em_rows;

  ordered_json base;
  auto local = mecoff::all_local(graph);
  const auto lsched = mecoff::earliest_completion(graph, local, p);
  base["local_only"] = {{"psi", mecoff::worst_case_expected_energy(graph, local, p).psi},
                        {"feasible", lsched.feasible}};
  auto all = local;
  for (mecoff::NodeId n = 2; n < graph.last(); ++n) all[static_cast<std::size_t>(n - 1)] = mecoff::Location::server;
  base["all_offload"] = {{"psi", mecoff::worst_case_expected_energy(graph, all, p).psi},
                         {"feasible", mecoff::earliest_completion(graph, all, p).feasible}};
  auto rng = mecoff::make_rng(p.seed, 1);
  double sum = 0;
  int feasible = 0;
  for (int i = 0; i < a.random_samples; ++i) {
    auto loc = local;
    for (mecoff::NodeId n = 2; n < graph.last(); ++n) {
      if (mecoff::uniform_open01(rng) < 0.5) loc[static_cast<std::size_t>(n - 1)] = mecoff::Location::server;
    }
    if (!mecoff::earliest_completion(graph, loc, p).feasible) continue;
    sum += mecoff::worst_case_expected_energy(graph, loc, p).psi;
    ++feasible;
  }
  base["random"] = {{"mean_psi", feasible ? ordered_json(sum / feasible) : ordered_json(nullptr)},
                    {"feasible_samples", feasible},
                    {"samples", a.random_samples}};
  out["baselines"] = base;
  emit(g, mecoff::dump_json(out));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-aware offloading decisions for DAG applications"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "SystemParams JSON file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Seed overriding the configuration");
  app.add_option("--out", g.out, "Output file (default: stdout)");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Fit GEV models to a trace CSV and derive z and theta");
  fit->add_option("--traces", fa.traces, "Trace CSV")->check(CLI::ExistingFile);
  fit->add_option("--k", fa.k, "Block size");
  fit->add_option("--eps-m-up", fa.eps_up, "Uplink extreme-event probability");
  fit->add_option("--eps-m-down", fa.eps_down, "Downlink extreme-event probability");
  fit->add_option("--payload-bits", fa.payload_bits, "Payload size timed by the trace rows");
  fit->add_flag("--paper-defaults", fa.paper_defaults, "Emit the built-in default z and theta constants");

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Solve an instance");
  solve->add_option("--dag", sa.dag, "DAG JSON")->required()->check(CLI::ExistingFile);
  solve->add_option("--epsilon", sa.epsilon, "Approximation tolerance");
  solve->add_option("--policy", sa.policy, "auto|cg|sequential|parallel")
      ->check(CLI::IsMember({"auto", "cg", "sequential", "parallel"}));
  solve->add_option("--pricing", sa.pricing, "exact|alternating")->check(CLI::IsMember({"exact", "alternating"}));
  solve->add_option("--log", sa.log, "Iteration log CSV");

  std::string oracle_dag;
  auto* oracle = app.add_subcommand("oracle", "Exhaustive optimum for small instances");
  oracle->add_option("--dag", oracle_dag, "DAG JSON")->required()->check(CLI::ExistingFile);

  SimArgs ma;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo replay of a decision");
  sim->add_option("--dag", ma.dag, "DAG JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--decision", ma.decision, "Decision JSON (default: solve first)")->check(CLI::ExistingFile);
  sim->add_option("--model", ma.model, "Trace model JSON")->check(CLI::ExistingFile);
  sim->add_option("--traces", ma.traces, "Trace CSV replayed row by row")->check(CLI::ExistingFile);
  sim->add_option("--replications", ma.replications, "Replications")->check(CLI::PositiveNumber);

  mecoff::LayeredDagSpec spec;
  auto* gen = app.add_subcommand("gen", "Generate a layered random DAG");
  gen->add_option("--nodes", spec.nodes, "Node count N")->required();
  gen->add_option("--edge-prob", spec.edge_prob, "Inter-layer edge probability");
  gen->add_option("--max-width", spec.max_layer_width, "Largest layer width (0: sqrt(N-2))");
  gen->add_option("--workload-scale", spec.workload_scale, "Half-normal workload scale (cycles)");
  gen->add_option("--bits-scale", spec.bits_scale, "Half-normal data-size scale (bits)");

  CompareArgs ca;
  auto* cmp = app.add_subcommand("compare", "Sweep epsilon and eps_m and report baselines");
  cmp->add_option("--dag", ca.dag, "DAG JSON")->required()->check(CLI::ExistingFile);
  cmp->add_option("--epsilons", ca.epsilons, "Epsilon grid")->delimiter(',');
  cmp->add_option("--eps-m", ca.eps_m, "Extreme-event probability grid")->delimiter(',');
  cmp->add_option("--random-samples", ca.random_samples, "Random-baseline draws");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit) return cmd_fit(g, fa);
    if (*solve) return cmd_solve(g, sa);
    if (*oracle) return cmd_oracle(g, oracle_dag);
    if (*sim) return cmd_simulate(g, ma);
    if (*gen) return cmd_gen(g, spec);
    if (*cmp) return cmd_compare(g, ca);
  } catch (const mecoff::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 3;
  } catch (const mecoff::ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
