// Acceptance runner: one PASS/FAIL line per criterion.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"

using namespace mecoff;
using testing_support::rel_close;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  std::string cli;
  std::string data;
  std::string work;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1 ------------------------------------------------------------------------

Outcome gev_closed_forms(const Context&) {
  const auto t0 = Clock::now();
  auto rng = make_rng(101);
  double worst_roundtrip = 0;
  for (int i = 0; i < 1000; ++i) {
    const GevParams p{4 * uniform_open01(rng) - 2, 0.1 + 3 * uniform_open01(rng), 1.6 * uniform_open01(rng) - 0.8};
    const double eps = 0.001 + 0.998 * uniform_open01(rng);
    worst_roundtrip = std::max(worst_roundtrip, std::abs(gev_cdf(p, gev_quantile(p, eps)) - (1 - eps)));
  }

  bool means_ok = true;
  std::string means;
  for (double xi : {-0.5, 0.0, 0.5, 0.9}) {
    const GevParams p{1, 2, xi};
    auto r = make_rng(202, static_cast<std::uint64_t>(std::llround((xi + 1) * 10)));
    const std::size_t n = 10000000;
    double mean = 0, m2 = 0;
    for (std::size_t k = 1; k <= n; ++k) {
      const double x = gev_sample(p, r);
      const double d = x - mean;
      mean += d / static_cast<double>(k);
      m2 += d * (x - mean);
    }
    const double se = std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
    const double z = std::abs(mean - gev_mean(p)) / se;
    means_ok = means_ok && z < 3;
    means += fmt(" xi=%g:%.2fse", xi, z);
  }

  double gap = 0;
  for (double eps : {0.001, 0.01, 0.1, 0.5, 0.9, 0.999}) {
    gap = std::max(gap, std::abs(gev_quantile({1, 2, 1e-8}, eps) - gev_quantile({1, 2, 0}, eps)));
    gap = std::max(gap, std::abs(gev_quantile({1, 2, -1e-8}, eps) - gev_quantile({1, 2, 0}, eps)));
  }
  const double secs = seconds_since(t0);
  return {worst_roundtrip < 1e-9 && means_ok && gap < 1e-5 && secs < 30,
          fmt("roundtrip=%.2e continuity=%.2e %.1fs", worst_roundtrip, gap, secs) + means};
}

// 2 ------------------------------------------------------------------------

Outcome mle_recovery(const Context&) {
  const auto t0 = Clock::now();
  const GevParams truths[] = {{2, 0.5, 0.1}, {0, 1, 0}};
  int good = 0;
  for (int s = 0; s < 20; ++s) {
    const auto& truth = truths[s % 2];
    auto rng = make_rng(300 + static_cast<std::uint64_t>(s));
    std::vector<double> v(500);
    for (auto& x : v) x = gev_sample(truth, rng);
    try {
      const auto f = fit_gev_mle({v, 1});
      good += std::abs(f.mu - truth.mu) < 0.1 && std::abs(f.sigma - truth.sigma) < 0.1 &&
              std::abs(f.xi - truth.xi) < 0.15;
    } catch (const Error&) {
    }
  }
  const double secs = seconds_since(t0);
  return {good >= 18 && secs < 60, fmt("%d/20 within tolerance %.1fs", good, secs)};
}

// 3 and 4 ------------------------------------------------------------------

struct SandwichCase {
  TaskGraph g;
  SystemParams p;
  double psi_star;
};

std::vector<SandwichCase> sandwich_cases() {
  std::vector<SandwichCase> out;
  auto rng = make_rng(400);
  while (out.size() < 200) {
    const auto n = static_cast<int>(uniform_int(rng, 3, 8));
    auto g = testing_support::random_dag(rng, n);
    auto p = testing_support::unit_params(rng, uniform_int(rng, 8, 40));
    if (!earliest_completion(g, all_local(g), p).feasible) continue;
    const double star = brute_force_optimum(g, p).psi_star;
    out.push_back({std::move(g), p, star});
  }
  return out;
}

std::vector<CgOptions> option_grid() {
  std::vector<CgOptions> out;
  for (double eps : {0.0, 0.03, 0.1, 0.5}) {
    for (auto mode : {PricingMode::exact_grid, PricingMode::alternating}) {
      CgOptions o;
      o.epsilon = eps;
      o.pricing = mode;
      out.push_back(o);
    }
  }
  return out;
}

Outcome oracle_sandwich(const Context&) {
  const auto t0 = Clock::now();
  int violations = 0, rows = 0;
  for (const auto& c : sandwich_cases()) {
    for (const auto& o : option_grid()) {
      for (const auto& r : solve(c.g, c.p, o).log) {
        ++rows;
        const double tol = 1e-9 * std::max(1.0, c.psi_star);
        if (r.psi_lower > c.psi_star + tol || c.psi_star > r.psi_upper + tol) ++violations;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs < 300, fmt("%d violations over %d iteration rows %.1fs", violations, rows, secs)};
}

Outcome epsilon_certificate(const Context&) {
  int violations = 0;
  std::map<ExitReason, int> exits;
  for (const auto& c : sandwich_cases()) {
    for (const auto& o : option_grid()) {
      const auto r = solve(c.g, c.p, o);
      ++exits[r.exit];
      if (r.exit == ExitReason::ratio_test && !(r.bounds.psi_upper <= (1 + o.epsilon) * r.bounds.psi_lower)) {
        ++violations;
      }
      if (r.exit == ExitReason::certified_optimal && !rel_close(r.bounds.psi_upper, c.psi_star)) ++violations;
      if (!check_constraints(c.g, r.decision, c.p).empty()) ++violations;
    }
  }
  std::string counts;
  for (const auto& [e, k] : exits) counts += fmt(" %s=%d", to_string(e), k);
  return {violations == 0, fmt("%d violations;", violations) + counts};
}

// 5 ------------------------------------------------------------------------

bool contiguous(std::uint64_t mask) {
  if (mask == 0) return true;
  const auto s = mask >> __builtin_ctzll(mask);
  return (s & (s + 1)) == 0;
}

Outcome one_climb(const Context&) {
  const auto t0 = Clock::now();
  auto rng = make_rng(500);
  int windows = 0, matches = 0;
  for (int i = 0; i < 100; ++i) {
    const auto g = testing_support::random_chain(rng, static_cast<int>(uniform_int(rng, 3, 10)));
    const auto p = testing_support::unit_params(rng, 1000);
    const auto o = brute_force_optimum(g, p);
    bool window = contiguous(o.best_mask);
    if (!window) {
      // A tie may hide a contiguous optimum behind a smaller mask.
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << (g.size() - 2)) && !window; ++m) {
        window = contiguous(m) && worst_case_expected_energy(g, assignment_from_mask(g, m), p).psi == o.psi_star;
      }
    }
    windows += window;
    matches += solve_sequential(g, p).energy.psi == o.psi_star;
  }
  const double secs = seconds_since(t0);
  return {windows == 100 && matches == 100 && secs < 120,
          fmt("windows %d/100, sequential exact %d/100 %.1fs", windows, matches, secs)};
}

// 6 ------------------------------------------------------------------------

Outcome parallel_threshold(const Context&) {
  const auto t0 = Clock::now();
  auto rng = make_rng(600);
  int matches = 0;
  for (int i = 0; i < 100; ++i) {
    const auto g = testing_support::random_fan(rng, static_cast<int>(uniform_int(rng, 3, 12)));
    const auto p = testing_support::unit_params(rng, 1000);
    const auto r = solve_parallel(g, p);
    matches += r.method == "parallel" && r.energy.psi == brute_force_optimum(g, p).psi_star;
  }
  const double secs = seconds_since(t0);
  return {matches == 100 && secs < 120, fmt("%d/100 equal to the oracle %.1fs", matches, secs)};
}

// 7 ------------------------------------------------------------------------

Outcome eps_m_trend(const Context& ctx) {
  const auto g = load_graph(ctx.data + "/smart_diagnosis.json");
  auto p = params_from_json(read_json_file(ctx.data + "/default_config.json"));
  p.deadline_slots = 900;
  bool ok = true;
  double prev_pct = std::numeric_limits<double>::infinity(), prev_psi = -1;
  std::string series;
  for (double e : {0.01, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3}) {
    p.set_extreme_probabilities(e, e);
    const auto r = solve(g, p, {p.epsilon});
    const double pct = 100.0 * static_cast<double>(r.decision.offloaded_count()) / static_cast<double>(g.size() - 2);
    ok = ok && pct <= prev_pct && r.energy.psi >= prev_psi;
    prev_pct = pct;
    prev_psi = r.energy.psi;
    series += fmt(" %g:%.0f%%/%.1f", e, pct, r.energy.psi);
  }
  return {ok, "eps_m:offload%/psi" + series};
}

// 8 ------------------------------------------------------------------------

Outcome scaling(const Context& ctx) {
  const auto t0 = Clock::now();
  const auto p = params_from_json(read_json_file(ctx.data + "/default_config.json"));
  std::map<int, double> wall;
  bool iterations_ok = true;
  std::string detail;
  for (int n : {10, 100, 1000}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      LayeredDagSpec spec;
      spec.nodes = n;
      spec.edge_prob = 0.05;
      auto rng = make_rng(seed, 0);
      const auto g = gen_layered_dag(spec, rng);
      const auto s = Clock::now();
      const auto r = solve(g, p, {p.epsilon});
      wall[n] += seconds_since(s);
      iterations_ok = iterations_ok && r.iterations <= n - 2;
      if (seed == 1) detail += fmt(" N=%d:%d iters", n, r.iterations);
    }
  }
  const double ratio = wall[1000] / wall[100];
  const double secs = seconds_since(t0);
  return {iterations_ok && ratio <= 30 && secs < 600,
          fmt("wall(1000)/wall(100)=%.1f %.1fs", ratio, secs) + detail};
}

// 9 ------------------------------------------------------------------------

Outcome exceedance_calibration(const Context& ctx) {
  const auto g = load_graph(ctx.data + "/smart_diagnosis.json");
  auto p = params_from_json(read_json_file(ctx.data + "/default_config.json"));
  auto rng = make_rng(900);
  auto fit_from = [&](const GevParams& law) {
    std::vector<double> v(2000);
    for (auto& x : v) x = gev_sample(law, rng);
    return fit_gev_mle({v, 1});
  };
  p.gev_v_up = fit_from(*p.gev_v_up);
  p.gev_v_down = fit_from(*p.gev_v_down);
  p.set_extreme_probabilities(0.1, 0.1);
  const auto decision = solve(g, p, {p.epsilon}).decision;

  TraceModel m;
  m.transfer_time_up = Distribution::gev_law(*p.gev_v_up);
  m.transfer_time_down = Distribution::gev_law(*p.gev_v_down);
  const auto rep = monte_carlo(g, decision, p, m, 10000);
  bool ok = !rep.edges.empty();
  double lo = 1, hi = 0;
  for (const auto& e : rep.edges) {
    ok = ok && std::abs(e.rate() - 0.10) <= 0.03;
    lo = std::min(lo, e.rate());
    hi = std::max(hi, e.rate());
  }
  return {ok, fmt("%zu cross edges, rates in [%.4f, %.4f]", rep.edges.size(), lo, hi)};
}

// 10 -----------------------------------------------------------------------

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism(const Context& ctx) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(ctx.work) / "determinism";
  fs::create_directories(dir);
  const std::string d = dir.string();

  {
    auto rng = make_rng(1000);
    std::vector<TraceRow> rows;
    for (int i = 0; i < 6000; ++i) {
      rows.push_back({static_cast<double>(i), 2e5 * uniform_open01(rng), 1e5 * uniform_open01(rng),
                      std::exp(14.5 + 0.4 * standard_normal(rng)), std::exp(15.5 + 0.4 * standard_normal(rng)),
                      800 + 600 * uniform_open01(rng), 300 + 300 * uniform_open01(rng)});
    }
    write_text_file(d + "/traces.csv", trace_csv_text(rows));
  }

  const std::string cfg = " --config " + ctx.data + "/default_config.json --seed 77";
  const std::string dag = ctx.data + "/smart_diagnosis.json";
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"gen", "gen --nodes 60 --edge-prob 0.1"},
      {"fit", "fit --traces " + d + "/traces.csv --k 50"},
      {"solve", "solve --dag " + dag + " --log @.log.csv"},
      {"oracle", "oracle --dag " + dag},
      {"simulate", "simulate --dag " + dag + " --model " + ctx.data + "/trace_model.json --replications 300"},
      {"compare", "compare --dag " + dag + " --random-samples 50"},
  };
  int identical = 0;
  std::string failed;
  for (const auto& [name, args] : commands) {
    std::string outputs[2];
    bool ran = true;
    for (int run = 0; run < 2; ++run) {
      const std::string base = d + "/" + name + "." + std::to_string(run);
      std::string a = args;
      if (const auto at = a.find('@'); at != std::string::npos) a.replace(at, 1, base);
      const std::string cmd = ctx.cli + cfg + " --out " + base + ".json " + a;
      ran = ran && std::system(cmd.c_str()) == 0;
      outputs[run] = slurp(base + ".json");
      if (args.find('@') != std::string::npos) outputs[run] += slurp(base + ".log.csv");
    }
    if (ran && !outputs[0].empty() && outputs[0] == outputs[1]) {
      ++identical;
    } else {
      failed += " " + name;
    }
  }
  const auto total = static_cast<int>(commands.size());
  return {identical == total, fmt("%d/%d commands byte-identical", identical, total) + failed};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  Context ctx;
  std::vector<int> only;
  app.add_option("--cli", ctx.cli, "Path to the mecoff executable")->required();
  app.add_option("--data", ctx.data, "Sample data directory")->required();
  app.add_option("--work", ctx.work, "Scratch directory")->required();
  app.add_option("--criterion", only, "Run only these criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Outcome(const Context&)>>> criteria = {
      {"gev-closed-forms", gev_closed_forms},
      {"mle-recovery", mle_recovery},
      {"oracle-sandwich", oracle_sandwich},
      {"epsilon-certificate", epsilon_certificate},
      {"one-climb", one_climb},
      {"parallel-threshold", parallel_threshold},
      {"eps-m-trend", eps_m_trend},
      {"scaling", scaling},
      {"exceedance-calibration", exceedance_calibration},
      {"determinism", determinism},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome o;
    try {
      o = criteria[i].second(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << " " << criteria[i].first << ": " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
