// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ruinlab/emit.hpp"
#include "ruinlab/ruinlab.hpp"
#include "support/oracles.hpp"

using namespace ruinlab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;  // <= 0 means no limit
  std::function<Outcome()> body;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

RuinHistogram run_config(const RunConfig& cfg, unsigned threads = default_thread_count()) {
  std::shared_ptr<const Policy> policy;
  if (cfg.needs_policy())
    policy = std::make_shared<const Policy>(
        solve_policy(cfg.model, cfg.income, cfg.utility, cfg.solver_floor(), cfg.grid, threads));
  return run_cohort(make_cohort_config(cfg, policy), threads);
}

Outcome cake_eating() {
  GridSpec g;
  g.a_min = 0;
  g.a_max = 10;
  g.n_points = 2001;
  g.n_consumption_points = 513;
  const auto p = solve_policy({0.5, 1.0, 1.0}, IncomeProcess::constant(0.0), UtilityFunction::sqrt(), std::nullopt, g);
  const double c = policy_consume(p, 1.0);
  const double v = interpolate_uniform(p.grid, p.values, 1.0);
  const double k = oracle::cake_value_coefficient(0.5);
  return {std::abs(c - oracle::cake_consumption_share(0.5)) <= 0.01 && std::abs(v - k) <= 0.005,
          "c(1)=" + fmt("%.6f", c) + " V(1)=" + fmt("%.6f", v) + " closed form " + fmt("%.5f", k)};
}

Outcome two_period_oracle() {
  RngStream rng(777, 0);
  Outcome out;
  double worst_ratio = 0.0;
  const int instances = 24;
  for (int trial = 0; trial < instances; ++trial) {
    oracle::DeterministicProblem prob;
    prob.beta = rng.uniform(0.3, 0.97);
    prob.return_rate = rng.uniform(0.95, 1.1);
    const std::size_t horizon = 2 + rng.next_u64() % 2;
    for (std::size_t t = 0; t < horizon; ++t) prob.incomes.push_back(rng.uniform(0.0, 2.0));
    prob.u = trial % 3 == 0 ? UtilityFunction::sqrt()
             : trial % 3 == 1 ? UtilityFunction::log()
                              : UtilityFunction::isoelastic_unshifted(rng.uniform(0.2, 0.8));
    GridSpec spec;
    spec.a_max = 20;
    spec.n_points = 201;
    spec.n_consumption_points = 33;
    spec.c_floor = 1e-3;
    prob.c_lo = spec.effective_c_floor();
    prob.n_consumption = spec.n_consumption_points;
    const auto tables = finite_horizon_values({prob.beta, prob.return_rate, 0.0}, prob.incomes, prob.u, spec);
    const double bound = oracle::interpolation_error_bound(tables, prob.beta) + 1e-12;
    const auto grid = build_grid(spec);
    for (std::size_t i = 0; i <= 60; i += 6) {
      const double err = std::abs(tables[0][i] - oracle::brute_force_value(prob, grid[i]));
      worst_ratio = std::max(worst_ratio, err / bound);
      if (err > bound) out.pass = false;
    }
  }
  out.detail = std::to_string(instances) + " instances, worst error/bound " + fmt("%.3f", worst_ratio);
  return out;
}

Outcome contraction() {
  RngStream rng(3, 0);
  Outcome out;
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const ModelParams p{rng.uniform(0.5, 0.95), rng.uniform(1.0, 1.05), 1.0};
    const UtilityFunction u = trial % 2 == 0 ? UtilityFunction::sqrt() : UtilityFunction::isoelastic_unshifted(0.3);
    const IncomeProcess y = trial % 2 == 0 ? IncomeProcess::bounded_uniform(1.0, rng.uniform(0.1, 0.9))
                                           : IncomeProcess::lognormal(1.0, rng.uniform(0.05, 0.4));
    GridSpec spec;
    spec.a_max = rng.uniform(10, 40);
    spec.n_points = 401;
    spec.n_consumption_points = 65;
    spec.tolerance = 1e-8;
    const auto policy = solve_policy(p, y, u, std::nullopt, spec);
    const auto& r = policy.residual_history;
    for (std::size_t k = 5; k < r.size(); ++k) {
      const double limit = r[0] * std::pow(p.beta, static_cast<double>(k)) * (1 + 1e-6);
      worst = std::max(worst, r[k] / limit);
      if (r[k] > limit) out.pass = false;
    }
  }
  out.detail = "5 configs, worst residual/limit " + fmt("%.4f", worst);
  return out;
}

Outcome obligatory_probe_example() {
  const auto v = obligatory_probe(5.0, UtilityFunction::sqrt(), 1.0, 0.5);
  const bool ok = std::abs(v.cap - 2.0) < 1e-12 && std::abs(v.threshold - 4.0) < 1e-12 &&
                  v.verdict == ObligatoryOutcome::consume_all_preferred &&
                  std::abs(v.immediate_utility - 2.23607) < 5e-6 && v.immediate_utility > v.cap;
  return {ok, "cap " + fmt("%.6g", v.cap) + ", threshold " + fmt("%.6g", v.threshold) + ", u(a0) " +
                  fmt("%.6f", v.immediate_utility) + ", " + std::string(to_string(v.verdict))};
}

Outcome hoeffding() {
  const auto r = verify::impulsive_ruin(20000, 2024);
  const double b40 = hoeffding_bound(2.0, 1.0, 1.2, 0.1, 0.1, 40.0);
  Outcome out{r.passed && std::abs(b40 - 6.7379e-3) < 5e-8, "bound(40)=" + fmt("%.7g", b40) + ";"};
  for (const auto& cell : r.cells)
    out.detail += " T=" + std::to_string(cell["T"].get<int>()) + " survival " +
                  fmt("%.4g", cell["empirical_survival"].get<double>()) + " <= " +
                  fmt("%.4g", cell["limit"].get<double>());
  return out;
}

Outcome improvement_sweep() {
  const auto r = verify::terminal_improvement();
  return {r.passed, std::to_string(r.asserted_cells) + " cells, " + std::to_string(r.failed_cells) + " failed"};
}

Outcome true_agency_simulation() {
  const auto cfg = parse_config(
      "[scenario]\nkind = true_agency\nfixed_expense = 1\n[utility]\nkind = sqrt\n"
      "[model]\nbeta = 0.95\ninitial_assets = 10\n[income]\nkind = constant\nmean = 1\n"
      "[simulation]\nn_agents = 1000\nhorizon = 200\nmaster_seed = 5\n");
  const auto h = run_config(cfg);
  return {h.ruined() == 0 && h.survivors == 1000,
          std::to_string(h.ruined()) + " ruined, " + std::to_string(h.survivors) + " survived"};
}

Outcome terminal_split() {
  const auto r = verify::terminal_split();
  std::size_t foc = 0, informational = 0, informational_negative = 0;
  for (const auto& cell : r.cells) {
    if (cell["check"] == "foc") ++foc;
    if (!cell["asserted"].get<bool>()) {
      ++informational;
      if (!cell["pass"].get<bool>()) ++informational_negative;
    }
  }
  return {r.passed && foc == 45,
          std::to_string(foc) + " FOC cells, " + std::to_string(r.asserted_cells) + " asserted; " +
              std::to_string(informational) + " informational (" + std::to_string(informational_negative) +
              " negative gains)"};
}

Outcome tangent_margin() {
  const auto c = lookahead::lemma1_grid_check();
  return {c.passed && c.cells == 99 * 49,
          std::to_string(c.cells) + " cells, min margin " + fmt("%.3g", c.min_margin)};
}

Outcome lookahead_gap() {
  Outcome out;
  const std::size_t n = 10000;
  const auto plan = lookahead::brute_force_best_deterministic(2, 257, 200);
  RngStream rng(7, 2);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform();
    const double g = lookahead::lookahead_utility(2, x) - plan.utility(x);
    sum += g;
    sum_sq += g * g;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / (n - 1));
  const bool gap_ok = mean > 5.0 * se;

  lookahead::GapOptions opt;
  opt.include_brute_force = false;
  RngStream r8(7, 8), r16(7, 16);
  const auto g8 = lookahead::estimate_gap(8, n, r8, opt);
  const auto g16 = lookahead::estimate_gap(16, n, r16, opt);
  const double ratio = g16.mean_gap / g8.mean_gap;
  out.pass = gap_ok && ratio >= 1.7 && ratio <= 2.3;
  out.detail = "k=2 gap " + fmt("%.5f", mean) + " (" + fmt("%.1f", mean / se) + " SE); gap(16)/gap(8) " +
               fmt("%.4f", ratio);
  return out;
}

Outcome preset_reproduction() {
  const auto summary_of = [](const char* preset) {
    const auto cfg = parse_config(std::string("[scenario]\npreset = ") + preset + "\n",
                                  {"simulation.n_agents=5000", "simulation.horizon=100", "simulation.master_seed=1"});
    return summarize(run_config(cfg));
  };
  const auto general = summary_of("general");
  const auto low = summary_of("low_income");
  const auto high = summary_of("high_income");
  const bool ok = general.fraction_ruined_first_10 > 0.0 && general.mode_ruin_time && *general.mode_ruin_time < 10 &&
                  low.median_ruin_time && high.median_ruin_time && *low.median_ruin_time < *high.median_ruin_time;
  const auto show = [](const std::optional<double>& m) { return m ? fmt("%g", *m) : std::string("none"); };
  return {ok, "general first10 " + fmt("%.4f", general.fraction_ruined_first_10) + " mode " +
                  (general.mode_ruin_time ? std::to_string(*general.mode_ruin_time) : "none") +
                  "; median low " + show(low.median_ruin_time) + " vs high " + show(high.median_ruin_time)};
}

Outcome determinism() {
  const std::vector<RunConfig> configs{
      parse_config("[scenario]\npreset = low_income\n", {"simulation.n_agents=3000", "simulation.master_seed=9"}),
      parse_config(
          "[scenario]\nkind = impulsive\nuse_policy = false\n[utility]\nkind = sqrt\n"
          "[model]\nbeta = 0.9\ninitial_assets = 2\n[income]\nkind = bounded_uniform\nmean = 1\nhalf_width = 0.1\n"
          "[subsistence]\nkind = bounded_uniform\nmean = 1.2\nhalf_width = 0.1\n"
          "[simulation]\nn_agents = 20000\nhorizon = 40\nmaster_seed = 11\n")};
  const unsigned hw = default_thread_count();
  int identical = 0, compared = 0;
  for (const auto& cfg : configs) {
    std::vector<std::string> reference;
    for (unsigned threads : {1u, hw, 1u, 4u}) {
      const auto h = run_config(cfg, threads);
      const std::vector<std::string> texts{histogram_csv(h), to_text(histogram_json(h)), to_text(summary_json(h, cfg))};
      if (reference.empty()) {
        reference = texts;
        continue;
      }
      ++compared;
      if (texts == reference) ++identical;
    }
  }
  return {identical == compared, std::to_string(identical) + "/" + std::to_string(compared) +
                                     " reruns byte-identical (threads 1, " + std::to_string(hw) + ", 1, 4)"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "cake-eating oracle", 10, cake_eating},
      {2, "finite-horizon brute-force oracle", 30, two_period_oracle},
      {3, "Bellman contraction", 0, contraction},
      {4, "obligatory cap probe", 0, obligatory_probe_example},
      {5, "impulsive ruin bound", 60, hoeffding},
      {6, "terminal improvement sweep", 5, improvement_sweep},
      {7, "true agency cohort never ruins", 60, true_agency_simulation},
      {8, "terminal split", 0, terminal_split},
      {9, "tangent margin grid", 0, tangent_margin},
      {10, "lookahead gap", 120, lookahead_gap},
      {11, "preset cohorts", 300, preset_reproduction},
      {12, "determinism across worker counts", 0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.body();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0 && secs > c.time_limit_s) {
      out.pass = false;
      out.detail += "; over the " + fmt("%g", c.time_limit_s) + " s limit";
    }
    if (!out.pass) ++failures;
    std::printf("%s %2d %s: %s [%.2f s]\n", out.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), out.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
