// ruinlab command-line front end.
//
//   ruinlab config    [FILE] [--set section.key=value ...]
//   ruinlab solve     [FILE] [--set ...]
//   ruinlab simulate  [FILE] [--set ...]
//   ruinlab bounds    --a0 A --Y Y [--beta B] [--B B --delta D --eps E --T t1,t2]
//   ruinlab lookahead --k 8,16 [--samples N] [--seed S] [--brute-force] [--lemma1-grid]
//   ruinlab verify    NAME [--out FILE]
//
// Exit status: 0 success, 2 invalid input, 3 solver did not converge,
// 4 verifier failure, 1 anything else.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ruinlab/ruinlab.hpp"

namespace {

using ruinlab::Json;

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitVerifierFailed = 4;

struct ConfigArgs {
  std::string file;
  std::vector<std::string> overrides;
};

void add_config_args(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("config", args.file, "Run configuration document");
  cmd->add_option("--set", args.overrides, "Override one key, e.g. --set model.beta=0.9")->type_name("SECTION.KEY=VALUE");
}

ruinlab::RunConfig load_config(const ConfigArgs& args) {
  std::string text;
  if (!args.file.empty()) {
    std::ifstream in(args.file, std::ios::binary);
    if (!in) throw ruinlab::ConfigError("cannot read config file " + args.file);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return ruinlab::parse_config(text, args.overrides);
}

std::string artifact(const ruinlab::RunConfig& cfg, const std::string& stem, const std::string& ext) {
  return cfg.output_path + "." + stem + "." + ext;
}

// Solves for the configured policy and writes the diagnostics sidecar. The
// sidecar is written on non-convergence too, then the error propagates.
std::shared_ptr<const ruinlab::Policy> solve_and_record(const ruinlab::RunConfig& cfg) {
  const std::string sidecar = artifact(cfg, "solver", "json");
  try {
    auto policy = std::make_shared<const ruinlab::Policy>(
        ruinlab::solve_policy(cfg.model, cfg.income, cfg.utility, cfg.solver_floor(), cfg.grid));
    ruinlab::write_file_atomic(sidecar, ruinlab::to_text(ruinlab::solver_diagnostics(*policy, cfg.grid)));
    return policy;
  } catch (const ruinlab::ConvergenceError& e) {
    ruinlab::write_file_atomic(
        sidecar, ruinlab::to_text(ruinlab::solver_diagnostics(e.iterations(), e.residual(), false, cfg.grid, 0)));
    throw;
  }
}

int cmd_config(const ConfigArgs& args) {
  std::cout << ruinlab::dump_config(load_config(args));
  return kExitOk;
}

int cmd_solve(const ConfigArgs& args) {
  const auto cfg = load_config(args);
  const auto policy = solve_and_record(cfg);
  if (cfg.output_format == "csv") {
    ruinlab::write_file_atomic(artifact(cfg, "policy", "csv"), ruinlab::policy_csv(*policy));
  } else {
    Json j;
    j["asset"] = policy->grid;
    j["value"] = policy->values;
    j["consumption"] = policy->consumption;
    ruinlab::write_file_atomic(artifact(cfg, "policy", "json"), ruinlab::to_text(j));
  }
  std::cerr << "converged in " << policy->iterations << " iterations, residual " << policy->residual << "\n";
  return kExitOk;
}

int cmd_simulate(const ConfigArgs& args) {
  const auto cfg = load_config(args);
  std::shared_ptr<const ruinlab::Policy> policy;
  if (cfg.needs_policy()) policy = solve_and_record(cfg);
  const auto cohort = ruinlab::make_cohort_config(cfg, policy);
  const auto hist = ruinlab::run_cohort(cohort);
  if (cfg.output_format == "csv") {
    ruinlab::write_file_atomic(artifact(cfg, "histogram", "csv"), ruinlab::histogram_csv(hist));
  } else {
    ruinlab::write_file_atomic(artifact(cfg, "histogram", "json"), ruinlab::to_text(ruinlab::histogram_json(hist)));
  }
  ruinlab::write_file_atomic(artifact(cfg, "summary", "json"), ruinlab::to_text(ruinlab::summary_json(hist, cfg)));
  return kExitOk;
}

struct BoundsArgs {
  std::optional<double> a0, y, b, delta, eps, beta;
  std::vector<double> horizons;
  std::string utility = "sqrt";
  double lambda = 0.5;
};

int cmd_bounds(const BoundsArgs& args) {
  Json out;
  const auto u = ruinlab::UtilityFunction::make(ruinlab::utility_kind_from_string(args.utility), args.lambda);
  if (args.y && args.beta) {
    Json o;
    o["utility"] = std::string(ruinlab::to_string(u.kind()));
    if (u.is_isoelastic()) o["lambda"] = u.lambda();
    o["jensen_cap"] = ruinlab::jensen_cap(u, *args.y, *args.beta);
    if (args.a0) {
      const auto v = ruinlab::obligatory_probe(*args.a0, u, *args.y, *args.beta);
      o["a0"] = v.a0;
      o["threshold"] = v.threshold;
      o["immediate_utility"] = v.immediate_utility;
      o["verdict"] = std::string(ruinlab::to_string(v.verdict));
    }
    out["obligatory"] = o;
  }
  if (args.b) {
    if (!args.a0 || !args.y || !args.delta || !args.eps)
      throw ruinlab::ConfigError("the ruin bound needs --a0, --Y, --B, --delta and --eps");
    const auto r = ruinlab::hoeffding_report(*args.a0, *args.y, *args.b, *args.delta, *args.eps);
    Json h;
    h["drift"] = r.drift;
    h["rate"] = r.rate;
    h["threshold"] = r.threshold;
    h["bounds"] = Json::array();
    for (double t : args.horizons) h["bounds"].push_back(Json{{"T", t}, {"bound", r.bound_at(t)}});
    out["hoeffding"] = h;
  }
  if (out.empty()) throw ruinlab::ConfigError("nothing to report: pass --Y and --beta, or --B with --a0 --Y --delta --eps");
  std::cout << ruinlab::to_text(out);
  return kExitOk;
}

struct LookaheadArgs {
  std::vector<int> ks;
  std::size_t samples = 10000;
  std::uint64_t seed = 7;
  bool brute_force = false;
  bool lemma1 = false;
};

int cmd_lookahead(const LookaheadArgs& args) {
  if (args.ks.empty() && !args.lemma1) throw ruinlab::ConfigError("pass --k and/or --lemma1-grid");
  Json out;
  bool ok = true;
  if (!args.ks.empty()) {
    out["samples"] = args.samples;
    out["seed"] = args.seed;
    out["results"] = Json::array();
    std::vector<ruinlab::lookahead::GapEstimate> est;
    for (int k : args.ks) {
      ruinlab::RngStream rng(args.seed, static_cast<std::uint64_t>(k));
      ruinlab::lookahead::GapOptions opt;
      opt.include_brute_force = args.brute_force;
      est.push_back(ruinlab::lookahead::estimate_gap(k, args.samples, rng, opt));
      const auto& e = est.back();
      Json baselines = Json::object();
      for (const auto& [name, mean] : e.baseline_means) baselines[name] = mean;
      out["results"].push_back(Json{{"k", k},
                                    {"mean_gap", e.mean_gap},
                                    {"standard_error", e.standard_error},
                                    {"baseline", e.baseline},
                                    {"baseline_mean_utility", baselines}});
    }
    out["ratios"] = Json::array();
    for (std::size_t i = 1; i < est.size(); ++i) {
      out["ratios"].push_back(Json{{"k_from", est[i - 1].k},
                                   {"k_to", est[i].k},
                                   {"ratio", est[i].mean_gap / est[i - 1].mean_gap}});
    }
  }
  if (args.lemma1) {
    const auto c = ruinlab::lookahead::lemma1_grid_check();
    out["lemma1"] = Json{{"cells", c.cells},
                         {"min_margin", c.min_margin},
                         {"argmin_w", c.argmin_w},
                         {"argmin_a", c.argmin_a},
                         {"pass", c.passed}};
    ok = c.passed;
  }
  std::cout << ruinlab::to_text(out);
  return ok ? kExitOk : kExitVerifierFailed;
}

int cmd_verify(const std::string& name, const std::string& out_path) {
  const auto report = ruinlab::verify::run(name);
  const std::string text = ruinlab::to_text(report.to_json());
  if (out_path.empty()) {
    std::cout << text;
  } else {
    ruinlab::write_file_atomic(out_path, text);
    std::cout << name << ": " << (report.passed ? "pass" : "FAIL") << " (" << report.asserted_cells
              << " asserted cells, " << report.failed_cells << " failed)\n";
  }
  return report.passed ? kExitOk : kExitVerifierFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consumption, ruin and bounded-agency toolkit"};
  app.require_subcommand(1);

  ConfigArgs config_args;
  auto* config_cmd = app.add_subcommand("config", "Print the fully resolved configuration");
  add_config_args(config_cmd, config_args);
  auto* solve_cmd = app.add_subcommand("solve", "Solve for the optimal consumption policy");
  add_config_args(solve_cmd, config_args);
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a cohort and write its ruin-time histogram");
  add_config_args(simulate_cmd, config_args);

  BoundsArgs bounds;
  auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate the obligatory cap and the impulsive ruin bound");
  bounds_cmd->add_option("--a0", bounds.a0, "Initial assets");
  bounds_cmd->add_option("--Y", bounds.y, "Mean income");
  bounds_cmd->add_option("--B", bounds.b, "Mean subsistence expenditure");
  bounds_cmd->add_option("--delta", bounds.delta, "Income half-width");
  bounds_cmd->add_option("--eps", bounds.eps, "Subsistence half-width");
  bounds_cmd->add_option("--T", bounds.horizons, "Horizons for the bound table")->delimiter(',');
  bounds_cmd->add_option("--beta", bounds.beta, "Discount factor");
  bounds_cmd->add_option("--utility", bounds.utility, "sqrt, log, isoelastic_shifted, isoelastic_unshifted");
  bounds_cmd->add_option("--lambda", bounds.lambda, "Isoelastic curvature");

  LookaheadArgs look;
  auto* look_cmd = app.add_subcommand("lookahead", "Estimate the value of lookahead");
  look_cmd->add_option("--k", look.ks, "Even horizons, comma separated")->delimiter(',');
  look_cmd->add_option("--samples", look.samples, "Monte Carlo samples per k");
  look_cmd->add_option("--seed", look.seed, "Master seed");
  look_cmd->add_flag("--brute-force", look.brute_force, "Include the best deterministic plan (k <= 8)");
  look_cmd->add_flag("--lemma1-grid", look.lemma1, "Check the sqrt tangent margin on its grid");

  std::string verifier;
  std::string verify_out;
  auto* verify_cmd = app.add_subcommand("verify", "Run a numerical verifier sweep");
  verify_cmd->add_option("name", verifier, "thm1, thm2, thm4, thm5 or lemma1")->required();
  verify_cmd->add_option("--out", verify_out, "Write the full JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*config_cmd) return cmd_config(config_args);
    if (*solve_cmd) return cmd_solve(config_args);
    if (*simulate_cmd) return cmd_simulate(config_args);
    if (*bounds_cmd) return cmd_bounds(bounds);
    if (*look_cmd) return cmd_lookahead(look);
    if (*verify_cmd) return cmd_verify(verifier, verify_out);
  } catch (const ruinlab::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const ruinlab::ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  } catch (const ruinlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return kExitOther;
}
