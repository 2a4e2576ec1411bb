#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <utility>
#include <optional>
#include <string>
#include <vector>

#include "ruinlab/errors.hpp"
#include "ruinlab/rng.hpp"

// Work-schedule lookahead on the adversarial instance: incomes are Y for the
// first k/2 periods and x Y afterwards with x ~ U[0,1]. Accounting in this
// module is income-first (assets_t = assets_{t-1} + y_t - z_t, a_1 = 0),
// utility is sqrt and there is no discounting.
namespace ruinlab::lookahead {

struct Instance {
  int k = 2;
  double x = 0.0;
  double level = 1.0;  // income ceiling Y
  std::vector<double> income;
};

inline Instance build_instance(int k, double x, double level = 1.0) {
  if (k < 2 || k % 2 != 0) throw ConfigError("lookahead k must be an even integer >= 2, got " + std::to_string(k));
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("lookahead x must lie in [0,1]");
  if (!(level > 0.0)) throw DomainError("income ceiling must be > 0");
  Instance inst{k, x, level, std::vector<double>(static_cast<std::size_t>(k), level)};
  for (int t = k / 2; t < k; ++t) inst.income[static_cast<std::size_t>(t)] = x * level;
  return inst;
}

struct Plan {
  std::vector<double> consumption;
  double utility = 0.0;
  double min_running_assets = 0.0;
  bool feasible = true;
};

// Income-first bookkeeping for an arbitrary consumption path.
inline Plan evaluate_path(const Instance& inst, std::vector<double> consumption) {
  Plan plan;
  double assets = 0.0;
  plan.min_running_assets = 0.0;
  for (std::size_t t = 0; t < consumption.size(); ++t) {
    assets += inst.income[t] - consumption[t];
    plan.min_running_assets = t == 0 ? assets : std::min(plan.min_running_assets, assets);
    plan.utility += std::sqrt(std::max(0.0, consumption[t]));
  }
  plan.feasible = plan.min_running_assets >= -1e-12;
  plan.consumption = std::move(consumption);
  return plan;
}

/// The k-lookahead agent sees x and consumes (1 + x) Y / 2 every period.
inline Plan lookahead_plan(const Instance& inst) {
  const double level = (1.0 + inst.x) / 2.0 * inst.level;
  return evaluate_path(inst, std::vector<double>(static_cast<std::size_t>(inst.k), level));
}

// k sqrt((1 + x) Y / 2).
inline double lookahead_utility(int k, double x, double level = 1.0) {
  build_instance(k, x, level);
  return k * std::sqrt((1.0 + x) / 2.0 * level);
}

enum class BaselineKind { consume_income, expected_constant, asset_fraction };

/// A no-lookahead rule that reacts only to realized income.
struct BaselineStrategy {
  BaselineKind kind = BaselineKind::consume_income;
  double parameter = 0.0;  // constant level, or the fraction phi

  static BaselineStrategy consume_income() { return {BaselineKind::consume_income, 0.0}; }
  static BaselineStrategy expected_constant(double level) { return {BaselineKind::expected_constant, level}; }
  static BaselineStrategy asset_fraction(double phi) {
    if (!(phi > 0.0 && phi <= 1.0)) throw DomainError("asset fraction must lie in (0,1]");
    return {BaselineKind::asset_fraction, phi};
  }

  std::string name() const {
    switch (kind) {
      case BaselineKind::consume_income: return "consume_income";
      case BaselineKind::expected_constant: return "expected_constant(" + std::to_string(parameter) + ")";
      case BaselineKind::asset_fraction: return "asset_fraction(" + std::to_string(parameter) + ")";
    }
    return "?";
  }
};

struct BaselineRun {
  double utility = 0.0;
  double first_half_sum = 0.0;  // S = z_1 + ... + z_{k/2}
  std::vector<double> consumption;
};

/// Simulates the strategy with each z_t clamped to [0, assets incl. y_t].
inline BaselineRun run_baseline(const BaselineStrategy& strategy, const Instance& inst) {
  BaselineRun run;
  run.consumption.reserve(inst.income.size());
  double assets = 0.0;
  for (std::size_t t = 0; t < inst.income.size(); ++t) {
    const double available = assets + inst.income[t];
    double want = 0.0;
    switch (strategy.kind) {
      case BaselineKind::consume_income: want = inst.income[t]; break;
      case BaselineKind::expected_constant: want = strategy.parameter; break;
      case BaselineKind::asset_fraction: want = strategy.parameter * available; break;
    }
    const double z = std::clamp(want, 0.0, available);
    assets = available - z;
    run.consumption.push_back(z);
    run.utility += std::sqrt(z);
    if (t < inst.income.size() / 2) run.first_half_sum += z;
  }
  return run;
}

/// Distribution of x: uniform on [0,1] or a point mass.
struct XDistribution {
  std::optional<double> point;

  static XDistribution uniform() { return {}; }
  static XDistribution degenerate(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("x must lie in [0,1]");
    return {x};
  }
  double mean() const { return point ? *point : 0.5; }
  double sample(RngStream& rng) const { return point ? *point : rng.uniform(); }
  // Equal-weight quadrature nodes (midpoints for the uniform case).
  std::vector<double> nodes(int n) const {
    if (point) return {*point};
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] = (j + 0.5) / n;
    return out;
  }
};

/// The strategies every gap estimate compares against.
inline std::vector<BaselineStrategy> strategy_zoo(const XDistribution& xs, double level = 1.0) {
  return {BaselineStrategy::consume_income(), BaselineStrategy::expected_constant((1.0 + xs.mean()) / 2.0 * level),
          BaselineStrategy::asset_fraction(0.25), BaselineStrategy::asset_fraction(0.5),
          BaselineStrategy::asset_fraction(0.75)};
}

/// A deterministic no-lookahead algorithm: fixed first-half consumption,
/// then equal division of what remains over the second half.
struct DeterministicPlan {
  int k = 2;
  double level = 1.0;
  std::vector<double> first_half;
  double expected_utility = 0.0;

  double first_half_sum() const {
    double s = 0.0;
    for (double z : first_half) s += z;
    return s;
  }

  double utility(double x) const {
    double total = 0.0;
    for (double z : first_half) total += std::sqrt(z);
    const double half = k / 2.0;
    const double remaining = half * level - first_half_sum();
    total += half * std::sqrt(std::max(0.0, remaining / half + x * level));
    return total;
  }
};

/// Exhaustive search over first-half plans z_t = (j / (n_grid - 1)) * available_t
/// for the plan with the highest mean utility over the x quadrature nodes.
inline DeterministicPlan brute_force_best_deterministic(int k, int n_grid, int n_x_samples,
                                                        const XDistribution& xs = XDistribution::uniform(),
                                                        double level = 1.0) {
  if (k < 2 || k % 2 != 0) throw ConfigError("lookahead k must be an even integer >= 2");
  if (k > 8) throw ConfigError("brute-force search supports k <= 8");
  if (n_grid < 16 || n_x_samples < 16) throw ConfigError("brute-force grids need at least 16 points");
  const auto x_nodes = xs.nodes(n_x_samples);
  const int half = k / 2;
  const double plans = std::pow(static_cast<double>(n_grid), half);
  if (plans * static_cast<double>(x_nodes.size()) > 1e8)
    throw ResourceError("brute-force search would exceed 1e8 plan evaluations");

  DeterministicPlan best{k, level, {}, -std::numeric_limits<double>::infinity()};
  DeterministicPlan current{k, level, std::vector<double>(static_cast<std::size_t>(half)), 0.0};
  auto search = [&](auto&& self, int t, double assets) -> void {
    if (t == half) {
      double sum = 0.0;
      for (double x : x_nodes) sum += current.utility(x);
      current.expected_utility = sum / static_cast<double>(x_nodes.size());
      if (current.expected_utility > best.expected_utility) best = current;
      return;
    }
    const double available = assets + level;
    for (int j = 0; j < n_grid; ++j) {
      const double z = available * (static_cast<double>(j) / (n_grid - 1));
      current.first_half[static_cast<std::size_t>(t)] = z;
      self(self, t + 1, available - z);
    }
  };
  search(search, 0, 0.0);
  return best;
}

/// sqrt(a) + (w - a) / (2 sqrt(a)) - (w - a)^2 / 8 - sqrt(w), which is
/// >= 0 for w in (0,1), a in (1/2,1).
inline double lemma1_margin(double w, double a) {
  if (!(w > 0.0 && w < 1.0)) throw DomainError("lemma margin needs w in (0,1)");
  if (!(a > 0.5 && a < 1.0)) throw DomainError("lemma margin needs a in (1/2,1)");
  const double d = w - a;
  const double sa = std::sqrt(a);
  return sa + d / (2.0 * sa) - d * d / 8.0 - std::sqrt(w);
}

struct Lemma1Check {
  double min_margin = 0.0;
  double argmin_w = 0.0;
  double argmin_a = 0.0;
  std::size_t cells = 0;
  bool passed = false;
};

/// Margin over w in {0.01..0.99} x a in {0.51..0.99}.
inline Lemma1Check lemma1_grid_check(double tolerance = 1e-12) {
  Lemma1Check out;
  out.min_margin = std::numeric_limits<double>::infinity();
  for (int wi = 1; wi <= 99; ++wi) {
    for (int ai = 51; ai <= 99; ++ai) {
      const double w = wi / 100.0;
      const double a = ai / 100.0;
      const double m = lemma1_margin(w, a);
      ++out.cells;
      if (m < out.min_margin) {
        out.min_margin = m;
        out.argmin_w = w;
        out.argmin_a = a;
      }
    }
  }
  out.passed = out.min_margin >= -tolerance;
  return out;
}

struct GapOptions {
  XDistribution x = XDistribution::uniform();
  double level = 1.0;
  // Add the brute-force deterministic plan to the baselines (k <= 8 only).
  bool include_brute_force = true;
  int brute_force_x_nodes = 200;
};

struct GapEstimate {
  int k = 0;
  std::size_t samples = 0;
  double mean_gap = 0.0;
  double standard_error = 0.0;
  std::string baseline;  // the baseline with the highest sample-mean utility
  std::vector<std::pair<std::string, double>> baseline_means;
};

namespace detail {
// Largest grid in {257, 129, 65, 33, 17} that keeps the search within 2e7 evaluations.
inline int brute_force_grid_for(int k, int x_nodes) {
  for (int n : {257, 129, 65, 33, 17}) {
    if (std::pow(static_cast<double>(n), k / 2) * x_nodes <= 2e7) return n;
  }
  return 17;
}
}  // namespace detail

/// Mean and standard error of lookahead utility minus the best baseline.
///
/// The baseline is chosen ex ante: the strategy (zoo member or brute-force
/// plan) with the highest mean utility over the same x draws. The per-draw
/// gap uses that one strategy for every draw.
inline GapEstimate estimate_gap(int k, std::size_t n_samples, RngStream& rng, const GapOptions& options = {}) {
  if (n_samples == 0) throw ConfigError("gap estimate needs at least one sample");
  if (k < 2 || k % 2 != 0) throw ConfigError("lookahead k must be an even integer >= 2, got " + std::to_string(k));
  std::vector<double> xs(n_samples);
  for (auto& x : xs) x = options.x.sample(rng);

  const auto zoo = strategy_zoo(options.x, options.level);
  std::optional<DeterministicPlan> brute;
  if (options.include_brute_force && k <= 8) {
    const int nx = options.x.point ? 16 : options.brute_force_x_nodes;
    brute = brute_force_best_deterministic(k, detail::brute_force_grid_for(k, nx), nx, options.x, options.level);
  }

  const std::size_t n_strategies = zoo.size() + (brute ? 1 : 0);
  std::vector<std::vector<double>> utilities(n_strategies, std::vector<double>(n_samples));
  std::vector<double> ahead(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const Instance inst = build_instance(k, xs[i], options.level);
    ahead[i] = lookahead_utility(k, xs[i], options.level);
    for (std::size_t s = 0; s < zoo.size(); ++s) utilities[s][i] = run_baseline(zoo[s], inst).utility;
    if (brute) utilities[zoo.size()][i] = brute->utility(xs[i]);
  }

  GapEstimate est;
  est.k = k;
  est.samples = n_samples;
  std::size_t best = 0;
  double best_mean = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < n_strategies; ++s) {
    double sum = 0.0;
    for (double v : utilities[s]) sum += v;
    const double mean = sum / static_cast<double>(n_samples);
    const std::string name = s < zoo.size() ? zoo[s].name() : std::string("brute_force_deterministic");
    est.baseline_means.emplace_back(name, mean);
    if (mean > best_mean) {
      best_mean = mean;
      best = s;
    }
  }
  est.baseline = est.baseline_means[best].first;

  double sum = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) sum += ahead[i] - utilities[best][i];
  est.mean_gap = sum / static_cast<double>(n_samples);
  double ss = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double d = ahead[i] - utilities[best][i] - est.mean_gap;
    ss += d * d;
  }
  const double n = static_cast<double>(n_samples);
  est.standard_error = n_samples > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return est;
}

}  // namespace ruinlab::lookahead
