#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ruinlab/errors.hpp"
#include "ruinlab/model.hpp"
#include "ruinlab/parallel.hpp"
#include "ruinlab/utility.hpp"

namespace ruinlab {

/// Discretization and stopping rule for value iteration.
struct GridSpec {
  double a_min = 0.0;
  double a_max = 10.0;
  int n_points = 2001;
  int n_consumption_points = 513;
  double tolerance = 1e-6;
  long max_iterations = 10000;
  int n_income_nodes = 7;
  // Smallest admissible consumption; 0 selects 1e-6 * a_max.
  double c_floor = 0.0;

  double effective_c_floor() const { return c_floor > 0.0 ? c_floor : 1e-6 * a_max; }

  void validate() const {
    if (!(a_min >= 0.0)) throw ConfigError("grid a_min must be >= 0");
    if (!(a_max > a_min)) throw ConfigError("grid a_max must exceed a_min");
    if (n_points < 2) throw ConfigError("grid n_points must be >= 2");
    if (n_consumption_points < 2) throw ConfigError("grid n_consumption_points must be >= 2");
    if (!(tolerance > 0.0)) throw ConfigError("grid tolerance must be > 0");
    if (max_iterations < 1) throw ConfigError("grid max_iterations must be >= 1");
    if (n_income_nodes < 1) throw ConfigError("grid n_income_nodes must be >= 1");
    if (!(c_floor >= 0.0)) throw ConfigError("grid c_floor must be >= 0");
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Defaults sized to the problem: a_max = 4 max(a0, 20 Y) and a tolerance of
/// 1e-6 times the utility scale max(1, |u(Y + 1)|).
inline GridSpec default_grid_spec(const ModelParams& params, const IncomeProcess& income, const UtilityFunction& u) {
  GridSpec spec;
  const double scale_assets = std::max(params.initial_assets, 20.0 * income.mean());
  spec.a_max = scale_assets > 0.0 ? 4.0 * scale_assets : 10.0;
  spec.tolerance = 1e-6 * std::max(1.0, std::abs(u(income.mean() + 1.0)));
  return spec;
}

/// n_points equally spaced values from a_min to a_max inclusive.
inline std::vector<double> build_grid(const GridSpec& spec) {
  if (!(spec.a_max > spec.a_min)) throw ConfigError("grid a_max must exceed a_min");
  if (spec.n_points < 2) throw ConfigError("grid n_points must be >= 2");
  std::vector<double> grid(static_cast<std::size_t>(spec.n_points));
  const double span = spec.a_max - spec.a_min;
  const double last = static_cast<double>(spec.n_points - 1);
  for (int i = 0; i < spec.n_points; ++i) grid[static_cast<std::size_t>(i)] = spec.a_min + span * (i / last);
  grid.back() = spec.a_max;
  return grid;
}

// Linear interpolation on an equally spaced grid, flat outside it.
inline double interpolate_uniform(std::span<const double> grid, std::span<const double> table, double x) {
  const std::size_t n = grid.size();
  if (x <= grid.front()) return table.front();
  if (x >= grid.back()) return table.back();
  const double h = (grid.back() - grid.front()) / static_cast<double>(n - 1);
  const double pos = (x - grid.front()) / h;
  std::size_t j = static_cast<std::size_t>(pos);
  if (j >= n - 1) j = n - 2;
  const double w = pos - static_cast<double>(j);
  return table[j] + w * (table[j + 1] - table[j]);
}

struct BellmanStep {
  std::vector<double> values;
  std::vector<double> consumption;
  double residual = 0.0;
  // Grid points whose lower consumption bound exceeds the asset level.
  std::vector<std::size_t> infeasible_points;
};

/// Bellman operator on a fixed grid:
///   (TV)(a_i) = max_{c in [c_lo, a_i]} u(c) + beta * mean_n V(R (a_i - c) + y_n)
/// where V interpolates the previous table linearly, next-period assets <= 0
/// are worth 0 and c ranges over n_consumption_points equally spaced points.
/// Utilities of all candidate consumptions are tabulated once.
class BellmanOperator {
 public:
  BellmanOperator(std::vector<double> grid, const ModelParams& params, std::vector<double> income_nodes,
                  const UtilityFunction& u, double c_lo, int n_consumption_points,
                  unsigned threads = default_thread_count())
      : grid_(std::move(grid)),
        beta_(params.beta),
        return_rate_(params.return_rate),
        income_nodes_(std::move(income_nodes)),
        c_lo_(c_lo),
        nc_(static_cast<std::size_t>(n_consumption_points)),
        threads_(threads) {
    if (grid_.size() < 2) throw ConfigError("asset grid needs at least two points");
    if (income_nodes_.empty()) throw ConfigError("income expectation needs at least one node");
    if (!(c_lo_ > 0.0)) throw ConfigError("lower consumption bound must be > 0");
    const std::size_t n = grid_.size();
    h_ = (grid_.back() - grid_.front()) / static_cast<double>(n - 1);
    inv_h_ = 1.0 / h_;
    feasible_.assign(n, 0);
    utility_.assign(n * nc_, 0.0);
    savings_.assign(n * nc_, 0.0);
    infeasible_value_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = grid_[i];
      if (a < c_lo_) {
        infeasible_.push_back(i);
        infeasible_value_[i] = a > 0.0 ? u(a) : 0.0;
        continue;
      }
      feasible_[i] = 1;
      for (std::size_t j = 0; j < nc_; ++j) {
        const double frac = static_cast<double>(j) / static_cast<double>(nc_ - 1);
        const double c = j + 1 == nc_ ? a : c_lo_ + (a - c_lo_) * frac;
        utility_[i * nc_ + j] = u(c);
        savings_[i * nc_ + j] = a - c;
      }
    }
  }

  std::span<const double> grid() const noexcept { return grid_; }
  double c_lo() const noexcept { return c_lo_; }

  // Consumption candidate j at grid point i.
  double candidate(std::size_t i, std::size_t j) const { return grid_[i] - savings_[i * nc_ + j]; }

  // Continuation value of next-period assets under table V; ruin is worth 0.
  double continuation(std::span<const double> values, double next) const {
    if (next <= 0.0) return 0.0;
    const double pos = (next - grid_.front()) * inv_h_;
    if (pos <= 0.0) return values.front();
    const std::size_t last = grid_.size() - 1;
    if (pos >= static_cast<double>(last)) return values[last];
    const std::size_t j = std::min(static_cast<std::size_t>(pos), last - 1);
    const double w = pos - static_cast<double>(j);
    return values[j] + w * (values[j + 1] - values[j]);
  }

  double expected_continuation(std::span<const double> values, double saved) const {
    double sum = 0.0;
    for (double y : income_nodes_) sum += continuation(values, return_rate_ * saved + y);
    return sum / static_cast<double>(income_nodes_.size());
  }

  BellmanStep apply(std::span<const double> values) const {
    const std::size_t n = grid_.size();
    if (values.size() != n) throw ConfigError("value table length does not match the grid");
    BellmanStep step;
    step.values.assign(n, 0.0);
    step.consumption.assign(n, 0.0);
    step.infeasible_points = infeasible_;
    parallel_chunks(n, threads_, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        if (!feasible_[i]) {
          step.values[i] = infeasible_value_[i];
          step.consumption[i] = grid_[i];
          continue;
        }
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < nc_; ++j) {
          const double v = utility_[i * nc_ + j] + beta_ * expected_continuation(values, savings_[i * nc_ + j]);
          if (v > best) {
            best = v;
            best_j = j;
          }
        }
        step.values[i] = best;
        step.consumption[i] = candidate(i, best_j);
      }
    });
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, std::abs(step.values[i] - values[i]));
    step.residual = residual;
    return step;
  }

 private:
  std::vector<double> grid_;
  double beta_;
  double return_rate_;
  std::vector<double> income_nodes_;
  double c_lo_;
  std::size_t nc_;
  unsigned threads_;
  double h_ = 1.0;
  double inv_h_ = 1.0;
  std::vector<char> feasible_;
  std::vector<double> utility_;
  std::vector<double> savings_;
  std::vector<double> infeasible_value_;
  std::vector<std::size_t> infeasible_;
};

// Lower consumption bound: the subsistence mean when a floor applies, never
// below the grid's c_floor.
inline double consumption_lower_bound(const GridSpec& spec, const std::optional<SubsistenceProcess>& floor) {
  const double c_floor = spec.effective_c_floor();
  return floor ? std::max(floor->mean(), c_floor) : c_floor;
}

/// One application of the Bellman operator to `values`.
inline BellmanStep bellman_update(std::span<const double> values, std::span<const double> grid,
                                  const ModelParams& params, const IncomeProcess& income, const UtilityFunction& u,
                                  const std::optional<SubsistenceProcess>& floor, const GridSpec& spec) {
  BellmanOperator op(std::vector<double>(grid.begin(), grid.end()), params, income.quantile_nodes(spec.n_income_nodes),
                     u, consumption_lower_bound(spec, floor), spec.n_consumption_points);
  return op.apply(values);
}

/// Converged value function and consumption rule on the asset grid.
struct Policy {
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> consumption;
  double c_floor = 0.0;
  long iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;
  std::vector<std::size_t> infeasible_points;
};

/// Value iteration from the zero table until the sup-norm residual is at or
/// below spec.tolerance. Ties in the argmax go to the smaller consumption.
inline Policy solve_policy(const ModelParams& params, const IncomeProcess& income, const UtilityFunction& u,
                           const std::optional<SubsistenceProcess>& floor, const GridSpec& spec,
                           unsigned threads = default_thread_count()) {
  params.validate();
  spec.validate();
  BellmanOperator op(build_grid(spec), params, income.quantile_nodes(spec.n_income_nodes), u,
                     consumption_lower_bound(spec, floor), spec.n_consumption_points, threads);
  std::vector<double> values(static_cast<std::size_t>(spec.n_points), 0.0);
  Policy policy;
  policy.c_floor = spec.effective_c_floor();
  for (long it = 1; it <= spec.max_iterations; ++it) {
    BellmanStep step = op.apply(values);
    policy.residual_history.push_back(step.residual);
    values = std::move(step.values);
    if (step.residual <= spec.tolerance) {
      policy.grid.assign(op.grid().begin(), op.grid().end());
      policy.values = std::move(values);
      policy.consumption = std::move(step.consumption);
      policy.iterations = it;
      policy.residual = step.residual;
      policy.infeasible_points = std::move(step.infeasible_points);
      return policy;
    }
  }
  const double last = policy.residual_history.back();
  throw ConvergenceError("value iteration did not converge within " + std::to_string(spec.max_iterations) +
                             " iterations (last residual " + std::to_string(last) + ")",
                         last, spec.max_iterations);
}

/// Value tables of the finite-horizon problem with a deterministic income
/// y_t per period: V_H = 0 and V_t = T_{y_t} V_{t+1}. Element t of the
/// result is V_t; the last element is the zero terminal table.
inline std::vector<std::vector<double>> finite_horizon_values(const ModelParams& params,
                                                              std::span<const double> incomes,
                                                              const UtilityFunction& u, const GridSpec& spec,
                                                              unsigned threads = default_thread_count()) {
  spec.validate();
  const auto grid = build_grid(spec);
  std::vector<std::vector<double>> tables(incomes.size() + 1, std::vector<double>(grid.size(), 0.0));
  for (std::size_t t = incomes.size(); t-- > 0;) {
    BellmanOperator op(grid, params, {incomes[t]}, u, spec.effective_c_floor(), spec.n_consumption_points, threads);
    tables[t] = op.apply(tables[t + 1]).values;
  }
  return tables;
}

/// Consumption at assets a: linear interpolation of the table (flat beyond
/// the grid), clamped to [c_floor, a].
inline double policy_consume(const Policy& policy, double a) {
  if (policy.grid.size() < 2) throw ConfigError("policy has no grid");
  const double c = interpolate_uniform(policy.grid, policy.consumption, a);
  return std::min(std::max(c, policy.c_floor), a);
}

}  // namespace ruinlab
