#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ruinlab/utility.hpp"

namespace ruinlab {

/// a_{t+1} = R (a_t - c_t) + y_t, evaluated as subtract, multiply, add.
inline double step_assets(double assets, double consumption, double return_rate, double income) {
  const double saved = assets - consumption;
  const double grown = return_rate * saved;
  return grown + income;
}

/// Smallest t with assets[t+1] <= 0, or nullopt when the series never hits zero.
inline std::optional<std::size_t> detect_ruin(std::span<const double> assets) {
  for (std::size_t t = 0; t + 1 < assets.size(); ++t) {
    if (assets[t + 1] <= 0.0) return t;
  }
  return std::nullopt;
}

/// Sum_t beta^t u(c_t) over a finite series.
inline double discounted_utility(std::span<const double> consumption, double beta, const UtilityFunction& u) {
  double total = 0.0;
  double weight = 1.0;
  for (double c : consumption) {
    total += weight * u(c);
    weight *= beta;
  }
  return total;
}

// Per-agent time series. assets has one more entry than consumption/income.
struct Trajectory {
  std::vector<double> assets;
  std::vector<double> consumption;
  std::vector<double> income;
  std::optional<std::size_t> ruin_time;
};

/// Runs the asset recurrence from a0 for up to `horizon` periods.
///
/// Each period asks `consume(t, a_t)` for c_t, then `earn(t)` for y_t. When
/// c_t > a_t the agent cannot cover the period: the recorded next balance is
/// the shortfall R (a_t - c_t) < 0 and the run stops. Otherwise the usual update
/// applies and the run stops at the first a_{t+1} <= 0.
template <typename ConsumeFn, typename EarnFn>
Trajectory simulate_path(double a0, double return_rate, std::size_t horizon, ConsumeFn&& consume, EarnFn&& earn) {
  Trajectory path;
  path.assets.reserve(horizon + 1);
  path.consumption.reserve(horizon);
  path.income.reserve(horizon);
  path.assets.push_back(a0);
  for (std::size_t t = 0; t < horizon; ++t) {
    const double a = path.assets.back();
    const double c = consume(t, a);
    const double y = earn(t);
    path.consumption.push_back(c);
    path.income.push_back(y);
    if (c > a) {
      path.assets.push_back(return_rate * (a - c));
      if (path.assets.back() >= 0.0) path.assets.back() = -0.0;
      path.ruin_time = t;
      return path;
    }
    const double next = step_assets(a, c, return_rate, y);
    path.assets.push_back(next);
    if (next <= 0.0) {
      path.ruin_time = t;
      return path;
    }
  }
  return path;
}

}  // namespace ruinlab
