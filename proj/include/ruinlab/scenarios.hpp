#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <algorithm>
#include <limits>
#include <string_view>
#include <string>
#include <vector>

#include "ruinlab/dynamics.hpp"
#include "ruinlab/errors.hpp"
#include "ruinlab/model.hpp"
#include "ruinlab/rng.hpp"
#include "ruinlab/utility.hpp"

namespace ruinlab {

// ---------------------------------------------------------------------------
// Obligatory consumption
// ---------------------------------------------------------------------------

/// u(Y) / (1 - beta): the ceiling on expected discounted utility of any
/// constant consumption plan whose level averages to Y.
inline double jensen_cap(const UtilityFunction& u, double mean_income, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0,1)");
  return u(mean_income) / (1.0 - beta);
}

enum class ObligatoryOutcome { consume_all_preferred, cap_binding };

inline std::string_view to_string(ObligatoryOutcome v) {
  return v == ObligatoryOutcome::consume_all_preferred ? "consume_all_preferred" : "cap_binding";
}

struct ObligatoryVerdict {
  double cap = 0.0;
  double threshold = 0.0;  // u^{-1}(cap)
  double a0 = 0.0;
  double immediate_utility = 0.0;  // u(a0)
  ObligatoryOutcome verdict = ObligatoryOutcome::cap_binding;
};

/// Compares a0 with u^{-1}(u(Y)/(1-beta)). Above it, consuming everything at
/// once beats every sustainable fixed plan.
inline ObligatoryVerdict obligatory_probe(double a0, const UtilityFunction& u, double mean_income, double beta) {
  ObligatoryVerdict v;
  v.a0 = a0;
  v.cap = jensen_cap(u, mean_income, beta);
  v.threshold = u.inverse(v.cap);
  v.immediate_utility = a0 > 0.0 || u.finite_at_zero() ? u(a0) : -std::numeric_limits<double>::infinity();
  v.verdict = a0 > v.threshold ? ObligatoryOutcome::consume_all_preferred : ObligatoryOutcome::cap_binding;
  return v;
}

/// Asset path with c_t = c_fixed every period (c_fixed >= b >= 0).
inline Trajectory simulate_obligatory(double c_fixed, double subsistence, const ModelParams& params,
                                      const IncomeProcess& income, std::size_t horizon, RngStream& rng) {
  if (!(subsistence >= 0.0)) throw ConstraintError("subsistence floor must be >= 0");
  if (!(c_fixed >= subsistence))
    throw ConstraintError("fixed consumption " + std::to_string(c_fixed) + " is below the subsistence floor " +
                          std::to_string(subsistence));
  return simulate_path(
      params.initial_assets, params.return_rate, horizon, [&](std::size_t, double) { return c_fixed; },
      [&](std::size_t t) { return income.draw(rng, t); });
}

// ---------------------------------------------------------------------------
// Impulsive consumption: Hoeffding ruin bound
// ---------------------------------------------------------------------------

struct HoeffdingReport {
  double drift = 0.0;      // B - Y
  double rate = 0.0;       // (B - Y)^2 / (8 (delta + eps)^2)
  double threshold = 0.0;  // 2 a0 / (B - Y)

  // exp(-rate * T), an upper bound on Pr(a_T >= 0) for T > threshold.
  double bound_at(double horizon) const {
    if (!(horizon > threshold))
      throw ThresholdError("horizon " + std::to_string(horizon) + " must exceed 2 a0 / (B - Y) = " +
                               std::to_string(threshold),
                           threshold);
    return std::exp(-rate * horizon);
  }
};

inline double hoeffding_threshold(double a0, double mean_income, double mean_subsistence) {
  if (!(mean_subsistence > mean_income))
    throw InapplicableError("the ruin bound requires B > Y (mean subsistence above mean income)");
  return 2.0 * a0 / (mean_subsistence - mean_income);
}

inline HoeffdingReport hoeffding_report(double a0, double mean_income, double mean_subsistence, double delta,
                                        double epsilon) {
  HoeffdingReport r;
  r.threshold = hoeffding_threshold(a0, mean_income, mean_subsistence);
  if (!(delta >= 0.0 && epsilon >= 0.0)) throw DomainError("delta and epsilon must be >= 0");
  if (delta + epsilon == 0.0) throw DomainError("delta and epsilon cannot both be zero");
  r.drift = mean_subsistence - mean_income;
  const double spread = delta + epsilon;
  r.rate = r.drift * r.drift / (8.0 * spread * spread);
  return r;
}

inline double hoeffding_bound(double a0, double mean_income, double mean_subsistence, double delta, double epsilon,
                              double horizon) {
  return hoeffding_report(a0, mean_income, mean_subsistence, delta, epsilon).bound_at(horizon);
}

/// Fraction of n simulated agents still solvent after each horizon in
/// `horizons`, with c_t = b_t every period. Agent i uses RngStream(seed, i).
inline std::vector<double> impulsive_survival(double a0, const IncomeProcess& income,
                                              const SubsistenceProcess& subsistence, double return_rate,
                                              const std::vector<std::size_t>& horizons, std::size_t n_agents,
                                              std::uint64_t seed) {
  std::size_t max_h = 0;
  for (auto h : horizons) max_h = std::max(max_h, h);
  std::vector<std::size_t> alive(horizons.size(), 0);
  for (std::size_t i = 0; i < n_agents; ++i) {
    RngStream rng(seed, i);
    const auto path = simulate_path(
        a0, return_rate, max_h, [&](std::size_t, double) { return subsistence.draw(rng); },
        [&](std::size_t t) { return income.draw(rng, t); });
    for (std::size_t k = 0; k < horizons.size(); ++k) {
      // Solvent through horizon T means no ruin at any t < T.
      if (!path.ruin_time || *path.ruin_time >= horizons[k]) ++alive[k];
    }
  }
  std::vector<double> out(horizons.size());
  for (std::size_t k = 0; k < horizons.size(); ++k)
    out[k] = static_cast<double>(alive[k]) / static_cast<double>(n_agents);
  return out;
}

// Bound plus sampling slack: p + 3 sqrt(p (1 - p) / n) + 1 / sqrt(n).
inline double hoeffding_acceptance_limit(double bound, std::size_t n) {
  const double nn = static_cast<double>(n);
  return bound + 3.0 * std::sqrt(bound * (1.0 - bound) / nn) + 1.0 / std::sqrt(nn);
}

// ---------------------------------------------------------------------------
// True consumption agency: improvement constructions
// ---------------------------------------------------------------------------

namespace detail {
inline void check_improvement_common(double c_terminal, double b, double beta) {
  if (!(b >= 0.0)) throw ConstraintError("subsistence b must be >= 0");
  if (!(beta > 0.5 && beta < 1.0)) throw ConstraintError("the improvement constructions need beta in (1/2, 1)");
  if (!(c_terminal >= 0.0)) throw ConstraintError("terminal consumption must be >= 0");
}
}  // namespace detail

/// Gain (per beta^T) of replacing terminal consumption c_T by the sequence
/// (c_T - b, b, b, ...) when c_T >= 2b.
inline double improve_case1(double c_terminal, double b, double beta, const UtilityFunction& u) {
  detail::check_improvement_common(c_terminal, b, beta);
  if (!(c_terminal >= 2.0 * b)) throw ConstraintError("case 1 requires c_T >= 2b");
  return u(c_terminal - b) + beta / (1.0 - beta) * u(b) - u(c_terminal);
}

/// Gain (per beta^T) of replacing terminal consumption c_T by (b, b, ...)
/// when b <= c_T < 2b.
inline double improve_case2(double c_terminal, double b, double beta, const UtilityFunction& u) {
  detail::check_improvement_common(c_terminal, b, beta);
  if (!(c_terminal >= b && c_terminal < 2.0 * b)) throw ConstraintError("case 2 requires b <= c_T < 2b");
  return u(b) / (1.0 - beta) - u(c_terminal);
}

/// Maximizer of g(eps) = u(c_T - eps) + beta u(eps) for isoelastic u:
/// eps* = c_T / (1 + beta^(-1/lambda)).
inline double isoelastic_split_epsilon(double c_terminal, double beta, double lambda) {
  if (!(c_terminal > 0.0)) throw DomainError("c_T must be > 0");
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0,1)");
  if (!(lambda > 0.0)) throw DomainError("lambda must be > 0");
  if (lambda == 1.0) throw DomainError("lambda must differ from 1");
  return c_terminal / (1.0 + std::pow(beta, -1.0 / lambda));
}

// |beta eps^-lambda - (c_T - eps)^-lambda| / (c_T - eps)^-lambda.
inline double split_foc_relative_residual(double c_terminal, double beta, double lambda, double eps) {
  const double rhs = std::pow(c_terminal - eps, -lambda);
  return std::abs(beta * std::pow(eps, -lambda) - rhs) / rhs;
}

/// g(eps) - u(c_T); positive when splitting the terminal consumption and
/// continuing beats exhausting assets at T.
inline double split_gain(double c_terminal, double beta, const UtilityFunction& u, double eps) {
  if (!(eps >= 0.0 && eps < c_terminal)) throw DomainError("split requires 0 <= eps < c_T");
  return u(c_terminal - eps) + beta * u(eps) - u(c_terminal);
}

}  // namespace ruinlab
