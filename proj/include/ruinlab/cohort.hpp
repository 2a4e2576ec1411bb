#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "ruinlab/dynamics.hpp"
#include "ruinlab/errors.hpp"
#include "ruinlab/model.hpp"
#include "ruinlab/parallel.hpp"
#include "ruinlab/rng.hpp"
#include "ruinlab/solver.hpp"

namespace ruinlab {

namespace scenario {

// c_t = c_fixed.
struct Obligatory {
  double c_fixed = 0.0;
};

// c_t = max(b_t, policy(a_t)), or c_t = b_t without a policy.
struct Impulsive {
  std::shared_ptr<const Policy> policy;
  SubsistenceProcess subsistence = SubsistenceProcess::constant(0.0);
};

// c_t = max(b, policy(a_t)) for a fixed non-negotiable expense b; requires
// R >= 1, beta > 1/2 and every income draw >= b.
struct TrueAgency {
  std::shared_ptr<const Policy> policy;
  double fixed_expense = 0.0;
};

// c_t = policy(a_t).
struct Custom {
  std::shared_ptr<const Policy> policy;
};

}  // namespace scenario

using Scenario = std::variant<scenario::Obligatory, scenario::Impulsive, scenario::TrueAgency, scenario::Custom>;

inline std::string scenario_name(const Scenario& s) {
  switch (s.index()) {
    case 0: return "obligatory";
    case 1: return "impulsive";
    case 2: return "true_agency";
    default: return "custom";
  }
}

struct CohortConfig {
  Scenario scenario = scenario::Obligatory{};
  std::size_t n_agents = 1;
  std::size_t horizon = 100;
  std::uint64_t master_seed = 0;
  ModelParams model;
  IncomeProcess income = IncomeProcess::constant(0.0);

  void validate() const {
    if (n_agents < 1) throw ConfigError("n_agents must be >= 1");
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    model.validate();
    std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, scenario::Obligatory>) {
            if (!(s.c_fixed >= 0.0)) throw ConfigError("obligatory c_fixed must be >= 0");
          } else if constexpr (std::is_same_v<S, scenario::Impulsive>) {
            // A missing policy means c_t = b_t.
          } else if constexpr (std::is_same_v<S, scenario::TrueAgency>) {
            if (!s.policy) throw ConfigError("true_agency scenario needs a policy");
            if (!(s.fixed_expense >= 0.0)) throw ConfigError("true_agency fixed expense must be >= 0");
            if (!(model.return_rate >= 1.0)) throw ConfigError("true_agency scenario needs return_rate >= 1");
            if (!(model.beta > 0.5)) throw ConfigError("true_agency scenario needs beta > 1/2");
            if (income.lower_bound() < s.fixed_expense)
              throw ConfigError("true_agency scenario needs every income draw >= the fixed expense");
          } else {
            if (!s.policy) throw ConfigError("custom scenario needs a policy");
          }
        },
        scenario);
  }
};

/// Full trajectory of agent `agent_index` under RngStream(master_seed, agent_index).
/// Each period draws b_t (impulsive only) before y_t.
inline Trajectory simulate_agent_path(const CohortConfig& config, std::size_t agent_index) {
  RngStream rng(config.master_seed, agent_index);
  auto earn = [&](std::size_t t) { return config.income.draw(rng, t); };
  const double a0 = config.model.initial_assets;
  const double r = config.model.return_rate;
  return std::visit(
      [&](const auto& s) -> Trajectory {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, scenario::Obligatory>) {
          return simulate_path(a0, r, config.horizon, [&](std::size_t, double) { return s.c_fixed; }, earn);
        } else if constexpr (std::is_same_v<S, scenario::Impulsive>) {
          return simulate_path(
              a0, r, config.horizon,
              [&](std::size_t, double a) {
                const double b = s.subsistence.draw(rng);
                return s.policy ? std::max(b, policy_consume(*s.policy, a)) : b;
              },
              earn);
        } else if constexpr (std::is_same_v<S, scenario::TrueAgency>) {
          return simulate_path(
              a0, r, config.horizon,
              [&](std::size_t, double a) { return std::max(s.fixed_expense, policy_consume(*s.policy, a)); }, earn);
        } else {
          return simulate_path(
              a0, r, config.horizon, [&](std::size_t, double a) { return policy_consume(*s.policy, a); }, earn);
        }
      },
      config.scenario);
}

inline std::optional<std::size_t> simulate_agent(const CohortConfig& config, std::size_t agent_index) {
  const auto path = simulate_agent_path(config, agent_index);
  return detect_ruin(path.assets);
}

/// Ruin times binned by period, with survivors kept apart.
struct RuinHistogram {
  std::size_t horizon = 0;
  std::map<std::size_t, std::uint64_t> counts;
  std::uint64_t survivors = 0;
  std::uint64_t n_agents = 0;

  std::uint64_t ruined() const {
    std::uint64_t total = 0;
    for (const auto& [t, c] : counts) total += c;
    return total;
  }

  friend bool operator==(const RuinHistogram&, const RuinHistogram&) = default;
};

inline RuinHistogram merge_histograms(const RuinHistogram& lhs, const RuinHistogram& rhs) {
  if (lhs.horizon != rhs.horizon) throw ConfigError("cannot merge histograms with different horizons");
  RuinHistogram out = lhs;
  for (const auto& [t, c] : rhs.counts) out.counts[t] += c;
  out.survivors += rhs.survivors;
  out.n_agents += rhs.n_agents;
  return out;
}

/// Histogram over agents [first, last).
inline RuinHistogram run_cohort_range(const CohortConfig& config, std::size_t first, std::size_t last,
                                      unsigned threads = default_thread_count()) {
  config.validate();
  std::vector<std::optional<std::size_t>> ruin(last - first);
  parallel_chunks(ruin.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) ruin[i] = simulate_agent(config, first + i);
  });
  RuinHistogram h;
  h.horizon = config.horizon;
  h.n_agents = ruin.size();
  for (const auto& r : ruin) {
    if (r) {
      ++h.counts[*r];
    } else {
      ++h.survivors;
    }
  }
  return h;
}

/// Histogram of the whole cohort, agent indices 0..n_agents-1. The result does
/// not depend on the thread count.
inline RuinHistogram run_cohort(const CohortConfig& config, unsigned threads = default_thread_count()) {
  return run_cohort_range(config, 0, config.n_agents, threads);
}

struct CohortSummary {
  double ruin_fraction = 0.0;
  double survivor_fraction = 0.0;
  std::optional<std::size_t> mode_ruin_time;    // smallest most-populated bin
  std::optional<double> median_ruin_time;       // among ruined agents
  double fraction_ruined_first_10 = 0.0;        // ruin at t < 10, over all agents
};

inline CohortSummary summarize(const RuinHistogram& h) {
  if (h.n_agents == 0) throw ConfigError("cannot summarize an empty histogram");
  CohortSummary s;
  const std::uint64_t ruined = h.ruined();
  const double n = static_cast<double>(h.n_agents);
  s.ruin_fraction = static_cast<double>(ruined) / n;
  s.survivor_fraction = static_cast<double>(h.survivors) / n;
  std::uint64_t best = 0;
  std::uint64_t early = 0;
  for (const auto& [t, c] : h.counts) {
    if (c > best) {
      best = c;
      s.mode_ruin_time = t;
    }
    if (t < 10) early += c;
  }
  s.fraction_ruined_first_10 = static_cast<double>(early) / n;
  if (ruined > 0) {
    // Order statistics (ruined-1)/2 and ruined/2, zero-based.
    const std::uint64_t lo_rank = (ruined - 1) / 2;
    const std::uint64_t hi_rank = ruined / 2;
    std::optional<std::size_t> lo;
    std::optional<std::size_t> hi;
    std::uint64_t seen = 0;
    for (const auto& [t, c] : h.counts) {
      if (!lo && lo_rank < seen + c) lo = t;
      if (!hi && hi_rank < seen + c) hi = t;
      seen += c;
    }
    s.median_ruin_time = (static_cast<double>(*lo) + static_cast<double>(*hi)) / 2.0;
  }
  return s;
}

}  // namespace ruinlab
