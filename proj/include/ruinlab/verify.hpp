#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ruinlab/errors.hpp"
#include "ruinlab/lookahead.hpp"
#include "ruinlab/model.hpp"
#include "ruinlab/scenarios.hpp"
#include "ruinlab/utility.hpp"

// Numerical sweeps behind `ruinlab verify`. Every report lists its cells; a
// cell marked "asserted": false never fails the run.
namespace ruinlab::verify {

using Json = nlohmann::ordered_json;

struct Report {
  std::string name;
  bool passed = true;
  std::size_t asserted_cells = 0;
  std::size_t failed_cells = 0;
  Json cells = Json::array();

  void add(Json cell, bool asserted, bool ok) {
    cell["asserted"] = asserted;
    cell["pass"] = ok;
    if (asserted) {
      ++asserted_cells;
      if (!ok) {
        ++failed_cells;
        passed = false;
      }
    }
    cells.push_back(std::move(cell));
  }

  Json to_json() const {
    Json j;
    j["verifier"] = name;
    j["passed"] = passed;
    j["asserted_cells"] = asserted_cells;
    j["failed_cells"] = failed_cells;
    j["cells"] = cells;
    return j;
  }
};

inline const std::vector<std::string>& names() {
  static const std::vector<std::string> all{"thm1", "thm2", "thm4", "thm5", "lemma1"};
  return all;
}

/// Obligatory-consumption cap: above u^{-1}(u(Y)/(1-beta)) immediate
/// consumption beats the cap, below it it does not.
inline Report obligatory_cap() {
  Report r{"thm1"};
  const std::vector<UtilityFunction> utils{UtilityFunction::sqrt(), UtilityFunction::log(),
                                           UtilityFunction::isoelastic_unshifted(0.5),
                                           UtilityFunction::isoelastic_shifted(2.0)};
  for (const auto& u : utils) {
    for (double beta : {0.3, 0.5, 0.9}) {
      for (double y : {0.5, 1.0, 4.0}) {
        const double cap = jensen_cap(u, y, beta);
        if (!(cap < u.range_supremum())) continue;  // threshold undefined
        const double threshold = u.inverse(cap);
        for (double scale : {0.5, 0.99, 1.01, 2.0}) {
          const double a0 = scale * threshold;
          const auto v = obligatory_probe(a0, u, y, beta);
          const bool above = v.verdict == ObligatoryOutcome::consume_all_preferred;
          const bool ok = above == (v.immediate_utility > v.cap) && above == (scale > 1.0);
          r.add(Json{{"utility", std::string(to_string(u.kind()))},
                     {"lambda", u.lambda()},
                     {"beta", beta},
                     {"Y", y},
                     {"a0", a0},
                     {"cap", v.cap},
                     {"threshold", v.threshold},
                     {"immediate_utility", v.immediate_utility},
                     {"verdict", std::string(to_string(v.verdict))}},
                true, ok);
        }
      }
    }
  }
  return r;
}

/// Monte Carlo check of the impulsive-consumption ruin bound on the synthetic
/// configuration a0 = 2, Y = 1, B = 1.2, delta = eps = 0.1.
inline Report impulsive_ruin(std::size_t n_agents = 20000, std::uint64_t seed = 2024) {
  Report r{"thm2"};
  const double a0 = 2.0, y = 1.0, b = 1.2, delta = 0.1, eps = 0.1;
  const auto report = hoeffding_report(a0, y, b, delta, eps);
  const std::vector<std::size_t> horizons{24, 32, 40};
  const auto survival = impulsive_survival(a0, IncomeProcess::bounded_uniform(y, delta),
                                           SubsistenceProcess::bounded_uniform(b, eps), 1.0, horizons, n_agents, seed);
  for (std::size_t k = 0; k < horizons.size(); ++k) {
    const double bound = report.bound_at(static_cast<double>(horizons[k]));
    const double limit = hoeffding_acceptance_limit(bound, n_agents);
    r.add(Json{{"T", horizons[k]},
               {"n_agents", n_agents},
               {"bound", bound},
               {"limit", limit},
               {"empirical_survival", survival[k]}},
          true, survival[k] <= limit);
  }
  return r;
}

/// Non-negativity of both terminal-consumption improvements.
inline Report terminal_improvement(double tolerance = 1e-12) {
  Report r{"thm4"};
  std::vector<UtilityFunction> utils{UtilityFunction::sqrt()};
  for (double lambda : {0.1, 0.3, 0.5, 0.7, 0.9}) utils.push_back(UtilityFunction::isoelastic_unshifted(lambda));
  const std::vector<double> betas{0.51, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
  const int steps = 16;
  for (const auto& u : utils) {
    for (double beta : betas) {
      for (double b : {0.1, 1.0, 10.0}) {
        for (int i = 0; i <= steps; ++i) {
          const double c1 = b * (2.0 + 8.0 * i / steps);
          const double g1 = improve_case1(c1, b, beta, u);
          r.add(Json{{"case", 1}, {"utility", std::string(to_string(u.kind()))}, {"lambda", u.lambda()},
                     {"beta", beta}, {"b", b}, {"c_T", c1}, {"gain", g1}},
                true, g1 >= -tolerance);
          if (i == steps) continue;
          const double c2 = b * (1.0 + static_cast<double>(i) / steps);
          const double g2 = improve_case2(c2, b, beta, u);
          r.add(Json{{"case", 2}, {"utility", std::string(to_string(u.kind()))}, {"lambda", u.lambda()},
                     {"beta", beta}, {"b", b}, {"c_T", c2}, {"gain", g2}},
                true, g2 >= -tolerance);
        }
      }
    }
  }
  return r;
}

/// First-order condition of the terminal split and the sign of its gain.
/// Gains are asserted for unshifted isoelastic lambda in {0.3, 0.5, 0.7};
/// every other cell is informational.
inline Report terminal_split(double foc_tolerance = 1e-9) {
  Report r{"thm5"};
  for (double c_t : {0.5, 1.0, 5.0}) {
    for (double beta : {0.51, 0.7, 0.9}) {
      for (double lambda : {0.3, 0.5, 0.7, 2.0, 3.0}) {
        const double eps = isoelastic_split_epsilon(c_t, beta, lambda);
        const double residual = split_foc_relative_residual(c_t, beta, lambda, eps);
        r.add(Json{{"check", "foc"}, {"c_T", c_t}, {"beta", beta}, {"lambda", lambda}, {"epsilon", eps},
                   {"relative_residual", residual}},
              true, residual <= foc_tolerance);
        for (auto kind : {UtilityKind::isoelastic_unshifted, UtilityKind::isoelastic_shifted}) {
          const auto u = UtilityFunction::make(kind, lambda);
          const double gain = split_gain(c_t, beta, u, eps);
          const bool asserted = kind == UtilityKind::isoelastic_unshifted && lambda < 1.0;
          r.add(Json{{"check", "split_gain"}, {"utility", std::string(to_string(kind))}, {"c_T", c_t},
                     {"beta", beta}, {"lambda", lambda}, {"epsilon", eps}, {"gain", gain}},
                asserted, gain >= 0.0);
        }
      }
    }
  }
  return r;
}

/// Tangent-line margin of sqrt over the 99 x 49 (w, a) grid.
inline Report tangent_margin(double tolerance = 1e-12) {
  Report r{"lemma1"};
  for (int i = 1; i <= 99; ++i) {
    const double w = i / 100.0;
    for (int j = 1; j <= 49; ++j) {
      const double a = 0.5 + j / 100.0;
      const double m = lookahead::lemma1_margin(w, a);
      r.add(Json{{"w", w}, {"a", a}, {"margin", m}}, true, m >= -tolerance);
    }
  }
  return r;
}

inline Report run(std::string_view name) {
  if (name == "thm1") return obligatory_cap();
  if (name == "thm2") return impulsive_ruin();
  if (name == "thm4") return terminal_improvement();
  if (name == "thm5") return terminal_split();
  if (name == "lemma1") return tangent_margin();
  throw ConfigError("unknown verifier '" + std::string(name) + "' (expected thm1, thm2, thm4, thm5 or lemma1)");
}

}  // namespace ruinlab::verify
