#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "ruinlab/errors.hpp"
#include "ruinlab/utility.hpp"

namespace ruinlab {

/// Monthly calibration of a population group for the impulsive-expenditure
/// cohort experiments. Expenditure floors are lognormal with the given mean
/// and a coefficient of variation of expenditure_cv.
struct Preset {
  std::string_view name;
  double beta;
  double initial_assets;
  double income_mean;
  double income_std;
  double expenditure_mean;
  double expenditure_cv = 0.2;
  UtilityKind utility = UtilityKind::isoelastic_unshifted;
  double lambda = 0.2;
};

inline constexpr double kMedianNetWorth = 141140.0;

inline const std::array<Preset, 5>& presets() {
  static const std::array<Preset, 5> table{{
      {"general", 0.95, kMedianNetWorth, 5957.25, 378.74, 5253.0},
      {"low_income", 0.5, kMedianNetWorth, 1899.33, 77.0, 2850.0},
      {"high_income", 0.9, kMedianNetWorth, 8869.92, 199.60, 7082.83},
      {"hs_diploma", 0.5, kMedianNetWorth, 5957.25, 378.74, 5253.0},
      {"college", 0.83, kMedianNetWorth, 5957.25, 378.74, 5253.0},
  }};
  return table;
}

inline const Preset& find_preset(std::string_view name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  throw ConfigError("unknown preset '" + std::string(name) +
                    "' (expected general, low_income, high_income, hs_diploma or college)");
}

}  // namespace ruinlab
