#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the solver; the recursions are written out directly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ruinlab/utility.hpp"

namespace oracle {

struct DeterministicProblem {
  double beta = 0.9;
  double return_rate = 1.0;
  std::vector<double> incomes;  // y_0 .. y_{H-1}
  ruinlab::UtilityFunction u = ruinlab::UtilityFunction::sqrt();
  double c_lo = 1e-6;
  int n_consumption = 33;
};

// Best discounted utility from assets a with periods t.. remaining, searching
// the same n_consumption equally spaced candidates of [c_lo, a] at every
// visited state. States are carried exactly; nothing is interpolated.
inline double brute_force_value(const DeterministicProblem& p, double a, std::size_t t = 0) {
  if (t >= p.incomes.size()) return 0.0;
  if (a <= 0.0) return 0.0;
  if (a < p.c_lo) return p.u(a);
  double best = -INFINITY;
  const int n = p.n_consumption;
  for (int j = 0; j < n; ++j) {
    const double c = j + 1 == n ? a : p.c_lo + (a - p.c_lo) * (static_cast<double>(j) / (n - 1));
    const double next = p.return_rate * (a - c) + p.incomes[t];
    const double cont = next <= 0.0 ? 0.0 : brute_force_value(p, next, t + 1);
    best = std::max(best, p.u(c) + p.beta * cont);
  }
  return best;
}

// Upper bound on the error that linear interpolation of the tables
// V_1 .. V_{H-1} can introduce into V_0: for a monotone table an interpolated
// value is off by at most one cell increment, and the error of later periods
// is discounted by beta per period.
inline double interpolation_error_bound(const std::vector<std::vector<double>>& tables, double beta) {
  double bound = 0.0;
  double discount = beta;
  for (std::size_t t = 1; t + 1 < tables.size(); ++t) {
    double max_step = 0.0;
    for (std::size_t j = 0; j + 1 < tables[t].size(); ++j)
      max_step = std::max(max_step, std::abs(tables[t][j + 1] - tables[t][j]));
    bound += discount * max_step;
    discount *= beta;
  }
  return bound;
}

// Cake eating with sqrt utility, no income and R = 1: V(a) = K sqrt(a) with
// K^2 = 1 + beta^2 K^2, and the optimal consumption share is 1 - beta^2.
inline double cake_value_coefficient(double beta) { return 1.0 / std::sqrt(1.0 - beta * beta); }
inline double cake_consumption_share(double beta) { return 1.0 - beta * beta; }

}  // namespace oracle
