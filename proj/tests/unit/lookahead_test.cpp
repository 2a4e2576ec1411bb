#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "ruinlab/lookahead.hpp"

using namespace ruinlab;
using namespace ruinlab::lookahead;

namespace {

std::vector<double> x_grid101() {
  std::vector<double> xs;
  for (int i = 0; i <= 100; ++i) xs.push_back(i / 100.0);
  return xs;
}

std::vector<BaselineStrategy> wide_zoo() {
  auto zoo = strategy_zoo(XDistribution::uniform());
  for (double phi : {0.1, 0.4, 0.6, 0.9, 1.0}) zoo.push_back(BaselineStrategy::asset_fraction(phi));
  for (double c : {0.5, 0.6, 0.9, 1.0}) zoo.push_back(BaselineStrategy::expected_constant(c));
  return zoo;
}

// E_x sqrt(w + x) for x ~ U(0,1).
double mean_sqrt_shift(double w) { return 2.0 / 3.0 * (std::pow(w + 1, 1.5) - std::pow(w, 1.5)); }

}  // namespace

TEST(Instance, Examples) {
  EXPECT_EQ(build_instance(4, 0.5).income, (std::vector<double>{1, 1, 0.5, 0.5}));
  EXPECT_EQ(build_instance(2, 0).income, (std::vector<double>{1, 0}));
  EXPECT_THROW(build_instance(3, 0.5), ConfigError);
  EXPECT_THROW(build_instance(0, 0.5), ConfigError);
  EXPECT_THROW(build_instance(4, 1.5), DomainError);
  EXPECT_THROW(build_instance(4, -0.1), DomainError);
}

TEST(Instance, IncomeWithinUnitInterval) {
  for (int k = 2; k <= 32; k += 2)
    for (double x : x_grid101())
      for (double y : build_instance(k, x).income) {
        ASSERT_GE(y, 0.0);
        ASSERT_LE(y, 1.0);
      }
}

TEST(Lookahead, UtilityExamples) {
  EXPECT_NEAR(lookahead_utility(4, 0.5), 3.46410, 1e-5);
  EXPECT_DOUBLE_EQ(lookahead_utility(4, 1), 4.0);
  EXPECT_NEAR(lookahead_utility(4, 0), 2.82843, 1e-5);
  const auto plan = lookahead_plan(build_instance(4, 0.5));
  EXPECT_EQ(plan.consumption, std::vector<double>(4, 0.75));
  EXPECT_TRUE(plan.feasible);
  EXPECT_NEAR(plan.utility, lookahead_utility(4, 0.5), 1e-12);
}

// Exact check in units of 1/200: income is 200 then 2i, consumption 100 + i
// for x = i / 100.
TEST(Lookahead, PlanNeverOverdrawsExactArithmetic) {
  for (int k = 2; k <= 64; k += 2) {
    for (int i = 0; i <= 100; ++i) {
      std::int64_t assets = 0;
      for (int t = 0; t < k; ++t) {
        assets += (t < k / 2 ? 200 : 2 * i) - (100 + i);
        ASSERT_GE(assets, 0) << "k=" << k << " i=" << i << " t=" << t;
      }
      ASSERT_EQ(assets, 0);
      ASSERT_TRUE(lookahead_plan(build_instance(k, i / 100.0)).feasible);
    }
  }
}

TEST(Baseline, Examples) {
  const auto inst = build_instance(4, 0.5);
  EXPECT_NEAR(run_baseline(BaselineStrategy::consume_income(), inst).utility, 2 + 2 * std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(run_baseline(BaselineStrategy::consume_income(), inst).utility, 3.41421, 1e-5);
  EXPECT_NEAR(run_baseline(BaselineStrategy::expected_constant(0.75), inst).utility, 3.46410, 1e-5);
  const auto poor = build_instance(4, 0.0);
  const auto run = run_baseline(BaselineStrategy::expected_constant(0.75), poor);
  EXPECT_NEAR(run.utility, 2 * std::sqrt(0.75) + std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(run.utility, 2.43916, 1e-5);
  EXPECT_NEAR(run.first_half_sum, 1.5, 1e-12);
  EXPECT_LT(run.utility, lookahead_utility(4, 0.0));
}

TEST(Baseline, StaysFeasible) {
  for (const auto& s : wide_zoo())
    for (int k : {2, 6, 16})
      for (double x : {0.0, 0.3, 1.0}) {
        const auto inst = build_instance(k, x);
        const auto run = run_baseline(s, inst);
        const auto path = evaluate_path(inst, run.consumption);
        EXPECT_TRUE(path.feasible) << s.name();
        for (double z : run.consumption) EXPECT_GE(z, 0.0);
      }
}

TEST(Baseline, LookaheadDominates) {
  for (int k = 2; k <= 16; k += 2)
    for (double x : x_grid101()) {
      const auto inst = build_instance(k, x);
      const double ahead = lookahead_utility(k, x);
      for (const auto& s : wide_zoo()) ASSERT_GE(ahead, run_baseline(s, inst).utility - 1e-12) << s.name();
    }
}

TEST(Baseline, MeanGapPositiveForEveryStrategy) {
  const auto xs = XDistribution::uniform().nodes(400);
  for (int k : {2, 4, 8, 16}) {
    for (const auto& s : strategy_zoo(XDistribution::uniform())) {
      double gap = 0.0;
      for (double x : xs) gap += lookahead_utility(k, x) - run_baseline(s, build_instance(k, x)).utility;
      EXPECT_GT(gap / xs.size(), 0.0) << s.name() << " k=" << k;
    }
  }
}

TEST(Baseline, ScalesWithIncomeCeiling) {
  for (double x : {0.0, 0.25, 0.8}) {
    EXPECT_NEAR(lookahead_utility(6, x, 4.0), 2 * lookahead_utility(6, x), 1e-12);
    const auto a = run_baseline(BaselineStrategy::expected_constant(0.75), build_instance(6, x));
    const auto b = run_baseline(BaselineStrategy::expected_constant(3.0), build_instance(6, x, 4.0));
    EXPECT_NEAR(b.utility, 2 * a.utility, 1e-12);
  }
  const auto p1 = brute_force_best_deterministic(2, 129, 64);
  const auto p4 = brute_force_best_deterministic(2, 129, 64, XDistribution::uniform(), 4.0);
  EXPECT_NEAR(p4.expected_utility, 2 * p1.expected_utility, 1e-12);
}

// For k = 2 the best deterministic first-period amount solves
// max_z sqrt(z) + E sqrt(1 - z + x); the expectation has a closed form.
TEST(BruteForce, TwoPeriodOptimumMatchesOneDimensionalSearch) {
  double best_z = 0.0, best = -1.0;
  for (int i = 0; i <= 1000000; ++i) {
    const double z = i / 1e6;
    const double v = std::sqrt(z) + mean_sqrt_shift(1 - z);
    if (v > best) {
      best = v;
      best_z = z;
    }
  }
  const auto plan = brute_force_best_deterministic(2, 257, 400);
  ASSERT_EQ(plan.first_half.size(), 1u);
  EXPECT_NEAR(plan.first_half[0], best_z, 1.0 / 256);
  EXPECT_NEAR(plan.expected_utility, best, 1e-5);
  EXPECT_NEAR(best_z, 0.7071, 2e-3);
  double ahead = 0.0;
  for (double x : XDistribution::uniform().nodes(400)) ahead += lookahead_utility(2, x);
  EXPECT_LT(plan.expected_utility, ahead / 400);
}

TEST(BruteForce, CertainIncomeMatchesLookahead) {
  const auto plan = brute_force_best_deterministic(2, 65, 16, XDistribution::degenerate(1.0));
  EXPECT_NEAR(plan.expected_utility, lookahead_utility(2, 1.0), 1e-12);
}

TEST(BruteForce, GapGrowsWithHorizon) {
  const auto xs = XDistribution::uniform();
  auto gap = [&](int k) {
    const auto plan = brute_force_best_deterministic(k, 129, 100, xs);
    double ahead = 0.0;
    for (double x : xs.nodes(100)) ahead += lookahead_utility(k, x);
    return ahead / 100 - plan.expected_utility;
  };
  const double g2 = gap(2), g4 = gap(4);
  EXPECT_GT(g2, 0.0);
  EXPECT_GE(g4 / g2, 1.5);
}

TEST(BruteForce, Guards) {
  EXPECT_THROW(brute_force_best_deterministic(10, 16, 16), ConfigError);
  EXPECT_THROW(brute_force_best_deterministic(4, 8, 16), ConfigError);
  EXPECT_THROW(brute_force_best_deterministic(8, 257, 200), ResourceError);
}

TEST(Lemma1, Examples) {
  EXPECT_NEAR(lemma1_margin(0.25, 0.75), 0.04610, 1e-5);
  for (double a : {0.51, 0.6, 0.75, 0.99}) EXPECT_EQ(lemma1_margin(a, a), 0.0);
  const double sa = std::sqrt(0.51);
  EXPECT_NEAR(lemma1_margin(0.99, 0.51), sa + 0.48 / (2 * sa) - 0.48 * 0.48 / 8 - std::sqrt(0.99), 1e-15);
  EXPECT_NEAR(lemma1_margin(0.99, 0.51), 0.026423, 1e-6);
  EXPECT_THROW(lemma1_margin(1.0, 0.7), DomainError);
  EXPECT_THROW(lemma1_margin(0.5, 0.5), DomainError);
}

TEST(Lemma1, GridCheckPasses) {
  const auto c = lemma1_grid_check();
  EXPECT_EQ(c.cells, 99u * 49u);
  EXPECT_TRUE(c.passed);
  EXPECT_GE(c.min_margin, -1e-12);
}

TEST(Gap, DegenerateAtMeanIsZero) {
  RngStream rng(1, 0);
  GapOptions opt;
  opt.x = XDistribution::degenerate(0.5);
  opt.include_brute_force = false;
  for (int k : {2, 4, 10}) {
    const auto est = estimate_gap(k, 200, rng, opt);
    EXPECT_NEAR(est.mean_gap, 0.0, 1e-12);
    EXPECT_EQ(est.baseline, BaselineStrategy::expected_constant(0.75).name());
  }
}

TEST(Gap, Errors) {
  RngStream rng(1, 0);
  EXPECT_THROW(estimate_gap(4, 0, rng), ConfigError);
  EXPECT_THROW(estimate_gap(3, 100, rng), ConfigError);
}

TEST(Gap, PositiveAgainstBruteForceAtTwoPeriods) {
  RngStream rng(7, 2);
  const auto est = estimate_gap(2, 10000, rng);
  EXPECT_EQ(est.baseline, "brute_force_deterministic");
  EXPECT_GT(est.mean_gap, 5 * est.standard_error);
}

TEST(Gap, ReproducibleForSameStream) {
  RngStream a(11, 4), b(11, 4);
  GapOptions opt;
  opt.include_brute_force = false;
  const auto e1 = estimate_gap(6, 500, a, opt);
  const auto e2 = estimate_gap(6, 500, b, opt);
  EXPECT_EQ(e1.mean_gap, e2.mean_gap);
  EXPECT_EQ(e1.standard_error, e2.standard_error);
}
