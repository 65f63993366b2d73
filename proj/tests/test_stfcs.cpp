#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "artkit/metrics.hpp"
#include "artkit/stfcs.hpp"
#include "oracles.hpp"

using namespace artkit;
using namespace artkit::stfcs;

namespace {

const InputDomain kUnit2 = InputDomain::unit(2);

double min_dist(const TestCase& c, const std::vector<TestCase>& e) {
  double best = INFINITY;
  for (const auto& x : e) best = std::min(best, oracle::dist(c, x));
  return best;
}

}  // namespace

TEST(Fitness, DistanceKinds) {
  RngStream rng(1);
  EXPECT_DOUBLE_EQ(fitness({0.5, 0.5}, std::vector<TestCase>{{0, 0}, {1, 1}},
                           FitnessKind::MinDistance, kUnit2, rng),
                   std::sqrt(0.5));
  EXPECT_DOUBLE_EQ(fitness({0, 0}, std::vector<TestCase>{{0, 0.3}, {0, 0.9}},
                           FitnessKind::MaxDistance, kUnit2, rng),
                   0.9);
  EXPECT_DOUBLE_EQ(fitness({0, 0}, std::vector<TestCase>{{1, 0}, {0, 1}},
                           FitnessKind::CentroidDistance, kUnit2, rng),
                   std::sqrt(0.5));
  EXPECT_DOUBLE_EQ(fitness({0, 0}, std::vector<TestCase>{{1, 0}, {0, 0.5}},
                           FitnessKind::AvgDistance, kUnit2, rng),
                   0.75);
}

TEST(Fitness, EmptyExecutedSetIsAnErrorForDistances) {
  RngStream rng(1);
  EXPECT_THROW(fitness({0.1, 0.1}, {}, FitnessKind::MinDistance, kUnit2, rng), ConfigError);
}

TEST(Fitness, DiscrepancyGainLiesInUnitInterval) {
  RngStream rng(2);
  const double f = fitness({0.1, 0.1}, std::vector<TestCase>{{0.5, 0.5}},
                           FitnessKind::DiscrepancyGain, kUnit2, rng);
  EXPECT_GE(f, 0.0);
  EXPECT_LE(f, 1.0);
}

TEST(SelectCandidate, PicksLargerMinDistance) {
  RngStream rng(3);
  const std::vector<TestCase> e = {{0.5, 0.5}};
  const std::vector<TestCase> c = {{0.1, 0.1}, {0.4, 0.4}};
  EXPECT_EQ(select_candidate(c, e, FitnessKind::MinDistance, kUnit2, rng), 0u);
}

TEST(SelectCandidate, TiesGoToLowestIndex) {
  RngStream rng(3);
  const std::vector<TestCase> e = {{0.5, 0.5}};
  const std::vector<TestCase> c = {{0.5, 0.9}, {0.9, 0.5}, {0.1, 0.5}};
  EXPECT_EQ(select_candidate(c, e, FitnessKind::MinDistance, kUnit2, rng), 0u);
}

TEST(FscsGenerator, ChosenCandidateDominatesItsBatch) {
  FscsConfig cfg;
  FscsGenerator gen(kUnit2, cfg);
  RngStream rng(4);
  gen.next(rng);
  for (int step = 0; step < 200; ++step) {
    const std::vector<TestCase> before = gen.executed();
    RngStream replay = rng;
    const auto batch = draw_candidates(before, cfg, kUnit2, replay);
    const TestCase chosen = gen.next(rng);
    const double chosen_fit = min_dist(chosen, before);
    bool found = false;
    for (const auto& c : batch) {
      ASSERT_LE(min_dist(c, before), chosen_fit);
      found = found || c == chosen;
    }
    ASSERT_TRUE(found);
  }
}

TEST(FscsGenerator, ArgmaxInvariantUnderDomainScaling) {
  const InputDomain big({{0, 4}, {0, 4}});
  FscsGenerator small_gen(kUnit2, {});
  FscsGenerator big_gen(big, {});
  RngStream a(8), b(8);
  for (int i = 0; i < 100; ++i) {
    const TestCase s = small_gen.next(a);
    const TestCase l = big_gen.next(b);
    ASSERT_EQ(l, (TestCase{4 * s[0], 4 * s[1]})) << i;
  }
}

TEST(FscsGenerator, CountsDistanceEvaluations) {
  FscsConfig cfg;
  cfg.k = 5;
  FscsGenerator gen(kUnit2, cfg);
  RngStream rng(1);
  for (int i = 0; i < 10; ++i) gen.next(rng);
  // Test i (i >= 1) evaluates k candidates against i executed tests.
  EXPECT_EQ(gen.distance_evaluations(), 5u * 45u);
}

TEST(FscsGenerator, EligibilityBudgetReportsAttempts) {
  FscsConfig cfg;
  cfg.eligibility_epsilon = 0.6;  // every coordinate is within 0.6 of 0.5
  cfg.retry_budget = 50;
  RngStream rng(1);
  try {
    fscs_next(std::vector<TestCase>{{0.5, 0.5}}, cfg, kUnit2, rng);
    FAIL() << "expected BudgetExceeded";
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.attempts(), 50u);
  }
}

TEST(FscsGenerator, DiscrepancyFitnessRuns) {
  FscsConfig cfg;
  cfg.fitness = FitnessKind::DiscrepancyGain;
  cfg.discrepancy_subdomains = 200;
  FscsGenerator gen(kUnit2, cfg);
  RngStream rng(9);
  for (int i = 0; i < 50; ++i) ASSERT_TRUE(kUnit2.contains(gen.next(rng)));
}

TEST(ExclusionRadius, AnalyticValues) {
  EXPECT_NEAR(exclusion_radius(1.0, kUnit2, 1), 0.564190, 1e-6);
  EXPECT_NEAR(exclusion_radius(1.0, kUnit2, 4), 0.282095, 1e-6);
  EXPECT_NEAR(exclusion_radius(1.0, kUnit2, 1), std::sqrt(1.0 / std::numbers::pi), 1e-15);
  double prev = INFINITY;
  for (std::size_t n = 1; n < 100; ++n) {
    const double r = exclusion_radius(0.75, InputDomain::unit(3), n);
    ASSERT_LT(r, prev);
    prev = r;
  }
}

TEST(UnitBallVolume, KnownDimensions) {
  EXPECT_NEAR(unit_ball_volume(1), 2.0, 1e-14);
  EXPECT_NEAR(unit_ball_volume(2), std::numbers::pi, 1e-14);
  EXPECT_NEAR(unit_ball_volume(3), 4.0 / 3.0 * std::numbers::pi, 1e-13);
}

TEST(Rrt, CandidateInsideExclusionZoneIsRejected) {
  const std::vector<TestCase> e = {{0.5, 0.5}};
  const double r = exclusion_radius(1.0, kUnit2, 1);
  EXPECT_LT(oracle::dist({0.6, 0.6}, e[0]), r);
}

TEST(Rrt, AcceptedTestsRespectTheRadius) {
  RrtGenerator gen(kUnit2, {});
  RngStream rng(12);
  std::vector<TestCase> executed;
  for (int i = 0; i < 60; ++i) {
    const TestCase t = gen.next(rng);
    if (!executed.empty()) {
      ASSERT_GE(min_dist(t, executed), exclusion_radius(0.75, kUnit2, executed.size()));
    }
    executed.push_back(t);
  }
}

TEST(Rrt, BudgetErrorCarriesRadius) {
  RrtConfig cfg;
  cfg.exclusion_ratio = 5.0;
  cfg.max_attempts = 100;
  RngStream rng(1);
  try {
    rrt_next(std::vector<TestCase>{{0.5, 0.5}}, cfg, kUnit2, rng);
    FAIL() << "expected ExclusionBudgetExceeded";
  } catch (const ExclusionBudgetExceeded& e) {
    EXPECT_NEAR(e.radius(), std::sqrt(5.0 / std::numbers::pi), 1e-12);
    EXPECT_EQ(e.attempts(), 100u);
  }
}

TEST(Rrt, TinyRatioBehavesLikeRandomTesting) {
  RrtConfig cfg;
  cfg.exclusion_ratio = 1e-12;
  cfg.max_attempts = 1;
  RrtGenerator gen(kUnit2, cfg);
  RngStream rng(2);
  for (int i = 0; i < 200; ++i) ASSERT_NO_THROW(gen.next(rng));
}

TEST(Rrt, AcceptedFractionIsOneMinusRatio) {
  // Four disjoint balls fully inside the square.
  const std::vector<TestCase> e = {{0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}};
  RrtConfig cfg;
  cfg.exclusion_ratio = 0.5;
  cfg.max_attempts = 1;
  RngStream rng(31);
  int accepted = 0;
  const int trials = 20000;
  for (int i = 0; i < trials; ++i) {
    try {
      rrt_next(e, cfg, kUnit2, rng);
      ++accepted;
    } catch (const ExclusionBudgetExceeded&) {
    }
  }
  EXPECT_NEAR(static_cast<double>(accepted) / trials, 0.5, 0.05);
}

TEST(Mcmc, FartherCandidateAlwaysAccepted) {
  const std::vector<TestCase> e = {{0.5}};
  const TestCase prev{0.51};
  const TestCase c{0.9};
  for (std::uint64_t s = 0; s < 100; ++s) {
    RngStream rng(s);
    ASSERT_TRUE(mcmc_accept(c, &prev, e, 0.1, rng));
  }
  const double ratio = (1 - std::exp(-4.0)) / (1 - std::exp(-0.1));
  EXPECT_GT(ratio, 1.0);
  EXPECT_NEAR(mcmc_log_likelihood(c, e, 0.1) - mcmc_log_likelihood(prev, e, 0.1), std::log(ratio),
              1e-12);
}

TEST(Mcmc, EmptyExecutedSetAccepts) {
  RngStream rng(1);
  const TestCase prev{0.2};
  EXPECT_TRUE(mcmc_accept({0.3}, &prev, {}, 0.1, rng));
}

TEST(Mcmc, CloserCandidateAcceptedWithLikelihoodRatio) {
  const std::vector<TestCase> e = {{0.5}};
  const TestCase prev{0.9};
  const TestCase c{0.52};
  const double ratio = std::exp(mcmc_log_likelihood(c, e, 0.1) - mcmc_log_likelihood(prev, e, 0.1));
  int accepted = 0;
  for (std::uint64_t s = 0; s < 20000; ++s) {
    RngStream rng(s);
    accepted += mcmc_accept(c, &prev, e, 0.1, rng) ? 1 : 0;
  }
  EXPECT_NEAR(accepted / 20000.0, ratio, 0.01);
}

TEST(Mcmc, EmptyExecutedSetReturnsFirstProposal) {
  std::optional<TestCase> chain;
  RngStream a(5), b(5);
  const TestCase t = mcmc_next({}, chain, {}, kUnit2, a);
  EXPECT_EQ(t, uniform_point(kUnit2, b));
  ASSERT_TRUE(chain.has_value());
  EXPECT_EQ(*chain, t);
}

TEST(Mcmc, GeneratorIsDeterministic) {
  McmcGenerator g1(kUnit2, {}), g2(kUnit2, {});
  RngStream a(6), b(6);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(g1.next(a), g2.next(b));
}

TEST(Mcmc, AcceptedPointsStayFartherThanRandom) {
  RngStream setup(77);
  std::vector<TestCase> e;
  for (int i = 0; i < 20; ++i) e.push_back(uniform_point(kUnit2, setup));
  McmcConfig cfg;
  double mcmc_total = 0.0, rt_total = 0.0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    RngStream rng(1000 + t);
    std::optional<TestCase> chain = e[t % e.size()];
    mcmc_total += min_dist(mcmc_next(e, chain, cfg, kUnit2, rng), e);
    rt_total += min_dist(uniform_point(kUnit2, rng), e);
  }
  EXPECT_GT(mcmc_total, rt_total);
}

TEST(Mcmc, RandomWalkStaysInDomain) {
  McmcConfig cfg;
  cfg.proposal = McmcProposal::RandomWalk;
  const InputDomain d({{-1, 1}, {3, 4}});
  McmcGenerator gen(d, cfg);
  RngStream rng(3);
  for (int i = 0; i < 300; ++i) ASSERT_TRUE(d.contains(gen.next(rng)));
}

TEST(Config, InvalidValuesRejected) {
  FscsConfig f;
  f.k = 0;
  EXPECT_THROW(f.validate(), ConfigError);
  RrtConfig r;
  r.exclusion_ratio = 0;
  EXPECT_THROW(r.validate(), ConfigError);
  McmcConfig m;
  m.beta1 = -1;
  EXPECT_THROW(m.validate(), ConfigError);
  EXPECT_THROW(fitness_kind_from_string("best"), ConfigError);
}
