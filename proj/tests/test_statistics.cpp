#include <gtest/gtest.h>

#include <cmath>

#include "artkit/core.hpp"
#include "artkit/statistics.hpp"
#include "oracles.hpp"

using namespace artkit;
using namespace artkit::simlab;

namespace {

std::vector<double> small_sample(RngStream& rng, std::size_t n) {
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<double>(rng.uniform_index(6)));
  return out;
}

}  // namespace

TEST(Summary, MeanSdAndInterval) {
  const std::vector<double> v = {1, 2, 3, 4};
  const auto s = summarize(v);
  EXPECT_EQ(s.count, 4u);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.sd, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_NEAR(s.ci_high - s.mean, 1.96 * s.sd / 2.0, 1e-15);
  EXPECT_THROW(summarize(std::vector<double>{}), ConfigError);
}

TEST(RequiredRuns, ClassicValue) {
  EXPECT_EQ(required_runs(1.96, 1.0, 1.0, 5.0), 1537u);
  EXPECT_EQ(required_runs(1.96, 42.0, 42.0, 5.0), 1537u);
}

TEST(RequiredRuns, EdgeCases) {
  EXPECT_EQ(required_runs(1.96, 0.0, 3.0, 5.0), 1u);
  EXPECT_EQ(required_runs(1.96, 1.0, 1.0, 10.0), 385u);  // ceil(1536.64 / 4)
  EXPECT_EQ(required_runs(1.0, 1.0, 1.0, 10.0) * 4, required_runs(1.0, 1.0, 1.0, 5.0));
  EXPECT_THROW(required_runs(1.96, 1.0, 0.0, 5.0), ConfigError);
  EXPECT_THROW(required_runs(1.96, 1.0, 1.0, 0.0), ConfigError);
  EXPECT_THROW(required_runs(1.96, -1.0, 1.0, 5.0), ConfigError);
  EXPECT_THROW(required_runs(0.0, 1.0, 1.0, 5.0), ConfigError);
}

TEST(MannWhitney, SeparatedSamples) {
  const std::vector<double> a = {1, 2}, b = {3, 4};
  const auto r = mann_whitney_u(a, b);
  EXPECT_EQ(r.u, 0.0);
  EXPECT_TRUE(r.exact);
  EXPECT_NEAR(r.p_two_sided, 2.0 / 6.0, 1e-12);
}

TEST(MannWhitney, IdenticalSamplesGiveOne) {
  const std::vector<double> a = {3, 1, 4, 1, 5};
  EXPECT_NEAR(mann_whitney_u(a, a).p_two_sided, 1.0, 1e-12);
  EXPECT_NEAR(mann_whitney_u(a, a, MannWhitneyMode::Normal).p_two_sided, 1.0, 1e-12);
}

TEST(MannWhitney, ExactModeMatchesEnumeration) {
  RngStream rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = small_sample(rng, 1 + rng.uniform_index(7));
    const auto b = small_sample(rng, 1 + rng.uniform_index(7));
    const auto r = mann_whitney_u(a, b, MannWhitneyMode::Exact);
    ASSERT_DOUBLE_EQ(r.u, oracle::mw_u(a, b));
    ASSERT_NEAR(r.p_two_sided, oracle::mw_exact_p(a, b), 1e-12) << trial;
  }
}

TEST(MannWhitney, NormalApproximationTracksExact) {
  RngStream rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> a, b;
    for (int i = 0; i < 18; ++i) a.push_back(rng.uniform01());
    for (int i = 0; i < 20; ++i) b.push_back(rng.uniform01() + 0.2);
    const double exact = mann_whitney_u(a, b, MannWhitneyMode::Exact).p_two_sided;
    const double normal = mann_whitney_u(a, b, MannWhitneyMode::Normal).p_two_sided;
    EXPECT_NEAR(normal, exact, 0.01 + 0.1 * exact);
  }
}

TEST(MannWhitney, AutoModeSwitchesOnSize) {
  std::vector<double> a(20, 1.0), b(20, 2.0), c(21, 2.0);
  EXPECT_TRUE(mann_whitney_u(a, b).exact);
  EXPECT_FALSE(mann_whitney_u(a, c).exact);
}

TEST(A12, Examples) {
  EXPECT_EQ(a12_effect_size(std::vector<double>{1, 2}, std::vector<double>{3, 4}), 0.0);
  EXPECT_EQ(a12_effect_size(std::vector<double>{5, 5}, std::vector<double>{5, 5}), 0.5);
  EXPECT_EQ(a12_effect_size(std::vector<double>{1, 3}, std::vector<double>{2}), 0.5);
}

TEST(A12, MatchesPairEnumeration) {
  RngStream rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = small_sample(rng, 1 + rng.uniform_index(50));
    const auto b = small_sample(rng, 1 + rng.uniform_index(50));
    ASSERT_DOUBLE_EQ(a12_effect_size(a, b), oracle::a12(a, b));
  }
}

TEST(Improvement, PercentExamples) {
  EXPECT_NEAR(improvement_percent(100.0, 58.0, true), 42.0, 1e-12);
  EXPECT_EQ(improvement_percent(7.0, 7.0, true), 0.0);
  EXPECT_NEAR(improvement_percent(100.0, 58.0, false), -42.0, 1e-12);
  EXPECT_NEAR(improvement_percent(0.5, 0.6, false), 20.0, 1e-12);
  EXPECT_THROW(improvement_percent(0.0, 1.0, true), ConfigError);
}

TEST(Midranks, TiesShareTheirAverage) {
  EXPECT_EQ(midranks(std::vector<double>{10, 20, 20, 30}), (std::vector<double>{1, 2.5, 2.5, 4}));
  EXPECT_EQ(midranks(std::vector<double>{3, 1, 2}), (std::vector<double>{3, 1, 2}));
}

TEST(Kolmogorov, StatisticAndPValue) {
  EXPECT_NEAR(ks_statistic_geometric(std::vector<double>{1, 1, 1, 1}, 0.5), 0.5, 1e-15);
  // Matches the CDF at 1 and 2; at 3 the sample reaches 1 against 0.875.
  EXPECT_NEAR(ks_statistic_geometric(std::vector<double>{1, 1, 2, 3}, 0.5), 0.125, 1e-15);
  EXPECT_NEAR(kolmogorov_p_value(0.0, 100), 1.0, 1e-12);
  EXPECT_LT(kolmogorov_p_value(0.5, 1000), 1e-12);
  // lambda ~ 1.36 is the 5% point of the Kolmogorov distribution.
  EXPECT_NEAR(kolmogorov_p_value(1.358 / 100.0, 10000), 0.05, 0.002);
}
