#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "artkit/metrics.hpp"
#include "artkit/qrs.hpp"
#include "oracles.hpp"

using namespace artkit;
using namespace artkit::metrics;

namespace {

std::vector<TestCase> random_points(std::size_t n, std::size_t d, std::uint64_t seed) {
  RngStream rng(seed);
  const InputDomain unit = InputDomain::unit(d);
  std::vector<TestCase> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(uniform_point(unit, rng));
  return out;
}

}  // namespace

TEST(Dist, ScaledThreeFourFive) {
  EXPECT_DOUBLE_EQ(dist({0.0, 0.0}, {0.6, 0.8}), 1.0);
  EXPECT_EQ(dist({0.3, 0.7}, {0.3, 0.7}), 0.0);
}

TEST(Dist, SymmetricOnRandomPairs) {
  RngStream rng(2);
  const InputDomain d = InputDomain::unit(5);
  for (int i = 0; i < 200; ++i) {
    const TestCase a = uniform_point(d, rng);
    const TestCase b = uniform_point(d, rng);
    ASSERT_EQ(dist(a, b), dist(b, a));
  }
}

TEST(Dist, DimensionMismatchThrows) {
  EXPECT_THROW(dist({0.0}, {0.0, 1.0}), ConfigError);
}

TEST(Discrepancy, SingleHalfSubdomain) {
  const InputDomain unit = InputDomain::unit(1);
  SubdomainSample s;
  s.boxes.push_back(InputDomain({{0.0, 0.5}}));
  EXPECT_DOUBLE_EQ(discrepancy(std::vector<TestCase>{{0.5}}, unit, s), 0.5);
}

TEST(Discrepancy, ProportionalFillIsZero) {
  const InputDomain unit = InputDomain::unit(1);
  SubdomainSample s;
  s.boxes.push_back(InputDomain({{0.0, 0.5}}));
  s.boxes.push_back(InputDomain({{0.25, 1.0}}));
  const std::vector<TestCase> t = {{0.125}, {0.375}, {0.625}, {0.875}};
  EXPECT_DOUBLE_EQ(discrepancy(t, unit, s), 0.0);
}

TEST(Discrepancy, EmptySetThrows) {
  RngStream rng(1);
  EXPECT_THROW(discrepancy(std::vector<TestCase>{}, InputDomain::unit(2), 10, rng), ConfigError);
}

TEST(Discrepancy, BoundedByOneAndMatchesBoxCountOracle) {
  const InputDomain unit = InputDomain::unit(2);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto pts = random_points(40, 2, seed);
    RngStream rng(seed + 100);
    const auto sample = SubdomainSample::draw(unit, 50, rng);
    double expected = 0.0;
    for (const auto& box : sample.boxes) {
      double inside = 0.0;
      for (const auto& p : pts) {
        bool in = true;
        for (std::size_t j = 0; j < 2; ++j) in = in && box[j].lo <= p[j] && p[j] < box[j].hi;
        inside += in ? 1.0 : 0.0;
      }
      const double share = (box[0].hi - box[0].lo) * (box[1].hi - box[1].lo);
      expected = std::max(expected, std::abs(inside / 40.0 - share));
    }
    const double got = discrepancy(pts, unit, sample);
    EXPECT_DOUBLE_EQ(got, expected);
    EXPECT_GE(got, 0.0);
    EXPECT_LE(got, 1.0);
  }
}

TEST(Discrepancy, HaltonBeatsRandomAtThousandPoints) {
  const InputDomain unit = InputDomain::unit(2);
  std::vector<TestCase> halton;
  const std::vector<std::uint32_t> bases = {2, 3};
  for (std::uint64_t i = 1; i <= 1000; ++i) halton.push_back(qrs::halton(i, bases));
  const auto rt = random_points(1000, 2, 17);
  RngStream rng(5);
  const auto sample = SubdomainSample::draw(unit, 1000, rng);
  EXPECT_LT(discrepancy(halton, unit, sample), discrepancy(rt, unit, sample));
}

TEST(Dispersion, SmallCases) {
  EXPECT_DOUBLE_EQ(dispersion(std::vector<TestCase>{{0, 0}, {1, 1}}), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(dispersion(std::vector<TestCase>{{0.0}, {0.5}, {1.0}}), 0.5);
  EXPECT_THROW(dispersion(std::vector<TestCase>{{0.0}}), ConfigError);
}

TEST(Diversity, SmallCases) {
  EXPECT_DOUBLE_EQ(diversity(std::vector<TestCase>{{0, 0}, {1, 1}}), 2.0 * std::sqrt(2.0));
  EXPECT_THROW(diversity(std::vector<TestCase>{{0.5, 0.5}}), ConfigError);
}

TEST(Divergence, SmallCases) {
  EXPECT_DOUBLE_EQ(divergence(std::vector<TestCase>{{0, 0}, {1, 1}}), 2.0 * std::sqrt(2.0));
  EXPECT_EQ(divergence(std::vector<TestCase>{{0.3, 0.3}}), 0.0);
}

TEST(Metrics, EqualBruteForceOracles) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 2 + seed % 49;
    const std::size_t d = 1 + seed % 4;
    auto pts = random_points(n, d, seed);
    if (seed % 5 == 0) pts.push_back(pts.front());  // duplicates
    EXPECT_DOUBLE_EQ(dispersion(pts), oracle::dispersion(pts)) << seed;
    EXPECT_NEAR(diversity(pts), oracle::diversity(pts), 1e-12 * n) << seed;
    EXPECT_NEAR(divergence(pts), oracle::divergence(pts), 1e-11 * n * n) << seed;
    const auto nn = nearest_neighbor_distances(pts);
    const auto nn_ref = oracle::nn_distances(pts);
    for (std::size_t i = 0; i < pts.size(); ++i) ASSERT_DOUBLE_EQ(nn[i], nn_ref[i]);
  }
}

TEST(Metrics, DispersionAndDiversityBounds) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto pts = random_points(30, 3, seed);
    const double disp = dispersion(pts);
    EXPECT_LE(disp, InputDomain::unit(3).diameter());
    EXPECT_LE(diversity(pts), 30 * disp + 1e-12);
  }
}

TEST(Metrics, DivergenceInvariantUnderReordering) {
  auto pts = random_points(25, 2, 8);
  const double before = divergence(pts);
  std::reverse(pts.begin(), pts.end());
  std::rotate(pts.begin(), pts.begin() + 7, pts.end());
  EXPECT_NEAR(divergence(pts), before, 1e-12 * before);
}

TEST(EdgeCenter, CenterRegionHoldsHalfTheVolume) {
  const InputDomain d({{0, 2}, {0, 4}, {1, 2}});
  EXPECT_NEAR(center_region(d).volume(), 0.5 * d.volume(), 1e-12);
  EXPECT_TRUE(center_region(InputDomain::unit(2)).contains({0.5, 0.5}));
}

TEST(EdgeCenter, CornersOnlyGiveSentinel) {
  const std::vector<TestCase> corners = {{0, 0}, {0, 0.999}, {0.999, 0}, {0.999, 0.999}};
  EXPECT_EQ(edge_center_ratio(corners, InputDomain::unit(2)), kEmptyCenter);
  EXPECT_TRUE(std::isinf(kEmptyCenter));
}

TEST(EdgeCenter, RandomTestingIsBalanced) {
  const auto pts = random_points(10000, 2, 21);
  EXPECT_NEAR(edge_center_ratio(pts, InputDomain::unit(2)), 1.0, 0.1);
}

TEST(CenterDistance, Examples) {
  const InputDomain unit = InputDomain::unit(2);
  EXPECT_EQ(center_distance({0.5, 0.5}, unit), 0.0);
  EXPECT_EQ(center_distance({0.0, 0.0}, unit), 0.5);
  EXPECT_NEAR(center_distance({0.9, 0.6}, unit), 0.4, 1e-15);
}
