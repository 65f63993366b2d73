#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "artkit/qrs.hpp"
#include "artkit/simlab.hpp"
#include "artkit/statistics.hpp"
#include "artkit/stfcs.hpp"

using namespace artkit;
using namespace artkit::simlab;

namespace {

const InputDomain kUnit2 = InputDomain::unit(2);

// Independent membership test built only from the region description.
bool oracle_member(const Region& region, const TestCase& x) {
  if (const auto* b = std::get_if<BoxRegion>(&region)) {
    for (std::size_t j = 0; j < x.dims(); ++j) {
      if (x[j] < b->box[j].lo || x[j] >= b->box[j].hi) return false;
    }
    return true;
  }
  if (const auto* c = std::get_if<BallRegion>(&region)) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.dims(); ++j) s += std::pow(x[j] - c->center[j], 2);
    return std::sqrt(s) < c->radius;
  }
  const auto& s = std::get<StripRegion>(region);
  // Distance from x to the closest point a + t (b - a) of the axis line.
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < x.dims(); ++j) {
    num += (x[j] - s.a[j]) * (s.b[j] - s.a[j]);
    den += (s.b[j] - s.a[j]) * (s.b[j] - s.a[j]);
  }
  const double t = num / den;
  double d2 = 0.0;
  for (std::size_t j = 0; j < x.dims(); ++j) {
    d2 += std::pow(x[j] - (s.a[j] + t * (s.b[j] - s.a[j])), 2);
  }
  return std::sqrt(d2) <= s.half_width;
}

double qmc_measure(const FailureProfile& p, std::size_t samples) {
  const auto bases = qrs::first_primes(p.domain.dims());
  std::size_t hits = 0;
  for (std::size_t i = 1; i <= samples; ++i) {
    TestCase u = qrs::halton(i, bases);
    for (std::size_t j = 0; j < u.dims(); ++j) u[j] = p.domain[j].lo + u[j] * p.domain[j].width();
    hits += is_failure(u, p) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(samples) * p.domain.volume();
}

std::vector<double> f_counts(const std::vector<RunRecord>& runs) {
  std::vector<double> out;
  for (const auto& r : runs) out.push_back(static_cast<double>(r.f_count));
  return out;
}

ProfileSpec block(double theta) {
  ProfileSpec spec;
  spec.theta = theta;
  return spec;
}

GeneratorFactory rt_factory(const InputDomain& d) {
  return [d] { return rt_generator(d); };
}

const PatternKind kAllPatterns[] = {
    PatternKind::BlockSquare,       PatternKind::BlockRect,         PatternKind::Strip,
    PatternKind::PointEqualCircles, PatternKind::PointEqualSquares, PatternKind::PredominantSquares,
};

}  // namespace

TEST(Placement, BlockSquareSide) {
  RngStream rng(1);
  const auto p = place_regions(kUnit2, 0.04, {}, rng);
  ASSERT_EQ(p.regions.size(), 1u);
  const auto& box = std::get<BoxRegion>(p.regions[0]).box;
  EXPECT_NEAR(box[0].width(), 0.2, 1e-12);
  EXPECT_NEAR(box[1].width(), 0.2, 1e-12);
  EXPECT_GE(box[0].lo, 0.0);
  EXPECT_LE(box[1].hi, 1.0);
  EXPECT_NEAR(p.measure, 0.04, 1e-12);
}

TEST(Placement, BlockRectAspect) {
  RngStream rng(2);
  const auto p = place_regions(InputDomain::unit(3), 0.02, {PatternKind::BlockRect, 4.0}, rng);
  const auto& box = std::get<BoxRegion>(p.regions[0]).box;
  EXPECT_NEAR(box[0].width() / box[1].width(), 4.0, 1e-9);
  EXPECT_NEAR(box[1].width(), box[2].width(), 1e-12);
  EXPECT_NEAR(box.volume(), 0.02, 1e-12);
}

TEST(Placement, EqualCirclesShareTheta) {
  RngStream rng(3);
  const auto p = place_regions(kUnit2, 0.01, {PatternKind::PointEqualCircles, 2.0, 4}, rng);
  ASSERT_EQ(p.regions.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& c = std::get<BallRegion>(p.regions[i]);
    EXPECT_NEAR(std::numbers::pi * c.radius * c.radius, 0.0025, 1e-12);
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_GE(c.center[j] - c.radius, 0.0);
      EXPECT_LE(c.center[j] + c.radius, 1.0);
    }
    for (std::size_t k = i + 1; k < 4; ++k) {
      const auto& o = std::get<BallRegion>(p.regions[k]);
      EXPECT_GE(std::hypot(c.center[0] - o.center[0], c.center[1] - o.center[1]),
                c.radius + o.radius);
    }
  }
}

TEST(Placement, PredominantSquareCarriesShare) {
  RngStream rng(4);
  const auto p = place_regions(kUnit2, 0.02, {PatternKind::PredominantSquares, 2.0, 5, 60.0}, rng);
  ASSERT_EQ(p.regions.size(), 5u);
  EXPECT_NEAR(std::get<BoxRegion>(p.regions[0]).box.volume(), 0.012, 1e-12);
  double total = 0.0;
  for (const auto& r : p.regions) total += std::get<BoxRegion>(r).box.volume();
  EXPECT_NEAR(total, 0.02, 1e-12);
}

TEST(Placement, MeasuredVolumeMatchesTheta) {
  for (std::size_t d : {2u, 3u}) {
    const InputDomain dom = d == 2 ? InputDomain({{0, 2}, {-1, 1}}) : InputDomain::unit(3);
    for (auto kind : kAllPatterns) {
      RngStream rng(10 + d);
      const FailurePattern pattern{kind, 2.0, 3, 50.0};
      const auto p = place_regions(dom, 0.05, pattern, rng);
      const double target = 0.05 * dom.volume();
      EXPECT_NEAR(p.measure, target, 0.01 * target) << to_string(kind) << " d=" << d;
      EXPECT_NEAR(qmc_measure(p, 1'000'000), target, 0.01 * target)
          << to_string(kind) << " d=" << d;
    }
  }
}

TEST(Placement, InfeasibleRequestsFail) {
  RngStream rng(5);
  EXPECT_THROW(place_regions(kUnit2, 0.0, {}, rng), ConfigError);
  EXPECT_THROW(place_regions(kUnit2, 1.0, {}, rng), ConfigError);
  EXPECT_THROW(place_regions(kUnit2, 0.9, {PatternKind::PointEqualCircles, 2.0, 30}, rng),
               ConfigError);
  EXPECT_THROW(place_regions(kUnit2, 0.9, {PatternKind::BlockRect, 20.0}, rng), ConfigError);
}

TEST(Placement, PatternValidation) {
  EXPECT_THROW((FailurePattern{PatternKind::PointEqualSquares, 2.0, 0}.validate()), ConfigError);
  EXPECT_THROW((FailurePattern{PatternKind::PredominantSquares, 2.0, 3, 0.0}.validate()),
               ConfigError);
  EXPECT_THROW((FailurePattern{PatternKind::PredominantSquares, 2.0, 1, 50.0}.validate()),
               ConfigError);
  for (auto kind : kAllPatterns) EXPECT_EQ(pattern_kind_from_string(to_string(kind)), kind);
  EXPECT_THROW(pattern_kind_from_string("blob"), ConfigError);
}

TEST(StripArea, ExactClippedBands) {
  EXPECT_NEAR(strip_area_2d(kUnit2, {0.0, 0.5}, {1.0, 0.5}, 0.1), 0.2, 1e-12);
  const double h = 0.1;
  EXPECT_NEAR(strip_area_2d(kUnit2, {0.0, 0.0}, {1.0, 1.0}, h),
              1.0 - std::pow(1.0 - std::sqrt(2.0) * h, 2), 1e-12);
  EXPECT_NEAR(strip_area_2d(kUnit2, {0.0, 0.5}, {1.0, 0.5}, 5.0), 1.0, 1e-12);
}

TEST(IsFailure, MatchesMembershipOracle) {
  for (auto kind : kAllPatterns) {
    RngStream rng(20);
    const auto p = place_regions(kUnit2, 0.1, {kind, 2.0, 3, 50.0}, rng);
    if (const auto* b = std::get_if<BoxRegion>(&p.regions[0])) {
      EXPECT_TRUE(is_failure(b->box.center(), p));
    }
    for (int i = 0; i < 10000; ++i) {
      const TestCase x = uniform_point(kUnit2, rng);
      bool want = false;
      for (const auto& r : p.regions) want = want || oracle_member(r, x);
      ASSERT_EQ(is_failure(x, p), want) << to_string(kind);
    }
  }
}

TEST(IsFailure, CornerOutsideSmallBlock) {
  FailureProfile p{kUnit2, 0.01, {}, {BoxRegion{InputDomain({{0.4, 0.5}, {0.4, 0.5}})}}, 0.01, 0};
  EXPECT_FALSE(is_failure({0.0, 0.0}, p));
  EXPECT_TRUE(is_failure({0.45, 0.45}, p));
}

TEST(RunF, WholeDomainFailsAtOnce) {
  FailureProfile p{kUnit2, 0.99, {}, {BoxRegion{kUnit2}}, 1.0, 0};
  RandomGenerator rt(kUnit2);
  RngStream rng(1);
  const auto r = run_f(rt, p, 100, rng);
  EXPECT_EQ(r.f_count, 1u);
  EXPECT_FALSE(r.censored);
  EXPECT_EQ(r.f_time_ns, 0u);
}

TEST(RunF, CapCensorsTheRun) {
  FailureProfile p{kUnit2, 1e-9, {}, {BoxRegion{InputDomain({{0, 1e-5}, {0, 1e-4}})}}, 1e-9, 0};
  RandomGenerator rt(kUnit2);
  RngStream rng(1);
  const auto r = run_f(rt, p, 5, rng);
  EXPECT_EQ(r.f_count, 5u);
  EXPECT_TRUE(r.censored);
  EXPECT_THROW(run_f(rt, p, 0, rng), ConfigError);
}

TEST(RunF, RandomTestingIsGeometric) {
  CampaignSpec c;
  c.runs = 5000;
  c.master_seed = 77;
  const auto runs = run_campaign(rt_factory(kUnit2), kUnit2, block(0.01), c);
  const auto f = f_counts(runs);
  EXPECT_NEAR(summarize(f).mean, 100.0, 5.0);
  const double ks = ks_statistic_geometric(f, 0.01);
  EXPECT_GT(kolmogorov_p_value(ks, f.size()), 0.01);
}

TEST(RunFm, NegativeBinomialMeanAndMonotone) {
  CampaignSpec c;
  c.runs = 3000;
  c.master_seed = 5;
  c.m = 2;
  const auto f2 = run_campaign(rt_factory(kUnit2), kUnit2, block(0.01), c);
  c.m = 1;
  const auto f1 = run_campaign(rt_factory(kUnit2), kUnit2, block(0.01), c);
  EXPECT_NEAR(summarize(f_counts(f2)).mean, 200.0, 10.0);
  for (std::size_t i = 0; i < f1.size(); ++i) ASSERT_GE(f2[i].f_count, f1[i].f_count);
}

TEST(RunFm, TimingOnlyWhenRequested) {
  FailureProfile p{kUnit2, 0.01, {}, {BoxRegion{InputDomain({{0, 0.1}, {0, 0.1}})}}, 0.01, 0};
  RandomGenerator rt(kUnit2);
  RngStream rng(3);
  EXPECT_EQ(run_fm(rt, p, 3, 100000, rng).f_time_ns, 0u);
  EXPECT_GT(run_fm(rt, p, 3, 100000, rng, true).f_time_ns, 0u);
}

TEST(Measures, RandomTestingAnalyticValues) {
  EXPECT_NEAR(p_measure(rt_factory(kUnit2), kUnit2, block(0.5), 2, 10000, 1), 0.75, 0.02);
  EXPECT_NEAR(e_measure(rt_factory(kUnit2), kUnit2, block(0.01), 100, 10000, 2), 1.0, 0.05);
  EXPECT_EQ(e_measure(rt_factory(kUnit2), kUnit2, block(0.01), 0, 100, 2), 0.0);
  EXPECT_LT(p_measure(rt_factory(kUnit2), kUnit2, block(1e-6), 10, 1000, 3), 0.005);
}

TEST(Measures, ConsistentWithPerRunCounts) {
  const auto spec = block(0.02);
  const auto counts = failure_counts(rt_factory(kUnit2), kUnit2, spec, 50, 500, 9);
  double total = 0.0, hit = 0.0;
  for (auto c : counts) {
    total += static_cast<double>(c);
    hit += c > 0 ? 1.0 : 0.0;
  }
  const double e = e_measure(rt_factory(kUnit2), kUnit2, spec, 50, 500, 9);
  const double p = p_measure(rt_factory(kUnit2), kUnit2, spec, 50, 500, 9);
  EXPECT_DOUBLE_EQ(e, total / 500);
  EXPECT_DOUBLE_EQ(p, hit / 500);
  EXPECT_GE(e, p);
}

TEST(Measures, FscsDetectsMoreOftenThanRandom) {
  const auto spec = block(0.005);
  const std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  const auto indicators = [&](const GeneratorFactory& f) {
    std::vector<double> out;
    for (auto c : failure_counts(f, kUnit2, spec, 500, 2000, 31, jobs)) out.push_back(c > 0);
    return out;
  };
  const auto rt = indicators(rt_factory(kUnit2));
  const auto fscs = indicators([] { return std::make_unique<stfcs::FscsGenerator>(kUnit2, stfcs::FscsConfig{}); });
  const auto mw = mann_whitney_u(fscs, rt);
  EXPECT_GT(summarize(fscs).mean, summarize(rt).mean);
  EXPECT_LT(mw.p_two_sided / 2.0, 0.05);
}

TEST(Campaign, ParallelAndSerialAgree) {
  CampaignSpec c;
  c.runs = 300;
  c.master_seed = 12;
  ProfileSpec spec = block(0.01);
  spec.pattern = {PatternKind::PointEqualCircles, 2.0, 5};
  const GeneratorFactory fscs = [] {
    return std::make_unique<stfcs::FscsGenerator>(kUnit2, stfcs::FscsConfig{});
  };
  const auto serial = run_campaign(fscs, kUnit2, spec, c);
  c.jobs = 4;
  const auto parallel = run_campaign(fscs, kUnit2, spec, c);
  std::ostringstream a, b;
  write_runs_csv(a, "fscs", spec, 2, serial);
  write_runs_csv(b, "fscs", spec, 2, parallel);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, kRunsCsvHeader.size()), kRunsCsvHeader);
}

TEST(Campaign, FixedPlacementSharesRegions) {
  ProfileSpec spec = block(0.01);
  spec.replace_per_run = false;
  spec.placement_seed = 4;
  const auto a = profile_for_run(kUnit2, spec, 1, 0);
  const auto b = profile_for_run(kUnit2, spec, 2, 9);
  EXPECT_EQ(std::get<BoxRegion>(a.regions[0]).box, std::get<BoxRegion>(b.regions[0]).box);
  spec.replace_per_run = true;
  const auto c = profile_for_run(kUnit2, spec, 1, 0);
  const auto d = profile_for_run(kUnit2, spec, 1, 1);
  EXPECT_NE(std::get<BoxRegion>(c.regions[0]).box, std::get<BoxRegion>(d.regions[0]).box);
}

TEST(Campaign, LowestFailingRunIsReported) {
  try {
    for_each_run(50, 4, rt_factory(kUnit2), [](std::size_t run, Generator&) {
      if (run % 7 == 3) throw std::runtime_error("run " + std::to_string(run));
    });
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "run 3");
  }
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(2.0), "2");
  RngStream rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform01();
    ASSERT_EQ(std::stod(format_double(x)), x);
  }
}
