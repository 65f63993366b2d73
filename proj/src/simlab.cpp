#include "artkit/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include <fmt/format.h>

#include "artkit/metrics.hpp"
#include "artkit/qrs.hpp"
#include "artkit/stfcs.hpp"

namespace artkit::simlab {

void FailurePattern::validate() const {
  if (count < 1) throw ConfigError("failure pattern region count must be >= 1");
  if (kind == PatternKind::BlockRect && !(aspect > 0.0)) {
    throw ConfigError("block aspect ratio must be > 0");
  }
  if (kind == PatternKind::PredominantSquares) {
    if (!(q_percent > 0.0 && q_percent <= 100.0)) {
      throw ConfigError("predominant share q_percent must lie in (0, 100]");
    }
    if (count == 1 && q_percent < 100.0) {
      throw ConfigError("a single predominant square must carry q_percent = 100");
    }
  }
}

std::string_view to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::BlockSquare: return "block_square";
    case PatternKind::BlockRect: return "block_rect";
    case PatternKind::Strip: return "strip";
    case PatternKind::PointEqualCircles: return "point_circles";
    case PatternKind::PointEqualSquares: return "point_squares";
    case PatternKind::PredominantSquares: return "predominant_squares";
  }
  return "block_square";
}

PatternKind pattern_kind_from_string(std::string_view name) {
  for (auto k : {PatternKind::BlockSquare, PatternKind::BlockRect, PatternKind::Strip,
                 PatternKind::PointEqualCircles, PatternKind::PointEqualSquares,
                 PatternKind::PredominantSquares}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError(fmt::format("unknown failure pattern '{}'", name));
}

namespace {

double line_distance(const TestCase& x, const TestCase& a, const TestCase& b) {
  const std::size_t d = x.dims();
  double uu = 0.0, xu = 0.0, xx = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double u = b[j] - a[j];
    const double v = x[j] - a[j];
    uu += u * u;
    xu += v * u;
    xx += v * v;
  }
  const double perp2 = xx - (uu > 0.0 ? xu * xu / uu : 0.0);
  return std::sqrt(std::max(perp2, 0.0));
}

}  // namespace

bool region_contains(const Region& region, const TestCase& tc) {
  return std::visit(
      [&](const auto& r) -> bool {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, BoxRegion>) {
          return r.box.contains(tc);
        } else if constexpr (std::is_same_v<T, BallRegion>) {
          return metrics::dist_squared(tc, r.center) < r.radius * r.radius;
        } else {
          return line_distance(tc, r.a, r.b) <= r.half_width;
        }
      },
      region);
}

bool is_failure(const TestCase& tc, const FailureProfile& profile) {
  if (!profile.domain.contains(tc)) return false;
  return std::any_of(profile.regions.begin(), profile.regions.end(),
                     [&](const Region& r) { return region_contains(r, tc); });
}

double strip_area_2d(const InputDomain& box, const TestCase& a, const TestCase& b,
                     double half_width) {
  using P = std::array<double, 2>;
  std::vector<P> poly = {{box[0].lo, box[1].lo}, {box[0].hi, box[1].lo},
                         {box[0].hi, box[1].hi}, {box[0].lo, box[1].hi}};
  const double ux = b[0] - a[0];
  const double uy = b[1] - a[1];
  const double len = std::hypot(ux, uy);
  if (len == 0.0) return 0.0;
  const double nx = -uy / len;
  const double ny = ux / len;
  // Keep the side where sign * n.(x - a) <= h.
  auto clip = [&](const std::vector<P>& in, double sign) {
    std::vector<P> out;
    auto f = [&](const P& p) { return sign * (nx * (p[0] - a[0]) + ny * (p[1] - a[1])) - half_width; };
    for (std::size_t i = 0; i < in.size(); ++i) {
      const P& cur = in[i];
      const P& nxt = in[(i + 1) % in.size()];
      const double fc = f(cur);
      const double fn = f(nxt);
      if (fc <= 0.0) out.push_back(cur);
      if ((fc < 0.0 && fn > 0.0) || (fc > 0.0 && fn < 0.0)) {
        const double t = fc / (fc - fn);
        out.push_back({cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])});
      }
    }
    return out;
  };
  poly = clip(clip(poly, 1.0), -1.0);
  double area = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const P& p = poly[i];
    const P& q = poly[(i + 1) % poly.size()];
    area += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * std::abs(area);
}

namespace {

constexpr std::size_t kRegionAttempts = 1000;
constexpr std::size_t kStripQmcPoints = std::size_t{1} << 17;

// Lower corner of a box with the given sides, uniform among positions fully
// inside the domain.
std::optional<InputDomain> random_box(const InputDomain& domain, std::span<const double> sides,
                                      RngStream& rng) {
  std::vector<Interval> bounds(domain.dims());
  for (std::size_t j = 0; j < domain.dims(); ++j) {
    const double slack = domain[j].width() - sides[j];
    if (slack < 0.0) return std::nullopt;
    const double lo = domain[j].lo + (slack > 0.0 ? rng.uniform(0.0, slack) : 0.0);
    bounds[j] = Interval{lo, lo + sides[j]};
  }
  return InputDomain(std::move(bounds));
}

bool boxes_overlap(const InputDomain& a, const InputDomain& b) {
  for (std::size_t j = 0; j < a.dims(); ++j) {
    if (!(a[j].lo < b[j].hi && b[j].lo < a[j].hi)) return false;
  }
  return true;
}

bool overlaps(const Region& a, const Region& b) {
  if (const auto* ba = std::get_if<BoxRegion>(&a)) {
    if (const auto* bb = std::get_if<BoxRegion>(&b)) return boxes_overlap(ba->box, bb->box);
  }
  if (const auto* ca = std::get_if<BallRegion>(&a)) {
    if (const auto* cb = std::get_if<BallRegion>(&b)) {
      const double r = ca->radius + cb->radius;
      return metrics::dist_squared(ca->center, cb->center) < r * r;
    }
  }
  return false;
}

double region_volume(const Region& region, std::size_t d) {
  if (const auto* b = std::get_if<BoxRegion>(&region)) return b->box.volume();
  if (const auto* c = std::get_if<BallRegion>(&region)) {
    return stfcs::unit_ball_volume(d) * std::pow(c->radius, static_cast<double>(d));
  }
  return 0.0;
}

// Place one region per requested volume, without overlaps. Returns false if
// some region could not be placed.
bool place_all(const InputDomain& domain, std::span<const double> volumes, bool balls,
               RngStream& rng, std::vector<Region>& out) {
  const std::size_t d = domain.dims();
  out.clear();
  for (double v : volumes) {
    bool placed = false;
    for (std::size_t attempt = 0; attempt < kRegionAttempts && !placed; ++attempt) {
      std::optional<Region> candidate;
      if (balls) {
        const double radius =
            std::pow(v / stfcs::unit_ball_volume(d), 1.0 / static_cast<double>(d));
        std::vector<double> c(d);
        bool fits = true;
        for (std::size_t j = 0; j < d; ++j) {
          const double slack = domain[j].width() - 2.0 * radius;
          if (slack < 0.0) {
            fits = false;
            break;
          }
          c[j] = domain[j].lo + radius + (slack > 0.0 ? rng.uniform(0.0, slack) : 0.0);
        }
        if (!fits) return false;
        candidate = BallRegion{TestCase(std::move(c)), radius};
      } else {
        const std::vector<double> sides(d, std::pow(v, 1.0 / static_cast<double>(d)));
        auto box = random_box(domain, sides, rng);
        if (!box) return false;
        candidate = BoxRegion{*box};
      }
      const bool clash = std::any_of(out.begin(), out.end(),
                                     [&](const Region& r) { return overlaps(r, *candidate); });
      if (!clash) {
        out.push_back(std::move(*candidate));
        placed = true;
      }
    }
    if (!placed) return false;
  }
  return true;
}

TestCase point_on_face(const InputDomain& domain, std::size_t face, RngStream& rng) {
  TestCase p = uniform_point(domain, rng);
  const std::size_t axis = face / 2;
  p[axis] = face % 2 == 0 ? domain[axis].lo : domain[axis].hi;
  return p;
}

double strip_measure(const InputDomain& domain, const TestCase& a, const TestCase& b, double h) {
  if (domain.dims() == 2) return strip_area_2d(domain, a, b, h);
  // Quasi-Monte-Carlo estimate over a Halton point set.
  const auto bases = qrs::first_primes(domain.dims());
  std::size_t inside = 0;
  TestCase x;
  for (std::size_t i = 1; i <= kStripQmcPoints; ++i) {
    x = qrs::halton(i, bases);
    for (std::size_t j = 0; j < domain.dims(); ++j) x[j] = domain[j].lo + x[j] * domain[j].width();
    inside += line_distance(x, a, b) <= h ? 1 : 0;
  }
  return domain.volume() * static_cast<double>(inside) / static_cast<double>(kStripQmcPoints);
}

}  // namespace

FailureProfile place_regions(const InputDomain& domain, double theta, const FailurePattern& pattern,
                             RngStream& rng) {
  if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("failure rate theta must lie in (0, 1)");
  pattern.validate();
  const std::size_t d = domain.dims();
  const double target = theta * domain.volume();
  FailureProfile profile{domain, theta, pattern, {}, 0.0, rng.seed()};

  switch (pattern.kind) {
    case PatternKind::BlockSquare:
    case PatternKind::BlockRect: {
      std::vector<double> sides(d);
      if (pattern.kind == PatternKind::BlockSquare) {
        std::fill(sides.begin(), sides.end(), std::pow(target, 1.0 / static_cast<double>(d)));
      } else {
        const double t = std::pow(target / pattern.aspect, 1.0 / static_cast<double>(d));
        std::fill(sides.begin(), sides.end(), t);
        sides[0] = pattern.aspect * t;
      }
      auto box = random_box(domain, sides, rng);
      if (!box) throw ConfigError("failure block does not fit inside the domain");
      profile.regions.push_back(BoxRegion{*box});
      break;
    }
    case PatternKind::PointEqualCircles:
    case PatternKind::PointEqualSquares:
    case PatternKind::PredominantSquares: {
      std::vector<double> volumes(pattern.count, target / static_cast<double>(pattern.count));
      const bool balls = pattern.kind == PatternKind::PointEqualCircles;
      bool ok = false;
      for (std::size_t restart = 0; restart < kPlacementRetries / kRegionAttempts && !ok; ++restart) {
        if (pattern.kind == PatternKind::PredominantSquares) {
          volumes[0] = target * pattern.q_percent / 100.0;
          if (pattern.count > 1) {
            // Symmetric Dirichlet(1) split of the remainder.
            std::vector<double> w(pattern.count - 1);
            double sum = 0.0;
            for (auto& x : w) sum += (x = rng.exponential());
            for (std::size_t i = 1; i < pattern.count; ++i) {
              volumes[i] = (target - volumes[0]) * w[i - 1] / sum;
            }
          }
        }
        ok = place_all(domain, volumes, balls, rng, profile.regions);
      }
      if (!ok) {
        throw ConfigError(fmt::format(
            "could not place {} non-overlapping failure regions for theta {}", pattern.count, theta));
      }
      break;
    }
    case PatternKind::Strip: {
      const std::size_t f1 = rng.uniform_index(2 * d);
      std::size_t f2 = rng.uniform_index(2 * d - 1);
      if (f2 >= f1) ++f2;
      const TestCase a = point_on_face(domain, f1, rng);
      const TestCase b = point_on_face(domain, f2, rng);
      double lo = 0.0;
      double hi = domain.diameter();
      double measure = 0.0;
      for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        measure = strip_measure(domain, a, b, mid);
        if (std::abs(measure - target) <= 1e-6 * target) {
          lo = hi = mid;
          break;
        }
        (measure < target ? lo : hi) = mid;
      }
      const double h = 0.5 * (lo + hi);
      profile.regions.push_back(StripRegion{a, b, h});
      profile.measure = strip_measure(domain, a, b, h);
      return profile;
    }
  }
  for (const auto& r : profile.regions) profile.measure += region_volume(r, d);
  return profile;
}

RunRecord run_fm(Generator& generator, const FailureProfile& profile, std::uint64_t m,
                 std::uint64_t cap, RngStream& rng, bool record_time) {
  if (m < 1) throw ConfigError("F-measure needs m >= 1");
  if (cap < 1) throw ConfigError("test cap must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  RunRecord record;
  std::uint64_t failures = 0;
  std::uint64_t count = 0;
  while (count < cap) {
    ++count;
    if (is_failure(generator.next(rng), profile) && ++failures == m) break;
  }
  record.f_count = count;
  record.censored = failures < m;
  if (record_time) {
    record.f_time_ns = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() -
                                                             start)
            .count());
  }
  return record;
}

RunRecord run_f(Generator& generator, const FailureProfile& profile, std::uint64_t cap,
                RngStream& rng, bool record_time) {
  return run_fm(generator, profile, 1, cap, rng, record_time);
}

std::uint64_t count_failures(Generator& generator, const FailureProfile& profile, std::uint64_t n,
                             RngStream& rng) {
  std::uint64_t failures = 0;
  for (std::uint64_t i = 0; i < n; ++i) failures += is_failure(generator.next(rng), profile) ? 1 : 0;
  return failures;
}

FailureProfile profile_for_run(const InputDomain& domain, const ProfileSpec& spec,
                               std::uint64_t master_seed, std::size_t run) {
  RngStream rng = spec.replace_per_run ? RngStream::derive(master_seed, run, kPlacementTag)
                                       : RngStream(spec.placement_seed);
  return place_regions(domain, spec.theta, spec.pattern, rng);
}

void for_each_run(std::size_t runs, std::size_t jobs, const GeneratorFactory& factory,
                  const std::function<void(std::size_t, Generator&)>& body) {
  jobs = std::max<std::size_t>(1, std::min(jobs, runs));
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_run = runs;
  std::exception_ptr error;

  auto worker = [&] {
    GeneratorPtr generator;
    try {
      generator = factory();
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) {
        error = std::current_exception();
        error_run = 0;
      }
      return;
    }
    for (std::size_t run = next++; run < runs; run = next++) {
      try {
        generator->reset();
        body(run, *generator);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (run < error_run) {
          error_run = run;
          error = std::current_exception();
        }
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(jobs);
    for (std::size_t j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);
}

std::vector<RunRecord> run_campaign(const GeneratorFactory& factory, const InputDomain& domain,
                                    const ProfileSpec& profile, const CampaignSpec& campaign) {
  if (campaign.runs < 1) throw ConfigError("a campaign needs at least one run");
  std::vector<RunRecord> records(campaign.runs);
  std::optional<FailureProfile> shared;
  if (!profile.replace_per_run) shared = profile_for_run(domain, profile, campaign.master_seed, 0);
  for_each_run(campaign.runs, campaign.jobs, factory, [&](std::size_t run, Generator& gen) {
    const FailureProfile placed =
        shared ? *shared : profile_for_run(domain, profile, campaign.master_seed, run);
    RngStream rng = RngStream::derive(campaign.master_seed, run, kGenerationTag);
    records[run] = run_fm(gen, placed, campaign.m, campaign.cap, rng, campaign.record_time);
    records[run].run_index = run;
  });
  return records;
}

std::vector<std::uint64_t> failure_counts(const GeneratorFactory& factory,
                                          const InputDomain& domain, const ProfileSpec& profile,
                                          std::uint64_t n, std::size_t runs,
                                          std::uint64_t master_seed, std::size_t jobs) {
  if (runs < 1) throw ConfigError("a campaign needs at least one run");
  std::vector<std::uint64_t> counts(runs, 0);
  std::optional<FailureProfile> shared;
  if (!profile.replace_per_run) shared = profile_for_run(domain, profile, master_seed, 0);
  for_each_run(runs, jobs, factory, [&](std::size_t run, Generator& gen) {
    const FailureProfile placed = shared ? *shared : profile_for_run(domain, profile, master_seed, run);
    RngStream rng = RngStream::derive(master_seed, run, kGenerationTag);
    counts[run] = count_failures(gen, placed, n, rng);
  });
  return counts;
}

double p_measure(const GeneratorFactory& factory, const InputDomain& domain,
                 const ProfileSpec& profile, std::uint64_t n, std::size_t runs,
                 std::uint64_t master_seed, std::size_t jobs) {
  const auto counts = failure_counts(factory, domain, profile, n, runs, master_seed, jobs);
  const auto hits = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });
  return static_cast<double>(hits) / static_cast<double>(runs);
}

double e_measure(const GeneratorFactory& factory, const InputDomain& domain,
                 const ProfileSpec& profile, std::uint64_t n, std::size_t runs,
                 std::uint64_t master_seed, std::size_t jobs) {
  const auto counts = failure_counts(factory, domain, profile, n, runs, master_seed, jobs);
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  return total / static_cast<double>(runs);
}

std::string format_double(double value) { return fmt::format("{}", value); }

void write_runs_csv(std::ostream& out, std::string_view generator, const ProfileSpec& profile,
                    std::size_t dims, std::span<const RunRecord> records, bool header) {
  if (header) out << kRunsCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.run_index << ',' << generator << ',' << to_string(profile.pattern.kind) << ','
        << format_double(profile.theta) << ',' << dims << ',' << r.f_count << ','
        << (r.censored ? 1 : 0) << ',' << r.f_time_ns << '\n';
  }
}

}  // namespace artkit::simlab
