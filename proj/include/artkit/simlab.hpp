#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "artkit/core.hpp"

// Failure-region simulation and effectiveness measures.
namespace artkit::simlab {

enum class PatternKind {
  BlockSquare,
  BlockRect,
  Strip,
  PointEqualCircles,
  PointEqualSquares,
  PredominantSquares,
};

struct FailurePattern {
  PatternKind kind = PatternKind::BlockSquare;
  double aspect = 2.0;      // BlockRect: first side over the others
  std::size_t count = 1;    // Point* and Predominant
  double q_percent = 50.0;  // Predominant: share of theta in the main square

  void validate() const;
};

std::string_view to_string(PatternKind kind);
PatternKind pattern_kind_from_string(std::string_view name);

struct BoxRegion {
  InputDomain box;
};

struct BallRegion {
  TestCase center;
  double radius = 0.0;
};

// Points within `half_width` of the line through `a` and `b`, clipped to the
// domain.
struct StripRegion {
  TestCase a;
  TestCase b;
  double half_width = 0.0;
};

using Region = std::variant<BoxRegion, BallRegion, StripRegion>;

bool region_contains(const Region& region, const TestCase& tc);

/// Placed failure regions. `measure` is the total failure volume inside the
/// domain (exact for boxes and balls; for strips exact in 2-D and a
/// quasi-Monte-Carlo estimate otherwise).
struct FailureProfile {
  InputDomain domain;
  double theta = 0.0;
  FailurePattern pattern;
  std::vector<Region> regions;
  double measure = 0.0;
  std::uint64_t placement_seed = 0;
};

inline constexpr std::uint64_t kPlacementRetries = 100'000;

/// Place regions of total measure theta * |D| at random. Block and point
/// regions lie fully inside the domain and do not overlap. Throws
/// ConfigError when theta is out of (0, 1) or the placement is infeasible.
FailureProfile place_regions(const InputDomain& domain, double theta, const FailurePattern& pattern,
                             RngStream& rng);

bool is_failure(const TestCase& tc, const FailureProfile& profile);

/// Area of {x in box : |n . (x - a)| <= h} for the line through a and b (2-D).
double strip_area_2d(const InputDomain& box, const TestCase& a, const TestCase& b,
                     double half_width);

struct RunRecord {
  std::size_t run_index = 0;
  std::uint64_t f_count = 0;  // tests used; the cap when censored
  bool censored = false;
  std::uint64_t f_time_ns = 0;  // 0 unless timing was requested
};

inline constexpr std::uint64_t kDefaultCap = 10'000'000;

/// Tests until the first failure. The generator is used from its current
/// state; callers reset it between runs.
RunRecord run_f(Generator& generator, const FailureProfile& profile, std::uint64_t cap,
                RngStream& rng, bool record_time = false);
/// Tests until the m-th failure.
RunRecord run_fm(Generator& generator, const FailureProfile& profile, std::uint64_t m,
                 std::uint64_t cap, RngStream& rng, bool record_time = false);
/// Failures among the next n tests.
std::uint64_t count_failures(Generator& generator, const FailureProfile& profile, std::uint64_t n,
                             RngStream& rng);

using GeneratorFactory = std::function<GeneratorPtr()>;

struct ProfileSpec {
  double theta = 0.01;
  FailurePattern pattern;
  // Re-place the regions for every replication (from the replication's own
  // sub-stream); otherwise place once from placement_seed.
  bool replace_per_run = true;
  std::uint64_t placement_seed = 0;
};

// Stream tags of the per-replication sub-streams.
inline constexpr std::uint64_t kGenerationTag = 0;
inline constexpr std::uint64_t kPlacementTag = 1;

/// Profile used by replication `run`.
FailureProfile profile_for_run(const InputDomain& domain, const ProfileSpec& spec,
                               std::uint64_t master_seed, std::size_t run);

struct CampaignSpec {
  std::size_t runs = 1000;
  std::uint64_t cap = kDefaultCap;
  std::uint64_t master_seed = 0;
  std::uint64_t m = 1;  // failures to find per run
  std::size_t jobs = 1;
  bool record_time = false;
};

/// `body(run, worker)` for every run in [0, runs), spread over `jobs`
/// threads. Each worker owns one generator from `factory`; exceptions are
/// rethrown for the lowest failing run.
void for_each_run(std::size_t runs, std::size_t jobs, const GeneratorFactory& factory,
                  const std::function<void(std::size_t, Generator&)>& body);

/// F-measure (or F^m) replications. Replication i uses sub-streams
/// (master_seed, i); results are ordered by run index, so the output does not
/// depend on `jobs`.
std::vector<RunRecord> run_campaign(const GeneratorFactory& factory, const InputDomain& domain,
                                    const ProfileSpec& profile, const CampaignSpec& campaign);

/// Failure counts of S independent size-n test sets.
std::vector<std::uint64_t> failure_counts(const GeneratorFactory& factory,
                                          const InputDomain& domain, const ProfileSpec& profile,
                                          std::uint64_t n, std::size_t runs,
                                          std::uint64_t master_seed, std::size_t jobs = 1);

/// Fraction of S size-n test sets that reveal at least one failure.
double p_measure(const GeneratorFactory& factory, const InputDomain& domain,
                 const ProfileSpec& profile, std::uint64_t n, std::size_t runs,
                 std::uint64_t master_seed, std::size_t jobs = 1);
/// Mean number of failures revealed by a size-n test set.
double e_measure(const GeneratorFactory& factory, const InputDomain& domain,
                 const ProfileSpec& profile, std::uint64_t n, std::size_t runs,
                 std::uint64_t master_seed, std::size_t jobs = 1);

inline constexpr std::string_view kRunsCsvHeader =
    "run_index,generator,pattern,theta,d,f_count,censored,f_time_ns";

void write_runs_csv(std::ostream& out, std::string_view generator, const ProfileSpec& profile,
                    std::size_t dims, std::span<const RunRecord> records, bool header = true);

/// Shortest decimal text that reads back as the same double.
std::string format_double(double value);

}  // namespace artkit::simlab
