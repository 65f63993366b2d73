#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

// Campaign statistics: summaries, run-count planning and significance tests.
namespace artkit::simlab {

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation
  double ci_low = 0.0;
  double ci_high = 0.0;
  double ci_level = 0.95;
};

/// Mean, sample standard deviation and a normal-approximation confidence
/// interval with normal variate z.
Summary summarize(std::span<const double> values, double z = 1.96, double level = 0.95);

/// Replications needed to estimate a mean within +-r percent:
/// ceil((100 z sigma / (r mu))^2), at least 1.
std::uint64_t required_runs(double z, double sigma, double mu, double r);

enum class MannWhitneyMode { Auto, Exact, Normal };

struct MannWhitneyResult {
  double u = 0.0;            // U of sample A: #(a > b) + 0.5 #(a = b)
  double p_two_sided = 1.0;
  bool exact = false;
};

/// Exact permutation distribution (ties handled through midranks) when
/// Auto and |A|*|B| <= 400, normal approximation with tie and continuity
/// correction otherwise.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                 MannWhitneyMode mode = MannWhitneyMode::Auto);

inline constexpr std::size_t kExactMannWhitneyLimit = 400;

/// Vargha-Delaney A12 = P(a > b) + 0.5 P(a = b).
double a12_effect_size(std::span<const double> a, std::span<const double> b);

/// Percentage improvement of `art` over `rt`.
double improvement_percent(double metric_rt, double metric_art, bool lower_is_better);

/// Kolmogorov-Smirnov distance between the sample of F-counts and the
/// Geometric(theta) CDF on {1, 2, ...}.
double ks_statistic_geometric(std::span<const double> samples, double theta);

/// Asymptotic Kolmogorov p-value for statistic d with n samples.
double kolmogorov_p_value(double d, std::size_t n);

/// Midranks (1-based) of the pooled sample.
std::vector<double> midranks(std::span<const double> pooled);

}  // namespace artkit::simlab
