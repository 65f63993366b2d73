#include "artkit/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "artkit/core.hpp"

namespace artkit::simlab {

Summary summarize(std::span<const double> values, double z, double level) {
  if (values.empty()) throw ConfigError("cannot summarize an empty sample");
  Summary s;
  s.count = values.size();
  s.ci_level = level;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.count - 1));
  }
  const double half = z * s.sd / std::sqrt(static_cast<double>(s.count));
  s.ci_low = s.mean - half;
  s.ci_high = s.mean + half;
  return s;
}

std::uint64_t required_runs(double z, double sigma, double mu, double r) {
  if (!(r > 0.0)) throw ConfigError("relative accuracy r must be > 0");
  if (!(mu > 0.0)) throw ConfigError("required runs needs a positive mean");
  if (!(z > 0.0)) throw ConfigError("normal variate z must be > 0");
  if (!(sigma >= 0.0)) throw ConfigError("sigma must be non-negative");
  const double x = std::pow(100.0 * z * sigma / (r * mu), 2.0);
  // Absorb rounding noise so exact integers are not bumped up.
  const double runs = std::ceil(x - 1e-9 * x);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(runs));
}

std::vector<double> midranks(std::span<const double> pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

namespace {

struct PairCounts {
  std::uint64_t greater = 0;
  std::uint64_t equal = 0;
};

PairCounts count_pairs(std::span<const double> a, std::span<const double> b) {
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sb.begin(), sb.end());
  PairCounts c;
  for (double x : a) {
    const auto lo = std::lower_bound(sb.begin(), sb.end(), x);
    const auto hi = std::upper_bound(lo, sb.end(), x);
    c.greater += static_cast<std::uint64_t>(lo - sb.begin());
    c.equal += static_cast<std::uint64_t>(hi - lo);
  }
  return c;
}

void require_samples(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ConfigError("both samples must be non-empty");
  for (double v : a) {
    if (std::isnan(v)) throw ConfigError("samples must not contain NaN");
  }
  for (double v : b) {
    if (std::isnan(v)) throw ConfigError("samples must not contain NaN");
  }
}

// Two-sided exact p-value. Enumerates the rank-sum distribution of the
// smaller sample over doubled midranks, which are integers.
double exact_p(std::span<const double> a, std::span<const double> b, double u) {
  const bool swap = a.size() > b.size();
  const std::size_t k = swap ? b.size() : a.size();
  const std::size_t n = a.size() + b.size();
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = midranks(pooled);
  std::vector<std::size_t> doubled(n);
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    doubled[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
    total += doubled[i];
  }
  // ways[j][s]: subsets of size j with doubled rank sum s.
  std::vector<std::vector<double>> ways(k + 1, std::vector<double>(total + 1, 0.0));
  ways[0][0] = 1.0;
  std::size_t reach = 0;
  for (std::size_t i = 0; i < n; ++i) {
    reach += doubled[i];
    for (std::size_t j = std::min(k, i + 1); j >= 1; --j) {
      auto& dst = ways[j];
      const auto& src = ways[j - 1];
      for (std::size_t s = reach; s >= doubled[i]; --s) {
        dst[s] += src[s - doubled[i]];
        if (s == doubled[i]) break;
      }
    }
  }
  // Doubled U of the smaller sample for rank sum s: s - k(k+1).
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double u_small = swap ? na * nb - u : u;
  const double centre = 0.5 * na * nb;
  const double observed = std::abs(u_small - centre);
  const double offset = static_cast<double>(k * (k + 1));
  double hit = 0.0;
  double all = 0.0;
  for (std::size_t s = 0; s <= total; ++s) {
    const double w = ways[k][s];
    if (w == 0.0) continue;
    all += w;
    const double us = 0.5 * (static_cast<double>(s) - offset);
    if (std::abs(us - centre) >= observed - 1e-9) hit += w;
  }
  return std::min(1.0, hit / all);
}

double normal_p(std::span<const double> a, std::span<const double> b, double u) {
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double n = na + nb;
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::sort(pooled.begin(), pooled.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < pooled.size();) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j] == pooled[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double var = na * nb / 12.0 * ((n + 1.0) - (n > 1.0 ? tie_term / (n * (n - 1.0)) : 0.0));
  if (var <= 0.0) return 1.0;
  const double z = std::max(0.0, std::abs(u - 0.5 * na * nb) - 0.5) / std::sqrt(var);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

}  // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                 MannWhitneyMode mode) {
  require_samples(a, b);
  const auto c = count_pairs(a, b);
  MannWhitneyResult r;
  r.u = static_cast<double>(c.greater) + 0.5 * static_cast<double>(c.equal);
  r.exact = mode == MannWhitneyMode::Exact ||
            (mode == MannWhitneyMode::Auto && a.size() * b.size() <= kExactMannWhitneyLimit);
  r.p_two_sided = r.exact ? exact_p(a, b, r.u) : normal_p(a, b, r.u);
  return r;
}

double a12_effect_size(std::span<const double> a, std::span<const double> b) {
  require_samples(a, b);
  const auto c = count_pairs(a, b);
  return static_cast<double>(2 * c.greater + c.equal) /
         (2.0 * static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

double improvement_percent(double metric_rt, double metric_art, bool lower_is_better) {
  if (metric_rt == 0.0) throw ConfigError("improvement is undefined for a zero baseline");
  const double delta = lower_is_better ? metric_rt - metric_art : metric_art - metric_rt;
  return 100.0 * delta / metric_rt;
}

double ks_statistic_geometric(std::span<const double> samples, double theta) {
  if (samples.empty()) throw ConfigError("KS statistic needs a non-empty sample");
  if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("theta must lie in (0, 1)");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  auto cdf = [&](double k) { return k < 1.0 ? 0.0 : -std::expm1(std::floor(k) * std::log1p(-theta)); };
  double d = 0.0;
  double prev = 0.0;  // empirical CDF below the current value
  for (std::size_t i = 0; i < x.size();) {
    std::size_t j = i;
    while (j < x.size() && x[j] == x[i]) ++j;
    const double here = static_cast<double>(j) / n;
    // Just below x[i] the empirical CDF is `prev`; the model CDF is largest
    // at the last integer before x[i].
    d = std::max(d, std::abs(cdf(std::ceil(x[i]) - 1.0) - prev));
    d = std::max(d, std::abs(cdf(x[i]) - here));
    prev = here;
    i = j;
  }
  return d;
}

double kolmogorov_p_value(double d, std::size_t n) {
  if (n == 0) throw ConfigError("KS p-value needs n >= 1");
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace artkit::simlab
