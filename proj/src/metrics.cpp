#include "artkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace artkit::metrics {

double dist_squared(const TestCase& a, const TestCase& b) {
  if (a.dims() != b.dims()) {
    throw ConfigError(fmt::format("distance between {}-D and {}-D test cases", a.dims(), b.dims()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.dims(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double dist(const TestCase& a, const TestCase& b) { return std::sqrt(dist_squared(a, b)); }

SubdomainSample SubdomainSample::draw(const InputDomain& domain, std::size_t m, RngStream& rng) {
  if (m == 0) throw ConfigError("discrepancy needs at least one subdomain");
  SubdomainSample out;
  out.seed = rng.seed();
  out.boxes.reserve(m);
  const std::size_t d = domain.dims();
  std::vector<Interval> bounds(d);
  while (out.boxes.size() < m) {
    bool degenerate = false;
    for (std::size_t i = 0; i < d; ++i) {
      const double a = rng.uniform(domain[i].lo, domain[i].hi);
      const double b = rng.uniform(domain[i].lo, domain[i].hi);
      bounds[i] = Interval{std::min(a, b), std::max(a, b)};
      degenerate = degenerate || !(bounds[i].hi > bounds[i].lo);
    }
    if (!degenerate) out.boxes.emplace_back(bounds);
  }
  return out;
}

double discrepancy(std::span<const TestCase> tests, const InputDomain& domain,
                   const SubdomainSample& sample) {
  if (tests.empty()) throw ConfigError("discrepancy of an empty test set is undefined");
  const double n = static_cast<double>(tests.size());
  const double total = domain.volume();
  double worst = 0.0;
  for (const auto& box : sample.boxes) {
    std::size_t inside = 0;
    for (const auto& t : tests) inside += box.contains(t) ? 1 : 0;
    worst = std::max(worst, std::abs(static_cast<double>(inside) / n - box.volume() / total));
  }
  return worst;
}

double discrepancy(std::span<const TestCase> tests, const InputDomain& domain, std::size_t m,
                   RngStream& rng) {
  return discrepancy(tests, domain, SubdomainSample::draw(domain, m, rng));
}

std::vector<double> nearest_neighbor_distances(std::span<const TestCase> tests) {
  const std::size_t n = tests.size();
  if (n < 2) throw ConfigError("nearest-neighbor distance needs at least two test cases");
  // Sweep over points sorted by their first coordinate; a neighbor further
  // away along that axis than the current best cannot be closer.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return tests[a][0] < tests[b][0]; });
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < n; ++r) {
    const TestCase& p = tests[order[r]];
    double b2 = std::numeric_limits<double>::infinity();
    for (std::size_t s = r + 1; s < n; ++s) {
      const double dx = tests[order[s]][0] - p[0];
      if (dx * dx >= b2) break;
      b2 = std::min(b2, dist_squared(p, tests[order[s]]));
    }
    for (std::size_t s = r; s-- > 0;) {
      const double dx = p[0] - tests[order[s]][0];
      if (dx * dx >= b2) break;
      b2 = std::min(b2, dist_squared(p, tests[order[s]]));
    }
    best[order[r]] = std::sqrt(b2);
  }
  return best;
}

double dispersion(std::span<const TestCase> tests) {
  const auto nn = nearest_neighbor_distances(tests);
  return *std::max_element(nn.begin(), nn.end());
}

double diversity(std::span<const TestCase> tests) {
  const auto nn = nearest_neighbor_distances(tests);
  return std::accumulate(nn.begin(), nn.end(), 0.0);
}

double divergence(std::span<const TestCase> tests) {
  double s = 0.0;
  for (std::size_t i = 0; i < tests.size(); ++i) {
    for (std::size_t j = i + 1; j < tests.size(); ++j) s += dist(tests[i], tests[j]);
  }
  return 2.0 * s;
}

InputDomain center_region(const InputDomain& domain) {
  return domain.scaled_about_center(std::pow(2.0, -1.0 / static_cast<double>(domain.dims())));
}

double edge_center_ratio(std::span<const TestCase> tests, const InputDomain& domain) {
  const InputDomain center = center_region(domain);
  std::size_t in_center = 0;
  for (const auto& t : tests) in_center += center.contains(t) ? 1 : 0;
  if (in_center == 0) return kEmptyCenter;
  return static_cast<double>(tests.size() - in_center) / static_cast<double>(in_center);
}

double center_distance(const TestCase& tc, const InputDomain& domain) {
  if (tc.dims() != domain.dims()) throw ConfigError("test case and domain dimensions differ");
  double m = 0.0;
  for (std::size_t i = 0; i < tc.dims(); ++i) {
    m = std::max(m, std::abs(0.5 * (domain[i].lo + domain[i].hi) - tc[i]));
  }
  return m;
}

}  // namespace artkit::metrics
