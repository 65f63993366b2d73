#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "artkit/core.hpp"

// Distances and test-set distribution metrics.
namespace artkit::metrics {

inline constexpr std::size_t kDefaultSubdomainCount = 1000;

/// Returned by edge_center_ratio when no test falls in the center region.
inline constexpr double kEmptyCenter = std::numeric_limits<double>::infinity();

/// Euclidean distance. Throws ConfigError on dimension mismatch.
double dist(const TestCase& a, const TestCase& b);
double dist_squared(const TestCase& a, const TestCase& b);

/// m random axis-aligned boxes inside a domain, kept with the seed used to
/// draw them so a discrepancy value can be reproduced.
struct SubdomainSample {
  std::vector<InputDomain> boxes;
  std::uint64_t seed = 0;

  // Each box spans two independent uniform corners, ordered per dimension.
  static SubdomainSample draw(const InputDomain& domain, std::size_t m, RngStream& rng);
};

/// max_i | |T ∩ D_i| / |T| - |D_i| / |D| | over the sampled subdomains.
double discrepancy(std::span<const TestCase> tests, const InputDomain& domain,
                   const SubdomainSample& sample);
double discrepancy(std::span<const TestCase> tests, const InputDomain& domain, std::size_t m,
                   RngStream& rng);

// Distance from each test to its nearest other test. Requires |T| >= 2.
std::vector<double> nearest_neighbor_distances(std::span<const TestCase> tests);

/// Largest nearest-neighbor distance. Requires |T| >= 2.
double dispersion(std::span<const TestCase> tests);
/// Sum of nearest-neighbor distances. Requires |T| >= 2.
double diversity(std::span<const TestCase> tests);
/// Sum of distances over all ordered pairs (self pairs included, contributing 0).
double divergence(std::span<const TestCase> tests);

/// Concentric center region with exactly half the domain volume.
InputDomain center_region(const InputDomain& domain);

/// |T_edge| / |T_center|, where center is center_region(domain). Returns
/// kEmptyCenter when no test lies in the center.
double edge_center_ratio(std::span<const TestCase> tests, const InputDomain& domain);

/// Max-norm distance from tc to the domain center.
double center_distance(const TestCase& tc, const InputDomain& domain);

}  // namespace artkit::metrics
