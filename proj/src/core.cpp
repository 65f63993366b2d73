#include "artkit/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace artkit {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

}  // namespace

InputDomain::InputDomain(std::vector<Interval> bounds) : bounds_(std::move(bounds)) {
  if (bounds_.empty()) throw ConfigError("input domain needs at least one dimension");
  for (std::size_t i = 0; i < bounds_.size(); ++i) {
    const auto& b = bounds_[i];
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.hi > b.lo)) {
      throw ConfigError(fmt::format("dimension {}: bounds [{}, {}) are empty or not finite",
                                    i, b.lo, b.hi));
    }
  }
}

InputDomain InputDomain::unit(std::size_t dims) {
  if (dims == 0) throw ConfigError("input domain needs at least one dimension");
  return InputDomain(std::vector<Interval>(dims, Interval{0.0, 1.0}));
}

double InputDomain::volume() const {
  double v = 1.0;
  for (const auto& b : bounds_) v *= b.width();
  return v;
}

double InputDomain::diameter() const {
  double s = 0.0;
  for (const auto& b : bounds_) s += b.width() * b.width();
  return std::sqrt(s);
}

TestCase InputDomain::center() const {
  std::vector<double> c(bounds_.size());
  for (std::size_t i = 0; i < bounds_.size(); ++i) c[i] = 0.5 * (bounds_[i].lo + bounds_[i].hi);
  return TestCase(std::move(c));
}

bool InputDomain::contains(const TestCase& tc) const {
  if (tc.dims() != bounds_.size()) return false;
  for (std::size_t i = 0; i < bounds_.size(); ++i) {
    if (!(tc[i] >= bounds_[i].lo && tc[i] < bounds_[i].hi)) return false;
  }
  return true;
}

InputDomain InputDomain::scaled_about_center(double factor) const {
  std::vector<Interval> out(bounds_.size());
  for (std::size_t i = 0; i < bounds_.size(); ++i) {
    const double mid = 0.5 * (bounds_[i].lo + bounds_[i].hi);
    const double half = 0.5 * bounds_[i].width() * factor;
    out[i] = Interval{mid - half, mid + half};
  }
  return InputDomain(std::move(out));
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed) : seed_(seed), key_(mix64(seed + kGamma)) {}

RngStream RngStream::derive(std::uint64_t master_seed, std::uint64_t index, std::uint64_t tag) {
  const std::uint64_t sub = mix64(mix64(index + 0x632BE59BD9B4E019ULL) ^ (tag * kGamma + 1));
  return RngStream(master_seed ^ sub);
}

std::uint64_t RngStream::next_u64() {
  // SplitMix64 evaluated at position `counter_` of the stream keyed by key_.
  return mix64(key_ + (++counter_) * kGamma);
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  const double x = lo + uniform01() * (hi - lo);
  return x < hi ? x : std::nextafter(hi, lo);
}

std::size_t RngStream::uniform_index(std::size_t n) {
  if (n == 0) throw ConfigError("uniform_index requires n > 0");
  // Lemire's nearly-divisionless bounded integer.
  const auto range = static_cast<std::uint64_t>(n);
  auto m = static_cast<unsigned __int128>(next_u64()) * range;
  auto low = static_cast<std::uint64_t>(m);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * range;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::size_t>(m >> 64);
}

double RngStream::exponential() {
  return -std::log1p(-uniform01());
}

TestCase uniform_point(const InputDomain& domain, RngStream& rng) {
  std::vector<double> c(domain.dims());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = rng.uniform(domain[i].lo, domain[i].hi);
  return TestCase(std::move(c));
}

bool eligibility_filter(const TestCase& candidate, std::span<const TestCase> executed,
                        double epsilon) {
  for (const auto& e : executed) {
    for (std::size_t i = 0; i < candidate.dims(); ++i) {
      if (!(std::abs(candidate[i] - e[i]) > epsilon)) return false;
    }
  }
  return true;
}

double clamp_half_open(double value, const Interval& bounds) {
  if (value < bounds.lo) return bounds.lo;
  if (value >= bounds.hi) return std::nextafter(bounds.hi, bounds.lo);
  return value;
}

TestCase clamp_to(const InputDomain& domain, TestCase tc) {
  for (std::size_t i = 0; i < tc.dims(); ++i) tc[i] = clamp_half_open(tc[i], domain[i]);
  return tc;
}

GeneratorPtr rt_generator(const InputDomain& domain) {
  return std::make_unique<RandomGenerator>(domain);
}

}  // namespace artkit
