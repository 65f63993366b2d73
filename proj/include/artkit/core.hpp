#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace artkit {

// Raised for invalid arguments and configurations.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a bounded retry loop gives up. `attempts` is the number of
// draws made before giving up.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, std::uint64_t attempts)
      : std::runtime_error(what), attempts_(attempts) {}
  std::uint64_t attempts() const { return attempts_; }

 private:
  std::uint64_t attempts_;
};

inline constexpr std::uint64_t kDefaultRetryBudget = 1'000'000;

/// A point in a d-dimensional numeric input domain.
class TestCase {
 public:
  TestCase() = default;
  explicit TestCase(std::vector<double> coords) : coords_(std::move(coords)) {}
  TestCase(std::initializer_list<double> coords) : coords_(coords) {}

  std::size_t dims() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }
  std::vector<double>& mutable_coords() { return coords_; }

  auto begin() const { return coords_.begin(); }
  auto end() const { return coords_.end(); }

  friend bool operator==(const TestCase&, const TestCase&) = default;

 private:
  std::vector<double> coords_;
};

using ExecutedSet = std::vector<TestCase>;
using CandidateSet = std::vector<TestCase>;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double width() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Axis-aligned hyperrectangle with half-open bounds [lo, hi) per dimension.
/// Used both for the whole input domain and for subdomains/cells inside it.
class InputDomain {
 public:
  explicit InputDomain(std::vector<Interval> bounds);

  static InputDomain unit(std::size_t dims);

  std::size_t dims() const { return bounds_.size(); }
  const Interval& operator[](std::size_t i) const { return bounds_[i]; }
  std::span<const Interval> bounds() const { return bounds_; }

  double volume() const;
  double diameter() const;
  TestCase center() const;
  bool contains(const TestCase& tc) const;

  // Concentric box scaled by `factor` along every side.
  InputDomain scaled_about_center(double factor) const;

  friend bool operator==(const InputDomain&, const InputDomain&) = default;

 private:
  std::vector<Interval> bounds_;
};

using Subdomain = InputDomain;

/// Counter-based deterministic random stream. Output i is a pure function of
/// (key, i), so streams are reproducible across runs and platforms and can be
/// split into independent sub-streams keyed by (master seed, index).
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0);

  // Sub-stream for replication `index`; `tag` separates several streams
  // belonging to the same replication.
  static RngStream derive(std::uint64_t master_seed, std::uint64_t index,
                          std::uint64_t tag = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();
  result_type operator()() { return next_u64(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  // Uniform on [lo, hi); never returns hi.
  double uniform(double lo, double hi);
  // Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);
  // Exponential with rate 1.
  double exponential();

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z);

/// Common interface of every test-case generation strategy. Implementations
/// own their mutable state (executed set, partitions, sequence index, ...).
class Generator {
 public:
  virtual ~Generator() = default;

  virtual TestCase next(RngStream& rng) = 0;
  virtual void reset() = 0;
  virtual const InputDomain& domain() const = 0;
  virtual std::string_view name() const = 0;
};

using GeneratorPtr = std::unique_ptr<Generator>;

TestCase uniform_point(const InputDomain& domain, RngStream& rng);

// True iff every coordinate of `candidate` differs from the matching
// coordinate of every executed test by more than `epsilon`.
bool eligibility_filter(const TestCase& candidate, std::span<const TestCase> executed,
                        double epsilon = 0.0);

// Clamp `value` into [lo, hi).
double clamp_half_open(double value, const Interval& bounds);
TestCase clamp_to(const InputDomain& domain, TestCase tc);

/// Pure random testing.
class RandomGenerator final : public Generator {
 public:
  explicit RandomGenerator(InputDomain domain) : domain_(std::move(domain)) {}

  TestCase next(RngStream& rng) override { return uniform_point(domain_, rng); }
  void reset() override {}
  const InputDomain& domain() const override { return domain_; }
  std::string_view name() const override { return "rt"; }

 private:
  InputDomain domain_;
};

GeneratorPtr rt_generator(const InputDomain& domain);

}  // namespace artkit
