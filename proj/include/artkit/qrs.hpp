#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "artkit/core.hpp"

// Quasi-random strategy: low-discrepancy sequences randomised into tests.
namespace artkit::qrs {

/// Radical inverse of i in base b.
double van_der_corput(std::uint64_t i, std::uint32_t base);

bool is_prime(std::uint32_t n);
std::vector<std::uint32_t> first_primes(std::size_t count);

/// Throws ConfigError unless every base is prime and the bases are pairwise
/// distinct (hence coprime).
void validate_halton_bases(std::span<const std::uint32_t> bases);

TestCase halton(std::uint64_t i, std::span<const std::uint32_t> bases);

/// Primitive polynomial and initial direction integers for one dimension.
struct DirectionEntry {
  std::uint32_t dim = 1;
  std::uint32_t degree = 0;
  std::uint32_t coefficients = 0;
  std::vector<std::uint32_t> initial;

  friend bool operator==(const DirectionEntry&, const DirectionEntry&) = default;
};

/// Sobol direction-number table. The built-in table covers 16 dimensions and
/// matches data/sobol_directions_v1.txt.
class DirectionTable {
 public:
  static constexpr int kBits = 32;

  explicit DirectionTable(std::vector<DirectionEntry> entries);

  static const DirectionTable& builtin();
  // Parse the documented text format. Throws ConfigError with a line number.
  static DirectionTable parse(std::istream& in);
  static DirectionTable load(const std::string& path);

  std::size_t capacity() const { return entries_.size(); }
  const std::vector<DirectionEntry>& entries() const { return entries_; }
  // Direction integers v_1..v_32 of dimension `dim` (0-based), scaled by 2^32.
  const std::array<std::uint32_t, kBits>& directions(std::size_t dim) const {
    return directions_[dim];
  }

 private:
  std::vector<DirectionEntry> entries_;
  std::vector<std::array<std::uint32_t, kBits>> directions_;
};

/// i-th Sobol point (i >= 0, point 0 is the origin), XOR of the direction
/// numbers selected by the binary digits of i.
TestCase sobol(std::uint64_t i, const DirectionTable& table, std::size_t dims);

/// Coordinate-wise addition of `shift` modulo 1.
TestCase cranley_patterson(const TestCase& point, std::span<const double> shift);

/// Offset on [-amplitude, amplitude] with density proportional to
/// cos(pi x / (2 amplitude)).
double cosine_offset(double amplitude, RngStream& rng);

enum class RandomizerKind { None, CranleyPatterson, ShakeAndRotate };

struct Randomizer {
  RandomizerKind kind = RandomizerKind::None;
  // Rotation vector; drawn uniformly once per run when empty.
  std::vector<double> rotation;
  // ShakeAndRotate only; when unset: 0.5 / n^(1/d) if planned_n is set,
  // otherwise 1e-3.
  std::optional<double> amplitude;
  std::optional<std::size_t> planned_n;

  double amplitude_for(std::size_t dims) const;
  void validate(std::size_t dims) const;
};

/// Shake each coordinate by a cosine-distributed offset, then rotate by the
/// randomizer's rotation vector, modulo 1.
TestCase shake_and_rotate(const TestCase& point, const Randomizer& randomizer, RngStream& rng);

enum class SequenceKind { VanDerCorput, Halton, Sobol };

struct SequenceSpec {
  SequenceKind kind = SequenceKind::Halton;
  std::uint32_t base = 2;               // VanDerCorput
  std::vector<std::uint32_t> bases;     // Halton; first d primes when empty
  const DirectionTable* table = nullptr;  // Sobol; builtin when null
};

std::string_view to_string(SequenceKind kind);
std::string_view to_string(RandomizerKind kind);
SequenceKind sequence_kind_from_string(std::string_view name);
RandomizerKind randomizer_kind_from_string(std::string_view name);

class QrsGenerator final : public Generator {
 public:
  QrsGenerator(InputDomain domain, SequenceSpec sequence, Randomizer randomizer);

  TestCase next(RngStream& rng) override;
  void reset() override;
  const InputDomain& domain() const override { return domain_; }
  std::string_view name() const override { return to_string(sequence_.kind); }

  // Number of sequence elements produced since the last reset.
  std::uint64_t sequence_steps() const { return steps_; }
  const Randomizer& randomizer() const { return active_; }

 private:
  TestCase raw(std::uint64_t i) const;

  InputDomain domain_;
  SequenceSpec sequence_;
  Randomizer randomizer_;
  Randomizer active_;
  std::uint64_t index_ = 0;
  std::uint64_t steps_ = 0;
};

}  // namespace artkit::qrs
