#pragma once

#include <span>
#include <string_view>

#include "artkit/core.hpp"

// Test-profile-based strategy: sample from a selection density that vanishes
// at executed tests and recovers to 1 within an influence width.
namespace artkit::tpbs {

enum class ProfileShape { Triangle, Cosine, Semicircle, PowerLaw };

struct ProfileKind {
  ProfileShape shape = ProfileShape::Cosine;
  double exponent = 2.0;  // PowerLaw only

  void validate() const;
};

std::string_view to_string(ProfileShape shape);
ProfileShape profile_shape_from_string(std::string_view name);

/// Ramp g on [0, 1] with g(0) = 0, g(1) = 1, and g(u) = 1 for u >= 1.
double profile_shape(const ProfileKind& kind, double u);

/// Influence width for |E| executed tests: 0.75 * |D|^(1/d) / (|E|^(1/d) + 1).
double influence_width(const InputDomain& domain, std::size_t n_executed);

/// Product over executed tests of g(dist(x, e) / width); 1 for an empty set.
double density(const TestCase& x, std::span<const TestCase> executed, const ProfileKind& kind,
               double width);

class TpbsGenerator final : public Generator {
 public:
  TpbsGenerator(InputDomain domain, ProfileKind kind,
                std::uint64_t rejection_budget = kDefaultRetryBudget);

  TestCase next(RngStream& rng) override;
  void reset() override;
  const InputDomain& domain() const override { return domain_; }
  std::string_view name() const override { return "tpbs"; }

  const ExecutedSet& executed() const { return executed_; }
  double width() const { return width_; }
  double density_at(const TestCase& x) const { return density(x, executed_, kind_, width_); }

 private:
  InputDomain domain_;
  ProfileKind kind_;
  std::uint64_t budget_;
  ExecutedSet executed_;
  double width_;
};

}  // namespace artkit::tpbs
