#include "artkit/tpbs.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "artkit/metrics.hpp"

namespace artkit::tpbs {

void ProfileKind::validate() const {
  if (shape == ProfileShape::PowerLaw && !(exponent > 0.0)) {
    throw ConfigError("power-law profile exponent must be > 0");
  }
}

std::string_view to_string(ProfileShape shape) {
  switch (shape) {
    case ProfileShape::Triangle: return "triangle";
    case ProfileShape::Cosine: return "cosine";
    case ProfileShape::Semicircle: return "semicircle";
    case ProfileShape::PowerLaw: return "power_law";
  }
  return "cosine";
}

ProfileShape profile_shape_from_string(std::string_view name) {
  for (auto s : {ProfileShape::Triangle, ProfileShape::Cosine, ProfileShape::Semicircle,
                 ProfileShape::PowerLaw}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError(fmt::format("unknown test profile '{}'", name));
}

double profile_shape(const ProfileKind& kind, double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  switch (kind.shape) {
    case ProfileShape::Triangle: return u;
    case ProfileShape::Cosine: return 0.5 * (1.0 - std::cos(std::numbers::pi * u));
    case ProfileShape::Semicircle: return std::sqrt(1.0 - (1.0 - u) * (1.0 - u));
    case ProfileShape::PowerLaw: return std::pow(u, kind.exponent);
  }
  return u;
}

double influence_width(const InputDomain& domain, std::size_t n_executed) {
  const double inv_d = 1.0 / static_cast<double>(domain.dims());
  return 0.75 * std::pow(domain.volume(), inv_d) /
         (std::pow(static_cast<double>(n_executed), inv_d) + 1.0);
}

double density(const TestCase& x, std::span<const TestCase> executed, const ProfileKind& kind,
               double width) {
  double p = 1.0;
  const double w2 = width * width;
  for (const auto& e : executed) {
    const double d2 = metrics::dist_squared(x, e);
    if (d2 >= w2) continue;
    p *= profile_shape(kind, std::sqrt(d2) / width);
    if (p == 0.0) break;
  }
  return p;
}

TpbsGenerator::TpbsGenerator(InputDomain domain, ProfileKind kind, std::uint64_t rejection_budget)
    : domain_(std::move(domain)),
      kind_(kind),
      budget_(rejection_budget),
      width_(influence_width(domain_, 0)) {
  kind_.validate();
  if (budget_ < 1) throw ConfigError("rejection budget must be >= 1");
}

void TpbsGenerator::reset() {
  executed_.clear();
  width_ = influence_width(domain_, 0);
}

TestCase TpbsGenerator::next(RngStream& rng) {
  TestCase accepted;
  if (executed_.empty()) {
    accepted = uniform_point(domain_, rng);
  } else {
    bool found = false;
    for (std::uint64_t attempt = 0; attempt < budget_ && !found; ++attempt) {
      TestCase x = uniform_point(domain_, rng);
      if (rng.uniform01() < density(x, executed_, kind_, width_)) {
        accepted = std::move(x);
        found = true;
      }
    }
    if (!found) {
      throw BudgetExceeded(fmt::format("test profile rejected {} consecutive draws", budget_),
                           budget_);
    }
  }
  executed_.push_back(accepted);
  width_ = influence_width(domain_, executed_.size());
  return accepted;
}

}  // namespace artkit::tpbs
