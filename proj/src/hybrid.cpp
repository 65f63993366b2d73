#include "artkit/hybrid.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

namespace artkit::hybrid {

namespace {

InputDomain grid_cell(const InputDomain& domain, const std::vector<std::size_t>& parts,
                      const std::vector<std::size_t>& index) {
  std::vector<Interval> bounds(domain.dims());
  for (std::size_t j = 0; j < domain.dims(); ++j) {
    const auto& b = domain[j];
    const auto p = static_cast<double>(parts[j]);
    bounds[j].lo = index[j] == 0 ? b.lo : b.lo + b.width() * static_cast<double>(index[j]) / p;
    bounds[j].hi =
        index[j] + 1 == parts[j] ? b.hi : b.lo + b.width() * static_cast<double>(index[j] + 1) / p;
  }
  return InputDomain(std::move(bounds));
}

std::vector<std::size_t> validated_parts(const InputDomain& domain,
                                         std::vector<std::size_t> parts) {
  if (parts.size() != domain.dims()) {
    throw ConfigError("mirror grid needs one part count per dimension");
  }
  std::size_t count = 1;
  for (auto p : parts) {
    if (p < 1) throw ConfigError("mirror grid part counts must be >= 1");
    count *= p;
  }
  if (count < 2) throw ConfigError("mirroring needs at least two subdomains");
  return parts;
}

}  // namespace

MirrorScheme::MirrorScheme(InputDomain domain, std::vector<std::size_t> parts_per_dim)
    : domain_(std::move(domain)),
      parts_(validated_parts(domain_, std::move(parts_per_dim))),
      count_(1),
      source_(grid_cell(domain_, parts_, std::vector<std::size_t>(domain_.dims(), 0))) {
  for (auto p : parts_) count_ *= p;
}

std::vector<std::size_t> MirrorScheme::grid_index(std::size_t index) const {
  if (index >= count_) throw ConfigError(fmt::format("mirror index {} out of range", index));
  std::vector<std::size_t> out(parts_.size());
  for (std::size_t j = 0; j < parts_.size(); ++j) {
    out[j] = index % parts_[j];
    index /= parts_[j];
  }
  return out;
}

InputDomain MirrorScheme::subdomain(std::size_t index) const {
  return grid_cell(domain_, parts_, grid_index(index));
}

TestCase MirrorScheme::map(const TestCase& source_test, std::size_t index) const {
  const InputDomain target = subdomain(index);
  TestCase out = source_test;
  for (std::size_t j = 0; j < out.dims(); ++j) {
    out[j] = clamp_half_open(source_test[j] - source_[j].lo + target[j].lo, target[j]);
  }
  return out;
}

MartGenerator::MartGenerator(MirrorScheme scheme, GeneratorPtr inner)
    : scheme_(std::move(scheme)), inner_(std::move(inner)) {
  if (!inner_) throw ConfigError("mirroring needs an inner generator");
  if (!(inner_->domain() == scheme_.source())) {
    throw ConfigError("the inner generator must be confined to the source subdomain");
  }
}

void MartGenerator::reset() {
  inner_->reset();
  position_ = 0;
}

TestCase MartGenerator::next(RngStream& rng) {
  if (position_ == 0) source_test_ = inner_->next(rng);
  TestCase out = position_ == 0 ? source_test_ : scheme_.map(source_test_, position_);
  position_ = (position_ + 1) % scheme_.size();
  return out;
}

void ForgettingPolicy::validate() const {
  if (lambda < 1) throw ConfigError("forgetting window lambda must be >= 1");
}

std::string_view to_string(ForgettingKind kind) {
  return kind == ForgettingKind::RecentWindow ? "recent" : "random";
}

ForgettingKind forgetting_kind_from_string(std::string_view name) {
  if (name == "recent") return ForgettingKind::RecentWindow;
  if (name == "random") return ForgettingKind::RandomSubset;
  throw ConfigError(fmt::format("unknown forgetting policy '{}'", name));
}

std::vector<std::size_t> forget_indices(std::size_t n, const ForgettingPolicy& policy,
                                        RngStream& rng) {
  policy.validate();
  std::vector<std::size_t> out;
  if (n <= policy.lambda) {
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = i;
    return out;
  }
  if (policy.kind == ForgettingKind::RecentWindow) {
    for (std::size_t i = n - policy.lambda; i < n; ++i) out.push_back(i);
    return out;
  }
  // Floyd's sampling: lambda distinct indices in O(lambda) draws.
  std::set<std::size_t> chosen;
  for (std::size_t j = n - policy.lambda; j < n; ++j) {
    const std::size_t t = rng.uniform_index(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return {chosen.begin(), chosen.end()};
}

std::vector<TestCase> forget(std::span<const TestCase> executed, const ForgettingPolicy& policy,
                             RngStream& rng) {
  std::vector<TestCase> out;
  for (auto i : forget_indices(executed.size(), policy, rng)) out.push_back(executed[i]);
  return out;
}

ForgettingFscsGenerator::ForgettingFscsGenerator(InputDomain domain, stfcs::FscsConfig cfg,
                                                 ForgettingPolicy policy)
    : stfcs::FscsGenerator(std::move(domain), cfg), policy_(policy) {
  policy_.validate();
}

std::span<const TestCase> ForgettingFscsGenerator::reference_set(RngStream& rng) {
  const auto& all = executed();
  if (policy_.kind == ForgettingKind::RecentWindow) {
    const std::size_t keep = std::min(policy_.lambda, all.size());
    return std::span<const TestCase>(all).last(keep);
  }
  kept_ = forget(all, policy_, rng);
  return kept_;
}

DivideAndConquerGenerator::DivideAndConquerGenerator(InputDomain domain, stfcs::FscsConfig cfg,
                                                     std::size_t quota)
    : domain_(std::move(domain)), cfg_(cfg), quota_(quota) {
  if (quota_ < 1) throw ConfigError("divide-and-conquer quota must be >= 1");
  reset();
}

void DivideAndConquerGenerator::reset() {
  cells_.clear();
  cells_.emplace_back(domain_, cfg_);
  cursor_ = 0;
  last_cell_ = 0;
  last_evaluations_ = 0;
  retired_evaluations_ = 0;
}

std::uint64_t DivideAndConquerGenerator::distance_evaluations() const {
  std::uint64_t total = retired_evaluations_;
  for (const auto& c : cells_) total += c.distance_evaluations();
  return total;
}

void DivideAndConquerGenerator::split() {
  const std::size_t d = domain_.dims();
  std::vector<stfcs::FscsGenerator> children;
  children.reserve(cells_.size() << d);
  for (const auto& parent : cells_) {
    retired_evaluations_ += parent.distance_evaluations();
    const InputDomain& box = parent.domain();
    for (std::size_t corner = 0; corner < (std::size_t{1} << d); ++corner) {
      std::vector<Interval> bounds(d);
      for (std::size_t j = 0; j < d; ++j) {
        const double mid = 0.5 * (box[j].lo + box[j].hi);
        bounds[j] = (corner >> j) & 1u ? Interval{mid, box[j].hi} : Interval{box[j].lo, mid};
      }
      stfcs::FscsGenerator child(InputDomain(std::move(bounds)), cfg_);
      for (const auto& tc : parent.executed()) {
        if (child.domain().contains(tc)) child.add_executed(tc);
      }
      children.push_back(std::move(child));
    }
  }
  cells_ = std::move(children);
  cursor_ = 0;
}

TestCase DivideAndConquerGenerator::next(RngStream& rng) {
  const bool full = std::all_of(cells_.begin(), cells_.end(), [&](const auto& c) {
    return c.executed().size() >= quota_;
  });
  if (full) split();
  // Dispatch to the next cell that has not reached its quota.
  std::size_t chosen = cursor_;
  for (std::size_t step = 0; step < cells_.size(); ++step) {
    chosen = (cursor_ + step) % cells_.size();
    if (cells_[chosen].executed().size() < quota_) break;
  }
  cursor_ = (chosen + 1) % cells_.size();
  auto& cell = cells_[chosen];
  const std::uint64_t before = cell.distance_evaluations();
  TestCase tc = cell.next(rng);
  last_evaluations_ = cell.distance_evaluations() - before;
  last_cell_ = chosen;
  return tc;
}

}  // namespace artkit::hybrid
