#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "artkit/core.hpp"
#include "artkit/stfcs.hpp"

// Cost-reduction hybrids: mirroring, forgetting and divide-and-conquer.
namespace artkit::hybrid {

/// Grid of congruent subdomains; subdomain 0 (lowest corner) is the source
/// and every other subdomain is its translated mirror. Mirrors are numbered
/// with the first dimension varying fastest.
class MirrorScheme {
 public:
  MirrorScheme(InputDomain domain, std::vector<std::size_t> parts_per_dim);

  const InputDomain& domain() const { return domain_; }
  std::size_t size() const { return count_; }
  const std::vector<std::size_t>& parts_per_dim() const { return parts_; }

  InputDomain subdomain(std::size_t index) const;
  const InputDomain& source() const { return source_; }
  // Translate a test from the source subdomain into subdomain `index`.
  TestCase map(const TestCase& source_test, std::size_t index) const;

 private:
  std::vector<std::size_t> grid_index(std::size_t index) const;

  InputDomain domain_;
  std::vector<std::size_t> parts_;
  std::size_t count_;
  InputDomain source_;
};

/// Mirror ART: one test from the inner generator (confined to the source
/// subdomain) per round, followed by its images in every mirror. Only source
/// tests feed the inner generator's state.
class MartGenerator final : public Generator {
 public:
  MartGenerator(MirrorScheme scheme, GeneratorPtr inner);

  TestCase next(RngStream& rng) override;
  void reset() override;
  const InputDomain& domain() const override { return scheme_.domain(); }
  std::string_view name() const override { return "mart"; }

  const MirrorScheme& scheme() const { return scheme_; }

 private:
  MirrorScheme scheme_;
  GeneratorPtr inner_;
  TestCase source_test_;
  std::size_t position_ = 0;
};

enum class ForgettingKind { RecentWindow, RandomSubset };

struct ForgettingPolicy {
  ForgettingKind kind = ForgettingKind::RecentWindow;
  std::size_t lambda = 30;

  void validate() const;
};

std::string_view to_string(ForgettingKind kind);
ForgettingKind forgetting_kind_from_string(std::string_view name);

/// At most lambda executed tests, a subset of `executed` in original order:
/// the most recent lambda, or lambda drawn without replacement.
std::vector<TestCase> forget(std::span<const TestCase> executed, const ForgettingPolicy& policy,
                             RngStream& rng);
/// Indices selected by forget(), ascending.
std::vector<std::size_t> forget_indices(std::size_t n, const ForgettingPolicy& policy,
                                        RngStream& rng);

/// FSCS whose fitness only consults the tests kept by a forgetting policy.
class ForgettingFscsGenerator final : public stfcs::FscsGenerator {
 public:
  ForgettingFscsGenerator(InputDomain domain, stfcs::FscsConfig cfg, ForgettingPolicy policy);

  std::string_view name() const override { return "fscs_forget"; }
  const ForgettingPolicy& policy() const { return policy_; }

 protected:
  std::span<const TestCase> reference_set(RngStream& rng) override;

 private:
  ForgettingPolicy policy_;
  std::vector<TestCase> kept_;
};

/// Independent FSCS instances per bisection cell, dispatched round-robin.
/// When every cell holds `quota` tests, all dimensions are bisected and each
/// child cell inherits the parent tests it contains.
class DivideAndConquerGenerator final : public Generator {
 public:
  DivideAndConquerGenerator(InputDomain domain, stfcs::FscsConfig cfg, std::size_t quota);

  TestCase next(RngStream& rng) override;
  void reset() override;
  const InputDomain& domain() const override { return domain_; }
  std::string_view name() const override { return "dc"; }

  std::size_t cell_count() const { return cells_.size(); }
  const InputDomain& cell(std::size_t i) const { return cells_[i].domain(); }
  // Cell that produced the most recent test.
  std::size_t last_cell() const { return last_cell_; }
  // Candidate-to-test distance evaluations made by the most recent call.
  std::uint64_t last_distance_evaluations() const { return last_evaluations_; }
  std::uint64_t distance_evaluations() const;

 private:
  void split();

  InputDomain domain_;
  stfcs::FscsConfig cfg_;
  std::size_t quota_;
  std::vector<stfcs::FscsGenerator> cells_;
  std::size_t cursor_ = 0;
  std::size_t last_cell_ = 0;
  std::uint64_t last_evaluations_ = 0;
  std::uint64_t retired_evaluations_ = 0;
};

}  // namespace artkit::hybrid
