#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "artkit/core.hpp"
#include "artkit/metrics.hpp"

// Select-test-from-candidates strategies: FSCS, RRT and MCMC restriction.
namespace artkit::stfcs {

enum class FitnessKind { MinDistance, AvgDistance, MaxDistance, CentroidDistance, DiscrepancyGain };

std::string_view to_string(FitnessKind kind);
FitnessKind fitness_kind_from_string(std::string_view name);

struct FscsConfig {
  std::size_t k = 10;
  FitnessKind fitness = FitnessKind::MinDistance;
  // When set, candidates must differ from every executed test by more than
  // epsilon in every coordinate.
  std::optional<double> eligibility_epsilon;
  std::uint64_t retry_budget = kDefaultRetryBudget;
  std::size_t discrepancy_subdomains = metrics::kDefaultSubdomainCount;

  void validate() const;
};

struct RrtConfig {
  double exclusion_ratio = 0.75;
  std::uint64_t max_attempts = kDefaultRetryBudget;

  void validate() const;
};

enum class McmcProposal {
  Uniform,     // fresh uniform point in the domain
  RandomWalk,  // uniform step around the chain point, wrapped on the torus
};

struct McmcConfig {
  // Defaults to 0.1 * domain diameter when unset.
  std::optional<double> beta1;
  McmcProposal proposal = McmcProposal::Uniform;
  double walk_step = 0.1;  // fraction of each side, RandomWalk only
  std::uint64_t max_proposals = kDefaultRetryBudget;

  double beta_for(const InputDomain& domain) const;
  void validate() const;
};

/// Raised by RRT when no candidate outside the exclusion zones was found.
class ExclusionBudgetExceeded : public BudgetExceeded {
 public:
  ExclusionBudgetExceeded(std::uint64_t attempts, double radius);
  double radius() const { return radius_; }

 private:
  double radius_;
};

/// Fitness of candidate c against the executed set. Distance kinds require a
/// non-empty executed set; DiscrepancyGain draws its subdomains from rng.
double fitness(const TestCase& c, std::span<const TestCase> executed, FitnessKind kind,
               const InputDomain& domain, RngStream& rng);

/// Index of the best candidate; ties go to the lowest index. For
/// DiscrepancyGain one subdomain sample is shared by all candidates.
std::size_t select_candidate(std::span<const TestCase> candidates,
                             std::span<const TestCase> executed, FitnessKind kind,
                             const InputDomain& domain, RngStream& rng);

/// Draw k uniform candidates, filtered for eligibility when configured.
CandidateSet draw_candidates(std::span<const TestCase> executed, const FscsConfig& cfg,
                             const InputDomain& domain, RngStream& rng);

TestCase fscs_next(std::span<const TestCase> executed, const FscsConfig& cfg,
                   const InputDomain& domain, RngStream& rng);

/// Volume of the unit d-ball.
double unit_ball_volume(std::size_t d);

/// Radius at which n_executed d-balls have total volume R * |D|.
double exclusion_radius(double ratio, const InputDomain& domain, std::size_t n_executed);

TestCase rrt_next(std::span<const TestCase> executed, const RrtConfig& cfg,
                  const InputDomain& domain, RngStream& rng);

/// log prod_e (1 - exp(-dist(e, x) / beta)), i.e. the log-likelihood that x is
/// failure-causing given that every executed test passed (up to a constant).
double mcmc_log_likelihood(const TestCase& x, std::span<const TestCase> executed, double beta);

/// Metropolis acceptance of `c` relative to the chain point `previous`.
/// No previous point, or an empty executed set, means accept.
bool mcmc_accept(const TestCase& c, const TestCase* previous, std::span<const TestCase> executed,
                 double beta, RngStream& rng);

/// Propose until acceptance. `chain` holds the previous chain point and is
/// updated to the accepted one. The chain point's own likelihood is taken
/// against the executed set without its own entry, since it has itself been
/// executed.
TestCase mcmc_next(std::span<const TestCase> executed, std::optional<TestCase>& chain,
                   const McmcConfig& cfg, const InputDomain& domain, RngStream& rng);

/// Fixed-size-candidate-set ART.
class FscsGenerator : public Generator {
 public:
  FscsGenerator(InputDomain domain, FscsConfig cfg);

  TestCase next(RngStream& rng) override;
  void reset() override;
  const InputDomain& domain() const override { return domain_; }
  std::string_view name() const override { return "fscs"; }

  const ExecutedSet& executed() const { return executed_; }
  const FscsConfig& config() const { return cfg_; }
  // Record a test executed elsewhere (e.g. inherited from a parent cell).
  void add_executed(const TestCase& tc) { track(tc); }
  // Number of candidate-to-test distance evaluations so far.
  std::uint64_t distance_evaluations() const { return distance_evaluations_; }

 protected:
  // Executed tests the fitness is evaluated against.
  virtual std::span<const TestCase> reference_set(RngStream& rng);

 private:
  double discrepancy_fitness(const TestCase& c) const;
  void track(const TestCase& tc);

  InputDomain domain_;
  FscsConfig cfg_;
  ExecutedSet executed_;
  std::uint64_t distance_evaluations_ = 0;
  // DiscrepancyGain state: subdomains and how many executed tests each holds.
  std::optional<metrics::SubdomainSample> subdomains_;
  std::vector<std::size_t> subdomain_counts_;
};

/// Restricted random testing with exclusion balls.
class RrtGenerator final : public Generator {
 public:
  RrtGenerator(InputDomain domain, RrtConfig cfg);

  TestCase next(RngStream& rng) override;
  void reset() override { executed_.clear(); }
  const InputDomain& domain() const override { return domain_; }
  std::string_view name() const override { return "rrt"; }
  const ExecutedSet& executed() const { return executed_; }

 private:
  InputDomain domain_;
  RrtConfig cfg_;
  ExecutedSet executed_;
};

/// MCMC-restricted random testing.
class McmcGenerator final : public Generator {
 public:
  McmcGenerator(InputDomain domain, McmcConfig cfg);

  TestCase next(RngStream& rng) override;
  void reset() override;
  const InputDomain& domain() const override { return domain_; }
  std::string_view name() const override { return "mcmc"; }
  const ExecutedSet& executed() const { return executed_; }

 private:
  InputDomain domain_;
  McmcConfig cfg_;
  ExecutedSet executed_;
  std::optional<TestCase> chain_;
};

}  // namespace artkit::stfcs
