#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "artkit/core.hpp"

// Search-based strategy: optimise a fixed-size test set for spread.
namespace artkit::sbs {

using TestSet = std::vector<TestCase>;
using Population = std::vector<TestSet>;

enum class Algorithm {
  HillClimbing,
  SimulatedAnnealing,
  Genetic,
  SimulatedRepulsion,
  LocalSpreading,
  Rbcvt,
};

std::string_view to_string(Algorithm algorithm);
Algorithm algorithm_from_string(std::string_view name);

/// Budget used when none is configured: 100 generations for GA and
/// iterations for SR, 20 Lloyd iterations for RBCVT, 1000 otherwise.
std::size_t default_iterations(Algorithm algorithm);

struct SearchConfig {
  Algorithm algorithm = Algorithm::Rbcvt;
  // Proposals (HC), iterations (SA, SR, RBCVT), generations (GA) or sweeps (LS).
  std::size_t iterations = 1000;
  // Population size for GA and SR; HC, SA, LS and RBCVT use one set.
  std::size_t population = 20;

  // HC: initial perturbation half-width as a fraction of each side; halved
  // after a sweep without gain and doubled (up to the initial value) after a
  // sweep with one. The search stops below hc_min_step.
  double hc_initial_step = 0.1;
  double hc_min_step = 1e-6;

  // SA: starting temperature relative to the initial fitness, geometric
  // cooling down to sa_final_ratio of it over the budget.
  double sa_initial_temperature = 0.05;
  double sa_final_ratio = 1e-9;
  double sa_step = 0.05;

  // GA and SA: per-coordinate mutation probability, 1/(N*d) when unset.
  std::optional<double> mutation_rate;
  double crossover_rate = 0.9;

  // SR: charge Q and mass m.
  double charge = 1e-3;
  double mass = 1.0;

  // LS: move length as a fraction of (d_s - d_f).
  double step_fraction = 0.5;

  // RBCVT: Monte-Carlo samples per iteration (100*N) and random border
  // samples on the domain faces (4*N) added to them.
  std::optional<std::size_t> samples;
  std::optional<std::size_t> border_points;

  double mutation_rate_for(std::size_t n, std::size_t d) const;
  void validate() const;
};

/// Per-step record of an optimisation run.
struct SearchTrace {
  // Fitness after every accepted step (HC), sweep (LS), iteration (SA, SR,
  // RBCVT) or generation (GA). SA records the current set's fitness; GA
  // records the best of each generation.
  std::vector<double> fitness;
  // SA only: whether the step accepted a strictly worse set.
  std::vector<bool> worse_accepted;
  // SA only: best-seen fitness after every iteration.
  std::vector<double> best_seen;
};

/// Minimum distance over unordered pairs. Requires N >= 2.
double fitness_min_pair(std::span<const TestCase> set);
/// Sum of nearest-neighbour distances (same as metrics::diversity).
double fitness_nn_sum(std::span<const TestCase> set);

TestSet random_set(std::size_t n, const InputDomain& domain, RngStream& rng);
Population random_population(std::size_t ps, std::size_t n, const InputDomain& domain,
                             RngStream& rng);

/// Single-point perturbations kept only when they improve the sorted vector
/// of nearest-neighbour distances lexicographically (smallest first), so the
/// minimum pair distance never decreases and ties between several closest
/// pairs can still be broken.
TestSet hill_climb(TestSet set, const SearchConfig& cfg, const InputDomain& domain, RngStream& rng,
                   SearchTrace* trace = nullptr);

/// Returns the best-seen set under fitness_nn_sum.
TestSet simulated_annealing(TestSet set, const SearchConfig& cfg, const InputDomain& domain,
                            RngStream& rng, SearchTrace* trace = nullptr);

/// Roulette selection on fitness_nn_sum, block crossover, per-coordinate
/// mutation, one elite. Returns the best set after the budget.
TestSet genetic(Population population, const SearchConfig& cfg, const InputDomain& domain,
                RngStream& rng, SearchTrace* trace = nullptr);

/// Resultant Coulomb force on every point of `set`. Distances below
/// 1e-6 * diameter are clamped.
std::vector<std::vector<double>> repulsion_forces(std::span<const TestCase> set, double charge,
                                                  const InputDomain& domain);

/// Every set moves by RF/m per iteration, clamped into the domain. Returns
/// the best set seen under fitness_nn_sum.
TestSet simulated_repulsion(Population population, const SearchConfig& cfg,
                            const InputDomain& domain, SearchTrace* trace = nullptr);

/// Move points away from their nearest neighbour while that increases their
/// own nearest-neighbour distance, until nothing moves. Requires N >= 3.
TestSet local_spreading(TestSet set, const SearchConfig& cfg, const InputDomain& domain,
                        SearchTrace* trace = nullptr);

/// Sample-based Voronoi assignment: sums and counts of the samples nearest to
/// each of the first `owned` sites. Samples nearest to a later site (border
/// sites) are dropped.
struct CellAccumulation {
  std::vector<std::vector<double>> sums;
  std::vector<std::size_t> counts;
  std::size_t dropped = 0;
};
CellAccumulation accumulate_cells(std::span<const TestCase> sites, std::size_t owned,
                                  std::span<const TestCase> samples);

/// Uniform point on a random face of the domain.
TestCase border_point(const InputDomain& domain, RngStream& rng);

/// Random-border centroidal Voronoi tessellation (Lloyd iterations).
TestSet rbcvt(TestSet set, const SearchConfig& cfg, const InputDomain& domain, RngStream& rng,
              SearchTrace* trace = nullptr);

/// Run cfg.algorithm on a fresh random population of sets of size n.
TestSet optimize(std::size_t n, const SearchConfig& cfg, const InputDomain& domain,
                 RngStream& rng);

/// Emits optimised sets of `batch` tests one test at a time; a new set is
/// optimised whenever the previous one is exhausted.
class SearchGenerator final : public Generator {
 public:
  SearchGenerator(InputDomain domain, SearchConfig cfg, std::size_t batch);

  TestCase next(RngStream& rng) override;
  void reset() override;
  const InputDomain& domain() const override { return domain_; }
  std::string_view name() const override { return to_string(cfg_.algorithm); }

 private:
  InputDomain domain_;
  SearchConfig cfg_;
  std::size_t batch_;
  TestSet buffer_;
  std::size_t cursor_ = 0;
};

}  // namespace artkit::sbs
