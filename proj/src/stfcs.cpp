#include "artkit/stfcs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

namespace artkit::stfcs {

std::string_view to_string(FitnessKind kind) {
  switch (kind) {
    case FitnessKind::MinDistance: return "min";
    case FitnessKind::AvgDistance: return "avg";
    case FitnessKind::MaxDistance: return "max";
    case FitnessKind::CentroidDistance: return "centroid";
    case FitnessKind::DiscrepancyGain: return "discrepancy";
  }
  return "min";
}

FitnessKind fitness_kind_from_string(std::string_view name) {
  for (auto k : {FitnessKind::MinDistance, FitnessKind::AvgDistance, FitnessKind::MaxDistance,
                 FitnessKind::CentroidDistance, FitnessKind::DiscrepancyGain}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError(fmt::format("unknown fitness '{}'", name));
}

void FscsConfig::validate() const {
  if (k < 1) throw ConfigError("FSCS candidate count k must be >= 1");
  if (eligibility_epsilon && !(*eligibility_epsilon >= 0.0)) {
    throw ConfigError("eligibility epsilon must be >= 0");
  }
  if (retry_budget < 1) throw ConfigError("retry budget must be >= 1");
  if (discrepancy_subdomains < 1) throw ConfigError("discrepancy needs >= 1 subdomain");
}

void RrtConfig::validate() const {
  if (!(exclusion_ratio > 0.0)) throw ConfigError("RRT exclusion ratio must be > 0");
  if (max_attempts < 1) throw ConfigError("RRT max_attempts must be >= 1");
}

double McmcConfig::beta_for(const InputDomain& domain) const {
  return beta1 ? *beta1 : 0.1 * domain.diameter();
}

void McmcConfig::validate() const {
  if (beta1 && !(*beta1 > 0.0)) throw ConfigError("MCMC beta1 must be > 0");
  if (!(walk_step > 0.0 && walk_step <= 1.0)) throw ConfigError("MCMC walk step must be in (0, 1]");
  if (max_proposals < 1) throw ConfigError("MCMC max_proposals must be >= 1");
}

ExclusionBudgetExceeded::ExclusionBudgetExceeded(std::uint64_t attempts, double radius)
    : BudgetExceeded(fmt::format("RRT found no candidate outside the exclusion zones after {} "
                                 "attempts (radius {}); the exclusion ratio is too large",
                                 attempts, radius),
                     attempts),
      radius_(radius) {}

double fitness(const TestCase& c, std::span<const TestCase> executed, FitnessKind kind,
               const InputDomain& domain, RngStream& rng) {
  if (kind == FitnessKind::DiscrepancyGain) {
    ExecutedSet with(executed.begin(), executed.end());
    with.push_back(c);
    return 1.0 - metrics::discrepancy(with, domain, metrics::kDefaultSubdomainCount, rng);
  }
  if (executed.empty()) throw ConfigError("distance fitness needs a non-empty executed set");
  switch (kind) {
    case FitnessKind::MinDistance: {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& e : executed) best = std::min(best, metrics::dist_squared(c, e));
      return std::sqrt(best);
    }
    case FitnessKind::AvgDistance: {
      double s = 0.0;
      for (const auto& e : executed) s += metrics::dist(c, e);
      return s / static_cast<double>(executed.size());
    }
    case FitnessKind::MaxDistance: {
      double best = 0.0;
      for (const auto& e : executed) best = std::max(best, metrics::dist_squared(c, e));
      return std::sqrt(best);
    }
    case FitnessKind::CentroidDistance: {
      std::vector<double> centroid(c.dims(), 0.0);
      for (const auto& e : executed) {
        for (std::size_t i = 0; i < centroid.size(); ++i) centroid[i] += e[i];
      }
      for (auto& v : centroid) v /= static_cast<double>(executed.size());
      return metrics::dist(c, TestCase(std::move(centroid)));
    }
    case FitnessKind::DiscrepancyGain: break;
  }
  return 0.0;
}

std::size_t select_candidate(std::span<const TestCase> candidates,
                             std::span<const TestCase> executed, FitnessKind kind,
                             const InputDomain& domain, RngStream& rng) {
  if (candidates.empty()) throw ConfigError("candidate set is empty");
  std::vector<double> scores(candidates.size());
  if (kind == FitnessKind::DiscrepancyGain) {
    const auto sample = metrics::SubdomainSample::draw(domain, metrics::kDefaultSubdomainCount, rng);
    ExecutedSet with(executed.begin(), executed.end());
    with.emplace_back();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      with.back() = candidates[i];
      scores[i] = 1.0 - metrics::discrepancy(with, domain, sample);
    }
  } else {
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      scores[i] = fitness(candidates[i], executed, kind, domain, rng);
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

namespace {

TestCase draw_eligible(std::span<const TestCase> executed, double epsilon, std::uint64_t budget,
                       const InputDomain& domain, RngStream& rng) {
  for (std::uint64_t attempt = 0; attempt < budget; ++attempt) {
    TestCase c = uniform_point(domain, rng);
    if (eligibility_filter(c, executed, epsilon)) return c;
  }
  throw BudgetExceeded(
      fmt::format("eligibility filter rejected {} consecutive candidates (epsilon {})", budget,
                  epsilon),
      budget);
}

}  // namespace

CandidateSet draw_candidates(std::span<const TestCase> executed, const FscsConfig& cfg,
                             const InputDomain& domain, RngStream& rng) {
  CandidateSet out;
  out.reserve(cfg.k);
  for (std::size_t i = 0; i < cfg.k; ++i) {
    out.push_back(cfg.eligibility_epsilon
                      ? draw_eligible(executed, *cfg.eligibility_epsilon, cfg.retry_budget,
                                      domain, rng)
                      : uniform_point(domain, rng));
  }
  return out;
}

TestCase fscs_next(std::span<const TestCase> executed, const FscsConfig& cfg,
                   const InputDomain& domain, RngStream& rng) {
  cfg.validate();
  if (executed.empty()) return uniform_point(domain, rng);
  CandidateSet candidates = draw_candidates(executed, cfg, domain, rng);
  return candidates[select_candidate(candidates, executed, cfg.fitness, domain, rng)];
}

double unit_ball_volume(std::size_t d) {
  const double half = 0.5 * static_cast<double>(d);
  return std::exp(half * std::log(std::numbers::pi) - std::lgamma(half + 1.0));
}

double exclusion_radius(double ratio, const InputDomain& domain, std::size_t n_executed) {
  if (n_executed < 1) throw ConfigError("exclusion radius needs at least one executed test");
  const double d = static_cast<double>(domain.dims());
  const double per_ball =
      ratio * domain.volume() / (unit_ball_volume(domain.dims()) * static_cast<double>(n_executed));
  return std::pow(per_ball, 1.0 / d);
}

TestCase rrt_next(std::span<const TestCase> executed, const RrtConfig& cfg,
                  const InputDomain& domain, RngStream& rng) {
  cfg.validate();
  if (executed.empty()) return uniform_point(domain, rng);
  const double radius = exclusion_radius(cfg.exclusion_ratio, domain, executed.size());
  const double r2 = radius * radius;
  for (std::uint64_t attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    TestCase c = uniform_point(domain, rng);
    bool outside = true;
    for (const auto& e : executed) {
      if (metrics::dist_squared(c, e) < r2) {
        outside = false;
        break;
      }
    }
    if (outside) return c;
  }
  throw ExclusionBudgetExceeded(cfg.max_attempts, radius);
}

double mcmc_log_likelihood(const TestCase& x, std::span<const TestCase> executed, double beta) {
  double s = 0.0;
  for (const auto& e : executed) {
    const double p_pass = -std::expm1(-metrics::dist(e, x) / beta);
    if (p_pass <= 0.0) return -std::numeric_limits<double>::infinity();
    s += std::log(p_pass);
  }
  return s;
}

namespace {

bool accept_ratio(double log_candidate, double log_previous, RngStream& rng) {
  if (std::isinf(log_previous) && log_previous < 0) return true;
  if (std::isinf(log_candidate) && log_candidate < 0) return false;
  const double log_ratio = log_candidate - log_previous;
  if (log_ratio >= 0.0) {
    rng.uniform01();  // keep one draw per decision
    return true;
  }
  return rng.uniform01() <= std::exp(log_ratio);
}

}  // namespace

bool mcmc_accept(const TestCase& c, const TestCase* previous, std::span<const TestCase> executed,
                 double beta, RngStream& rng) {
  if (previous == nullptr || executed.empty()) return true;
  return accept_ratio(mcmc_log_likelihood(c, executed, beta),
                      mcmc_log_likelihood(*previous, executed, beta), rng);
}

namespace {

TestCase propose(const std::optional<TestCase>& chain, const McmcConfig& cfg,
                 const InputDomain& domain, RngStream& rng) {
  if (cfg.proposal == McmcProposal::Uniform || !chain) return uniform_point(domain, rng);
  TestCase c = *chain;
  for (std::size_t i = 0; i < c.dims(); ++i) {
    const double w = domain[i].width();
    double x = c[i] - domain[i].lo + rng.uniform(-cfg.walk_step, cfg.walk_step) * w;
    x = std::fmod(x, w);
    if (x < 0) x += w;
    c[i] = clamp_half_open(domain[i].lo + x, domain[i]);
  }
  return c;
}

}  // namespace

TestCase mcmc_next(std::span<const TestCase> executed, std::optional<TestCase>& chain,
                   const McmcConfig& cfg, const InputDomain& domain, RngStream& rng) {
  cfg.validate();
  const double beta = cfg.beta_for(domain);
  if (executed.empty() || !chain) {
    chain = propose(chain, cfg, domain, rng);
    return *chain;
  }
  // Likelihood of the chain point, ignoring its own executed entry.
  double log_previous = 0.0;
  bool skipped = false;
  for (const auto& e : executed) {
    if (!skipped && e == *chain) {
      skipped = true;
      continue;
    }
    log_previous += mcmc_log_likelihood(*chain, std::span(&e, 1), beta);
  }
  for (std::uint64_t attempt = 0; attempt < cfg.max_proposals; ++attempt) {
    TestCase c = propose(chain, cfg, domain, rng);
    if (accept_ratio(mcmc_log_likelihood(c, executed, beta), log_previous, rng)) {
      chain = c;
      return c;
    }
  }
  throw BudgetExceeded(fmt::format("MCMC rejected {} consecutive proposals", cfg.max_proposals),
                       cfg.max_proposals);
}

FscsGenerator::FscsGenerator(InputDomain domain, FscsConfig cfg)
    : domain_(std::move(domain)), cfg_(cfg) {
  cfg_.validate();
}

void FscsGenerator::reset() {
  executed_.clear();
  distance_evaluations_ = 0;
  subdomains_.reset();
  subdomain_counts_.clear();
}

std::span<const TestCase> FscsGenerator::reference_set(RngStream&) { return executed_; }

double FscsGenerator::discrepancy_fitness(const TestCase& c) const {
  const double n = static_cast<double>(executed_.size() + 1);
  const double total = domain_.volume();
  double worst = 0.0;
  for (std::size_t i = 0; i < subdomains_->boxes.size(); ++i) {
    const auto& box = subdomains_->boxes[i];
    const double inside = static_cast<double>(subdomain_counts_[i] + (box.contains(c) ? 1 : 0));
    worst = std::max(worst, std::abs(inside / n - box.volume() / total));
  }
  return 1.0 - worst;
}

void FscsGenerator::track(const TestCase& tc) {
  if (subdomains_) {
    for (std::size_t i = 0; i < subdomains_->boxes.size(); ++i) {
      subdomain_counts_[i] += subdomains_->boxes[i].contains(tc) ? 1 : 0;
    }
  }
  executed_.push_back(tc);
}

TestCase FscsGenerator::next(RngStream& rng) {
  if (cfg_.fitness == FitnessKind::DiscrepancyGain && !subdomains_) {
    subdomains_ = metrics::SubdomainSample::draw(domain_, cfg_.discrepancy_subdomains, rng);
    subdomain_counts_.assign(subdomains_->boxes.size(), 0);
    for (const auto& e : executed_) {
      for (std::size_t i = 0; i < subdomains_->boxes.size(); ++i) {
        subdomain_counts_[i] += subdomains_->boxes[i].contains(e) ? 1 : 0;
      }
    }
  }
  if (executed_.empty()) {
    TestCase first = uniform_point(domain_, rng);
    track(first);
    return first;
  }
  const auto reference = reference_set(rng);
  CandidateSet candidates = draw_candidates(reference, cfg_, domain_, rng);
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double score = 0.0;
    if (cfg_.fitness == FitnessKind::DiscrepancyGain) {
      score = discrepancy_fitness(candidates[i]);
    } else {
      score = fitness(candidates[i], reference, cfg_.fitness, domain_, rng);
      distance_evaluations_ += reference.size();
    }
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  TestCase chosen = std::move(candidates[best]);
  track(chosen);
  return chosen;
}

RrtGenerator::RrtGenerator(InputDomain domain, RrtConfig cfg)
    : domain_(std::move(domain)), cfg_(cfg) {
  cfg_.validate();
}

TestCase RrtGenerator::next(RngStream& rng) {
  TestCase tc = rrt_next(executed_, cfg_, domain_, rng);
  executed_.push_back(tc);
  return tc;
}

McmcGenerator::McmcGenerator(InputDomain domain, McmcConfig cfg)
    : domain_(std::move(domain)), cfg_(cfg) {
  cfg_.validate();
}

void McmcGenerator::reset() {
  executed_.clear();
  chain_.reset();
}

TestCase McmcGenerator::next(RngStream& rng) {
  TestCase tc = mcmc_next(executed_, chain_, cfg_, domain_, rng);
  executed_.push_back(tc);
  return tc;
}

}  // namespace artkit::stfcs
