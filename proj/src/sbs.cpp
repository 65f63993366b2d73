#include "artkit/sbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "artkit/metrics.hpp"

namespace artkit::sbs {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::HillClimbing: return "hc";
    case Algorithm::SimulatedAnnealing: return "sa";
    case Algorithm::Genetic: return "ga";
    case Algorithm::SimulatedRepulsion: return "sr";
    case Algorithm::LocalSpreading: return "ls";
    case Algorithm::Rbcvt: return "rbcvt";
  }
  return "rbcvt";
}

Algorithm algorithm_from_string(std::string_view name) {
  for (auto a : {Algorithm::HillClimbing, Algorithm::SimulatedAnnealing, Algorithm::Genetic,
                 Algorithm::SimulatedRepulsion, Algorithm::LocalSpreading, Algorithm::Rbcvt}) {
    if (to_string(a) == name) return a;
  }
  throw ConfigError(fmt::format("unknown search algorithm '{}'", name));
}

std::size_t default_iterations(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::Genetic:
    case Algorithm::SimulatedRepulsion: return 100;
    case Algorithm::Rbcvt: return 20;
    default: return 1000;
  }
}

double SearchConfig::mutation_rate_for(std::size_t n, std::size_t d) const {
  return mutation_rate ? *mutation_rate : 1.0 / static_cast<double>(n * d);
}

void SearchConfig::validate() const {
  if (iterations < 1) throw ConfigError("search iteration budget must be >= 1");
  if (population < 1) throw ConfigError("search population must be >= 1");
  if (mutation_rate && !(*mutation_rate >= 0.0 && *mutation_rate <= 1.0)) {
    throw ConfigError("mutation rate must lie in [0, 1]");
  }
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) {
    throw ConfigError("crossover rate must lie in [0, 1]");
  }
  if (!(hc_initial_step > 0.0) || !(hc_min_step > 0.0)) throw ConfigError("HC steps must be > 0");
  if (!(sa_initial_temperature > 0.0) || !(sa_final_ratio > 0.0 && sa_final_ratio < 1.0) ||
      !(sa_step > 0.0)) {
    throw ConfigError("SA temperature, final ratio and step must be positive (ratio < 1)");
  }
  if (!(charge > 0.0) || !(mass > 0.0)) throw ConfigError("SR charge and mass must be > 0");
  if (!(step_fraction > 0.0 && step_fraction <= 1.0)) {
    throw ConfigError("LS step fraction must lie in (0, 1]");
  }
  if (samples && *samples < 1) throw ConfigError("RBCVT needs at least one sample");
}

double fitness_min_pair(std::span<const TestCase> set) {
  const auto nn = metrics::nearest_neighbor_distances(set);
  return *std::min_element(nn.begin(), nn.end());
}

double fitness_nn_sum(std::span<const TestCase> set) { return metrics::diversity(set); }

TestSet random_set(std::size_t n, const InputDomain& domain, RngStream& rng) {
  TestSet out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(uniform_point(domain, rng));
  return out;
}

Population random_population(std::size_t ps, std::size_t n, const InputDomain& domain,
                             RngStream& rng) {
  Population out;
  out.reserve(ps);
  for (std::size_t i = 0; i < ps; ++i) out.push_back(random_set(n, domain, rng));
  return out;
}

namespace {

void require_size(std::span<const TestCase> set, std::size_t minimum, std::string_view who) {
  if (set.size() < minimum) {
    throw ConfigError(fmt::format("{} needs a test set of at least {} points", who, minimum));
  }
}

std::vector<double> sorted_nn(std::span<const TestCase> set) {
  auto nn = metrics::nearest_neighbor_distances(set);
  std::sort(nn.begin(), nn.end());
  return nn;
}

}  // namespace

TestSet hill_climb(TestSet set, const SearchConfig& cfg, const InputDomain& domain, RngStream& rng,
                   SearchTrace* trace) {
  cfg.validate();
  require_size(set, 2, "hill climbing");
  const std::size_t d = domain.dims();
  auto key = sorted_nn(set);
  double step = cfg.hc_initial_step;
  std::size_t proposals = 0;
  while (proposals < cfg.iterations && step >= cfg.hc_min_step) {
    bool improved = false;
    for (std::size_t idx = 0; idx < set.size() && proposals < cfg.iterations; ++idx, ++proposals) {
      const TestCase saved = set[idx];
      for (std::size_t j = 0; j < d; ++j) {
        const double w = step * domain[j].width();
        set[idx][j] = clamp_half_open(saved[j] + rng.uniform(-w, w), domain[j]);
      }
      auto candidate = sorted_nn(set);
      if (std::lexicographical_compare(key.begin(), key.end(), candidate.begin(),
                                       candidate.end())) {
        key = std::move(candidate);
        improved = true;
        if (trace) trace->fitness.push_back(key.front());
      } else {
        set[idx] = saved;
      }
    }
    step = improved ? std::min(cfg.hc_initial_step, 2.0 * step) : 0.5 * step;
  }
  return set;
}

TestSet simulated_annealing(TestSet set, const SearchConfig& cfg, const InputDomain& domain,
                            RngStream& rng, SearchTrace* trace) {
  cfg.validate();
  require_size(set, 2, "simulated annealing");
  const std::size_t n = set.size();
  const std::size_t d = domain.dims();
  const double rate = cfg.mutation_rate_for(n, d);
  double current = fitness_nn_sum(set);
  TestSet best = set;
  double best_fitness = current;
  double temperature = cfg.sa_initial_temperature * std::max(current, 1e-12);
  const double cooling = std::pow(cfg.sa_final_ratio, 1.0 / static_cast<double>(cfg.iterations));

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    TestSet candidate = set;
    bool mutated = false;
    auto mutate = [&](std::size_t i, std::size_t j) {
      const double w = cfg.sa_step * domain[j].width();
      candidate[i][j] = clamp_half_open(candidate[i][j] + rng.uniform(-w, w), domain[j]);
      mutated = true;
    };
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        if (rng.uniform01() < rate) mutate(i, j);
      }
    }
    if (!mutated) mutate(rng.uniform_index(n), rng.uniform_index(d));

    const double proposed = fitness_nn_sum(candidate);
    const double delta = proposed - current;
    bool accept = delta > 0.0;
    bool worse = false;
    if (!accept) {
      accept = rng.uniform01() < std::exp(delta / temperature);
      worse = accept && delta < 0.0;
    }
    if (accept) {
      set = std::move(candidate);
      current = proposed;
      if (current > best_fitness) {
        best_fitness = current;
        best = set;
      }
    }
    temperature *= cooling;
    if (trace) {
      trace->fitness.push_back(current);
      trace->worse_accepted.push_back(worse);
      trace->best_seen.push_back(best_fitness);
    }
  }
  return best;
}

TestSet genetic(Population population, const SearchConfig& cfg, const InputDomain& domain,
                RngStream& rng, SearchTrace* trace) {
  cfg.validate();
  if (population.size() < 2) throw ConfigError("genetic search needs a population of >= 2 sets");
  const std::size_t n = population.front().size();
  for (const auto& s : population) {
    if (s.size() != n) throw ConfigError("all sets in a population must have the same size");
  }
  require_size(population.front(), 2, "genetic search");
  const std::size_t d = domain.dims();
  const std::size_t ps = population.size();
  const double rate = cfg.mutation_rate_for(n, d);

  std::vector<double> fit(ps);
  auto evaluate = [&] {
    for (std::size_t i = 0; i < ps; ++i) fit[i] = fitness_nn_sum(population[i]);
  };
  auto best_index = [&] {
    return static_cast<std::size_t>(std::max_element(fit.begin(), fit.end()) - fit.begin());
  };
  auto roulette = [&]() -> const TestSet& {
    double total = 0.0;
    for (double f : fit) total += f;
    if (!(total > 0.0)) return population[rng.uniform_index(ps)];
    double r = rng.uniform01() * total;
    for (std::size_t i = 0; i < ps; ++i) {
      r -= fit[i];
      if (r < 0.0) return population[i];
    }
    return population.back();
  };

  evaluate();
  for (std::size_t gen = 0; gen < cfg.iterations; ++gen) {
    Population next;
    next.reserve(ps);
    next.push_back(population[best_index()]);
    while (next.size() < ps) {
      TestSet a = roulette();
      TestSet b = roulette();
      if (rng.uniform01() < cfg.crossover_rate) {
        // Exchange the block of test cases [lo, hi).
        std::size_t lo = rng.uniform_index(n);
        std::size_t hi = rng.uniform_index(n);
        if (lo > hi) std::swap(lo, hi);
        ++hi;
        for (std::size_t i = lo; i < hi; ++i) std::swap(a[i], b[i]);
      }
      for (TestSet* child : {&a, &b}) {
        for (auto& tc : *child) {
          for (std::size_t j = 0; j < d; ++j) {
            if (rng.uniform01() < rate) tc[j] = rng.uniform(domain[j].lo, domain[j].hi);
          }
        }
      }
      next.push_back(std::move(a));
      if (next.size() < ps) next.push_back(std::move(b));
    }
    population = std::move(next);
    evaluate();
    if (trace) trace->fitness.push_back(fit[best_index()]);
  }
  return population[best_index()];
}

std::vector<std::vector<double>> repulsion_forces(std::span<const TestCase> set, double charge,
                                                  const InputDomain& domain) {
  const std::size_t n = set.size();
  const std::size_t d = domain.dims();
  const double floor_dist = 1e-6 * domain.diameter();
  const double q2 = charge * charge;
  std::vector<std::vector<double>> force(n, std::vector<double>(d, 0.0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double r = metrics::dist(set[a], set[b]);
      std::vector<double> unit(d, 0.0);
      if (r > 0.0) {
        for (std::size_t j = 0; j < d; ++j) unit[j] = (set[a][j] - set[b][j]) / r;
      } else {
        unit[0] = 1.0;  // coincident points separate along the first axis
      }
      const double r_eff = std::max(r, floor_dist);
      const double magnitude = q2 / (r_eff * r_eff);
      for (std::size_t j = 0; j < d; ++j) {
        force[a][j] += magnitude * unit[j];
        force[b][j] -= magnitude * unit[j];
      }
    }
  }
  return force;
}

TestSet simulated_repulsion(Population population, const SearchConfig& cfg,
                            const InputDomain& domain, SearchTrace* trace) {
  cfg.validate();
  if (population.empty()) throw ConfigError("simulated repulsion needs at least one set");
  for (const auto& s : population) require_size(s, 2, "simulated repulsion");
  const std::size_t d = domain.dims();

  TestSet best = population.front();
  double best_fitness = -1.0;
  auto consider = [&] {
    for (const auto& s : population) {
      const double f = fitness_nn_sum(s);
      if (f > best_fitness) {
        best_fitness = f;
        best = s;
      }
    }
  };
  consider();
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    // Sets evolve independently; the order of updates does not matter.
    for (auto& set : population) {
      const auto force = repulsion_forces(set, cfg.charge, domain);
      for (std::size_t i = 0; i < set.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          set[i][j] = clamp_half_open(set[i][j] + force[i][j] / cfg.mass, domain[j]);
        }
      }
    }
    consider();
    if (trace) trace->fitness.push_back(best_fitness);
  }
  return best;
}

TestSet local_spreading(TestSet set, const SearchConfig& cfg, const InputDomain& domain,
                        SearchTrace* trace) {
  cfg.validate();
  require_size(set, 3, "local spreading");
  const std::size_t n = set.size();
  const std::size_t d = domain.dims();
  const double tolerance = 1e-12 * domain.diameter();

  auto nearest_two = [&](std::size_t idx, const TestCase& p) {
    std::size_t f = n, s = n;
    double df = std::numeric_limits<double>::infinity();
    double ds = df;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == idx) continue;
      const double r = metrics::dist(p, set[k]);
      if (r < df) {
        s = f;
        ds = df;
        f = k;
        df = r;
      } else if (r < ds) {
        s = k;
        ds = r;
      }
    }
    return std::tuple{f, df, s, ds};
  };

  for (std::size_t sweep = 0; sweep < cfg.iterations; ++sweep) {
    bool moved = false;
    for (std::size_t idx = 0; idx < n; ++idx) {
      const auto [f, df, s, ds] = nearest_two(idx, set[idx]);
      if (!(ds - df > tolerance)) continue;
      const double step = cfg.step_fraction * (ds - df);
      TestCase moved_to = set[idx];
      for (std::size_t j = 0; j < d; ++j) {
        const double dir = df > 0.0 ? (set[idx][j] - set[f][j]) / df : (j == 0 ? 1.0 : 0.0);
        moved_to[j] = clamp_half_open(set[idx][j] + step * dir, domain[j]);
      }
      const auto [f2, df2, s2, ds2] = nearest_two(idx, moved_to);
      if (df2 > df + tolerance) {
        set[idx] = std::move(moved_to);
        moved = true;
      }
    }
    if (trace) trace->fitness.push_back(fitness_min_pair(set));
    if (!moved) break;
  }
  return set;
}

CellAccumulation accumulate_cells(std::span<const TestCase> sites, std::size_t owned,
                                  std::span<const TestCase> samples) {
  if (owned > sites.size() || sites.empty()) throw ConfigError("invalid Voronoi site layout");
  const std::size_t d = sites.front().dims();
  CellAccumulation acc;
  acc.sums.assign(owned, std::vector<double>(d, 0.0));
  acc.counts.assign(owned, 0);
  for (const auto& x : samples) {
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < sites.size(); ++k) {
      const double r = metrics::dist_squared(x, sites[k]);
      if (r < best) {
        best = r;
        nearest = k;
      }
    }
    if (nearest >= owned) {
      ++acc.dropped;
      continue;
    }
    ++acc.counts[nearest];
    for (std::size_t j = 0; j < d; ++j) acc.sums[nearest][j] += x[j];
  }
  return acc;
}

TestCase border_point(const InputDomain& domain, RngStream& rng) {
  TestCase p = uniform_point(domain, rng);
  const std::size_t face = rng.uniform_index(2 * domain.dims());
  const std::size_t axis = face / 2;
  p[axis] = face % 2 == 0 ? domain[axis].lo : domain[axis].hi;
  return p;
}

TestSet rbcvt(TestSet set, const SearchConfig& cfg, const InputDomain& domain, RngStream& rng,
              SearchTrace* trace) {
  cfg.validate();
  require_size(set, 1, "RBCVT");
  const std::size_t n = set.size();
  const std::size_t d = domain.dims();
  const std::size_t m = cfg.samples.value_or(100 * n);
  const std::size_t borders = cfg.border_points.value_or(4 * n);

  std::vector<TestCase> samples;
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    samples.clear();
    for (std::size_t s = 0; s < m; ++s) samples.push_back(uniform_point(domain, rng));
    // Boundary samples pull the outer cells' centroids back towards the faces.
    for (std::size_t b = 0; b < borders; ++b) samples.push_back(border_point(domain, rng));
    const auto acc = accumulate_cells(set, n, samples);
    for (std::size_t i = 0; i < n; ++i) {
      if (acc.counts[i] == 0) continue;  // empty cell: keep the point
      for (std::size_t j = 0; j < d; ++j) {
        set[i][j] = clamp_half_open(acc.sums[i][j] / static_cast<double>(acc.counts[i]), domain[j]);
      }
    }
    if (trace && n >= 2) trace->fitness.push_back(fitness_nn_sum(set));
  }
  return set;
}

TestSet optimize(std::size_t n, const SearchConfig& cfg, const InputDomain& domain,
                 RngStream& rng) {
  cfg.validate();
  switch (cfg.algorithm) {
    case Algorithm::HillClimbing:
      return hill_climb(random_set(n, domain, rng), cfg, domain, rng);
    case Algorithm::SimulatedAnnealing:
      return simulated_annealing(random_set(n, domain, rng), cfg, domain, rng);
    case Algorithm::Genetic:
      return genetic(random_population(std::max<std::size_t>(cfg.population, 2), n, domain, rng),
                     cfg, domain, rng);
    case Algorithm::SimulatedRepulsion:
      return simulated_repulsion(random_population(cfg.population, n, domain, rng), cfg, domain);
    case Algorithm::LocalSpreading:
      return local_spreading(random_set(n, domain, rng), cfg, domain);
    case Algorithm::Rbcvt:
      return rbcvt(random_set(n, domain, rng), cfg, domain, rng);
  }
  return {};
}

SearchGenerator::SearchGenerator(InputDomain domain, SearchConfig cfg, std::size_t batch)
    : domain_(std::move(domain)), cfg_(cfg), batch_(batch) {
  cfg_.validate();
  const std::size_t minimum = cfg_.algorithm == Algorithm::LocalSpreading ? 3
                              : cfg_.algorithm == Algorithm::Rbcvt        ? 1
                                                                          : 2;
  if (batch_ < minimum) {
    throw ConfigError(fmt::format("{} needs a batch of at least {} tests", to_string(cfg_.algorithm),
                                  minimum));
  }
}

void SearchGenerator::reset() {
  buffer_.clear();
  cursor_ = 0;
}

TestCase SearchGenerator::next(RngStream& rng) {
  if (cursor_ == buffer_.size()) {
    buffer_ = optimize(batch_, cfg_, domain_, rng);
    cursor_ = 0;
  }
  return buffer_[cursor_++];
}

}  // namespace artkit::sbs
