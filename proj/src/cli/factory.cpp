#include "artkit/cli/factory.hpp"

#include <algorithm>
#include <memory>

#include <fmt/format.h>

#include "artkit/hybrid.hpp"
#include "artkit/pbs.hpp"
#include "artkit/qrs.hpp"
#include "artkit/sbs.hpp"
#include "artkit/stfcs.hpp"
#include "artkit/tpbs.hpp"

namespace artkit::cli {

namespace {

// Keeps a loaded direction table alive for as long as the generator using it.
class OwnedTableQrs final : public Generator {
 public:
  OwnedTableQrs(std::shared_ptr<const qrs::DirectionTable> table, InputDomain domain,
                qrs::SequenceSpec sequence, qrs::Randomizer randomizer)
      : table_(std::move(table)),
        inner_(std::move(domain), with_table(sequence, table_.get()), std::move(randomizer)) {}

  TestCase next(RngStream& rng) override { return inner_.next(rng); }
  void reset() override { inner_.reset(); }
  const InputDomain& domain() const override { return inner_.domain(); }
  std::string_view name() const override { return inner_.name(); }

 private:
  static qrs::SequenceSpec with_table(qrs::SequenceSpec s, const qrs::DirectionTable* t) {
    s.table = t;
    return s;
  }
  std::shared_ptr<const qrs::DirectionTable> table_;
  qrs::QrsGenerator inner_;
};

std::uint32_t as_u32(std::uint64_t v, const std::string& what) {
  if (v > 0xffffffffull) throw ConfigError(fmt::format("{} is too large", what));
  return static_cast<std::uint32_t>(v);
}

stfcs::FscsConfig read_fscs(JsonReader& r) {
  stfcs::FscsConfig cfg;
  cfg.k = r.count("k", cfg.k);
  cfg.fitness = stfcs::fitness_kind_from_string(r.text("fitness", "min"));
  cfg.eligibility_epsilon = r.optional_number("epsilon");
  cfg.retry_budget = r.count("retry_budget", cfg.retry_budget);
  cfg.discrepancy_subdomains = r.count("subdomains", cfg.discrepancy_subdomains);
  cfg.validate();
  return cfg;
}

GeneratorPtr make_qrs(const std::string& strategy, JsonReader& r, const InputDomain& domain) {
  qrs::SequenceSpec seq;
  seq.kind = qrs::sequence_kind_from_string(strategy);
  if (seq.kind == qrs::SequenceKind::VanDerCorput) seq.base = as_u32(r.count("base", 2), "base");
  if (seq.kind == qrs::SequenceKind::Halton) {
    if (const Json* bases = r.raw("bases")) {
      if (!bases->is_array()) throw ConfigError("halton 'bases' must be an array of primes");
      for (const auto& b : *bases) {
        if (!b.is_number_unsigned()) throw ConfigError("halton 'bases' must be an array of primes");
        seq.bases.push_back(as_u32(b.get<std::uint64_t>(), "halton base"));
      }
    }
  }
  std::string directions;
  if (seq.kind == qrs::SequenceKind::Sobol) directions = r.text("directions", "");

  qrs::Randomizer rand;
  rand.kind = qrs::randomizer_kind_from_string(r.text("randomizer", "none"));
  rand.amplitude = r.optional_number("amplitude");
  if (auto n = r.optional_count("planned_n")) rand.planned_n = static_cast<std::size_t>(*n);
  if (const Json* rot = r.raw("rotation")) {
    if (!rot->is_array()) throw ConfigError("'rotation' must be an array of numbers");
    for (const auto& x : *rot) {
      if (!x.is_number()) throw ConfigError("'rotation' must be an array of numbers");
      rand.rotation.push_back(x.get<double>());
    }
  }
  r.finish();
  if (!directions.empty()) {
    auto table = std::make_shared<const qrs::DirectionTable>(qrs::DirectionTable::load(directions));
    return std::make_unique<OwnedTableQrs>(std::move(table), domain, seq, rand);
  }
  return std::make_unique<qrs::QrsGenerator>(domain, seq, rand);
}

GeneratorPtr make_search(const std::string& strategy, JsonReader& r, const InputDomain& domain) {
  sbs::SearchConfig cfg;
  cfg.algorithm = sbs::algorithm_from_string(strategy);
  const auto batch = r.count("batch", 100);
  cfg.iterations = r.count("iterations", sbs::default_iterations(cfg.algorithm));
  cfg.population = r.count("population", cfg.population);
  cfg.hc_initial_step = r.number("hc_initial_step", cfg.hc_initial_step);
  cfg.hc_min_step = r.number("hc_min_step", cfg.hc_min_step);
  cfg.sa_initial_temperature = r.number("sa_initial_temperature", cfg.sa_initial_temperature);
  cfg.sa_final_ratio = r.number("sa_final_ratio", cfg.sa_final_ratio);
  cfg.sa_step = r.number("sa_step", cfg.sa_step);
  cfg.mutation_rate = r.optional_number("mutation_rate");
  cfg.crossover_rate = r.number("crossover_rate", cfg.crossover_rate);
  cfg.charge = r.number("charge", cfg.charge);
  cfg.mass = r.number("mass", cfg.mass);
  cfg.step_fraction = r.number("step_fraction", cfg.step_fraction);
  if (auto s = r.optional_count("samples")) cfg.samples = static_cast<std::size_t>(*s);
  if (auto b = r.optional_count("border_points")) cfg.border_points = static_cast<std::size_t>(*b);
  r.finish();
  return std::make_unique<sbs::SearchGenerator>(domain, cfg, static_cast<std::size_t>(batch));
}

}  // namespace

const std::vector<std::string>& known_strategies() {
  static const std::vector<std::string> names = {
      "rt",   "fscs",   "rrt",         "mcmc", "pbs", "tpbs", "vdc", "halton", "sobol",
      "mart", "fscs_forget", "dc", "hc",   "sa",  "ga",   "sr",  "ls",     "rbcvt",
  };
  return names;
}

GeneratorPtr make_generator(const GeneratorSpec& spec, const InputDomain& domain) {
  const std::string& s = spec.strategy;
  JsonReader r(spec.options, fmt::format("generator '{}'", spec.display_name()));

  if (s == "rt") {
    r.finish();
    return std::make_unique<RandomGenerator>(domain);
  }
  if (s == "fscs") {
    auto cfg = read_fscs(r);
    r.finish();
    return std::make_unique<stfcs::FscsGenerator>(domain, cfg);
  }
  if (s == "rrt") {
    stfcs::RrtConfig cfg;
    cfg.exclusion_ratio = r.number("exclusion_ratio", cfg.exclusion_ratio);
    cfg.max_attempts = r.count("max_attempts", cfg.max_attempts);
    r.finish();
    return std::make_unique<stfcs::RrtGenerator>(domain, cfg);
  }
  if (s == "mcmc") {
    stfcs::McmcConfig cfg;
    cfg.beta1 = r.optional_number("beta");
    const std::string proposal = r.text("proposal", "uniform");
    if (proposal == "uniform") {
      cfg.proposal = stfcs::McmcProposal::Uniform;
    } else if (proposal == "random_walk") {
      cfg.proposal = stfcs::McmcProposal::RandomWalk;
    } else {
      throw ConfigError(fmt::format("unknown MCMC proposal '{}'", proposal));
    }
    cfg.walk_step = r.number("walk_step", cfg.walk_step);
    cfg.max_proposals = r.count("max_proposals", cfg.max_proposals);
    r.finish();
    return std::make_unique<stfcs::McmcGenerator>(domain, cfg);
  }
  if (s == "pbs") {
    pbs::PartitionSchema schema;
    schema.kind = pbs::schema_kind_from_string(r.text("schema", "bisection_all_dims"));
    schema.per_dim = r.count("per_dim", schema.per_dim);
    pbs::SelectionCriterion criterion;
    criterion.kind = pbs::criterion_kind_from_string(r.text("criterion", "fewest_tests"));
    criterion.p1 = r.number("p1", criterion.p1);
    criterion.p2 = r.number("p2", criterion.p2);
    criterion.decay = r.number("decay", criterion.decay);
    r.finish();
    return std::make_unique<pbs::PbsGenerator>(domain, schema, criterion);
  }
  if (s == "tpbs") {
    tpbs::ProfileKind kind;
    kind.shape = tpbs::profile_shape_from_string(r.text("profile", "cosine"));
    kind.exponent = r.number("exponent", kind.exponent);
    const auto budget = r.count("rejection_budget", kDefaultRetryBudget);
    r.finish();
    return std::make_unique<tpbs::TpbsGenerator>(domain, kind, budget);
  }
  if (s == "vdc" || s == "halton" || s == "sobol") return make_qrs(s, r, domain);
  if (s == "mart") {
    std::vector<std::size_t> parts(domain.dims(), 2);
    if (const Json* p = r.raw("parts")) {
      if (!p->is_array()) throw ConfigError("mart 'parts' must be an array of counts");
      parts.clear();
      for (const auto& x : *p) {
        if (!x.is_number_unsigned()) throw ConfigError("mart 'parts' must be an array of counts");
        parts.push_back(x.get<std::size_t>());
      }
    }
    GeneratorSpec inner{"fscs", "", Json::object()};
    if (const Json* in = r.raw("inner")) inner = generator_from_json(*in, "mart inner generator");
    r.finish();
    hybrid::MirrorScheme scheme(domain, parts);
    auto source = make_generator(inner, scheme.source());
    return std::make_unique<hybrid::MartGenerator>(std::move(scheme), std::move(source));
  }
  if (s == "fscs_forget") {
    auto cfg = read_fscs(r);
    hybrid::ForgettingPolicy policy;
    policy.kind = hybrid::forgetting_kind_from_string(r.text("policy", "recent"));
    policy.lambda = r.count("lambda", policy.lambda);
    r.finish();
    return std::make_unique<hybrid::ForgettingFscsGenerator>(domain, cfg, policy);
  }
  if (s == "dc") {
    auto cfg = read_fscs(r);
    const auto quota = r.count("quota", 10);
    r.finish();
    return std::make_unique<hybrid::DivideAndConquerGenerator>(domain, cfg, quota);
  }
  if (s == "hc" || s == "sa" || s == "ga" || s == "sr" || s == "ls" || s == "rbcvt") {
    return make_search(s, r, domain);
  }
  throw ConfigError(fmt::format("unknown strategy '{}'; known: {}", s,
                                fmt::join(known_strategies(), ", ")));
}

simlab::GeneratorFactory make_factory(const GeneratorSpec& spec, const InputDomain& domain) {
  make_generator(spec, domain);
  return [spec, domain] { return make_generator(spec, domain); };
}

}  // namespace artkit::cli
