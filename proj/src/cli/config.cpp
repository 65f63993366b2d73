#include "artkit/cli/config.hpp"

#include "artkit/cli/factory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace artkit::cli {

JsonReader::JsonReader(const Json& object, std::string where)
    : object_(object), where_(std::move(where)) {
  if (!object_.is_object()) throw ConfigError(fmt::format("{} must be a JSON object", where_));
}

bool JsonReader::has(const std::string& key) const { return object_.contains(key); }

const Json* JsonReader::raw(const std::string& key) {
  used_.insert(key);
  const auto it = object_.find(key);
  return it == object_.end() ? nullptr : &*it;
}

std::optional<double> JsonReader::optional_number(const std::string& key) {
  const Json* v = raw(key);
  if (!v) return std::nullopt;
  if (!v->is_number()) throw ConfigError(fmt::format("{}.{} must be a number", where_, key));
  return v->get<double>();
}

double JsonReader::number(const std::string& key, double fallback) {
  return optional_number(key).value_or(fallback);
}

std::optional<std::uint64_t> JsonReader::optional_count(const std::string& key) {
  const Json* v = raw(key);
  if (!v) return std::nullopt;
  if (v->is_number_unsigned()) return v->get<std::uint64_t>();
  if (v->is_number_float()) {
    const double x = v->get<double>();
    if (x >= 0.0 && x == std::floor(x) && x < 1.8e19) return static_cast<std::uint64_t>(x);
  }
  throw ConfigError(fmt::format("{}.{} must be a non-negative integer", where_, key));
}

std::uint64_t JsonReader::count(const std::string& key, std::uint64_t fallback) {
  return optional_count(key).value_or(fallback);
}

std::string JsonReader::text(const std::string& key, const std::string& fallback) {
  const Json* v = raw(key);
  if (!v) return fallback;
  if (!v->is_string()) throw ConfigError(fmt::format("{}.{} must be a string", where_, key));
  return v->get<std::string>();
}

bool JsonReader::flag(const std::string& key, bool fallback) {
  const Json* v = raw(key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ConfigError(fmt::format("{}.{} must be true or false", where_, key));
  return v->get<bool>();
}

void JsonReader::finish() const {
  for (const auto& [key, value] : object_.items()) {
    if (!used_.count(key)) throw ConfigError(fmt::format("unknown key '{}' in {}", key, where_));
  }
}

Json generator_to_json(const GeneratorSpec& spec) {
  Json out = spec.options;
  out["strategy"] = spec.strategy;
  if (!spec.label.empty()) out["label"] = spec.label;
  return out;
}

GeneratorSpec generator_from_json(const Json& value, const std::string& where) {
  if (!value.is_object()) throw ConfigError(fmt::format("{} must be a JSON object", where));
  GeneratorSpec spec;
  spec.options = value;
  const auto take = [&](const char* key) -> std::string {
    const auto it = value.find(key);
    if (it == value.end()) return {};
    if (!it->is_string()) throw ConfigError(fmt::format("{}.{} must be a string", where, key));
    std::string s = it->get<std::string>();
    spec.options.erase(key);
    return s;
  };
  spec.strategy = take("strategy");
  if (spec.strategy.empty()) throw ConfigError(fmt::format("{} needs a 'strategy'", where));
  spec.label = take("label");
  return spec;
}

namespace {

Json bounds_to_json(const std::vector<Interval>& bounds) {
  Json out = Json::array();
  for (const auto& b : bounds) out.push_back(Json::array({b.lo, b.hi}));
  return out;
}

std::vector<Interval> bounds_from_json(const Json& value) {
  if (!value.is_array() || value.empty()) {
    throw ConfigError("domain.bounds must be a non-empty array of [lo, hi] pairs");
  }
  std::vector<Interval> out;
  for (std::size_t j = 0; j < value.size(); ++j) {
    const Json& pair = value[j];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
      throw ConfigError(fmt::format("domain.bounds[{}] must be a [lo, hi] pair of numbers", j));
    }
    out.push_back(Interval{pair[0].get<double>(), pair[1].get<double>()});
  }
  return out;
}

bool same_profile(const simlab::ProfileSpec& a, const simlab::ProfileSpec& b) {
  return a.theta == b.theta && a.pattern.kind == b.pattern.kind &&
         a.pattern.aspect == b.pattern.aspect && a.pattern.count == b.pattern.count &&
         a.pattern.q_percent == b.pattern.q_percent && a.replace_per_run == b.replace_per_run &&
         a.placement_seed == b.placement_seed;
}

}  // namespace

void ExperimentConfig::validate() const {
  const InputDomain d = domain();
  if (generators.empty()) throw ConfigError("at least one generator is required");
  std::set<std::string> labels;
  for (const auto& g : generators) {
    if (!labels.insert(g.display_name()).second) {
      throw ConfigError(fmt::format("duplicate generator label '{}'; set distinct 'label's",
                                    g.display_name()));
    }
  }
  if (!(profile.theta > 0.0 && profile.theta < 1.0)) {
    throw ConfigError("profile.theta must lie in (0, 1)");
  }
  profile.pattern.validate();
  if (campaign.runs && *campaign.runs < 1) throw ConfigError("campaign.runs must be >= 1");
  if (campaign.cap < 1) throw ConfigError("campaign.cap must be >= 1");
  if (campaign.m < 1) throw ConfigError("campaign.m must be >= 1");
  if (!(campaign.z > 0.0)) throw ConfigError("campaign.z must be > 0");
  if (!(campaign.r > 0.0)) throw ConfigError("campaign.r must be > 0");
  if (campaign.pilot_runs < 2) throw ConfigError("campaign.pilot_runs must be >= 2");
  if (campaign.subdomains < 1) throw ConfigError("campaign.subdomains must be >= 1");
  if (metrics.empty()) throw ConfigError("metrics must name at least one metric");
  for (const auto& m : metrics) {
    if (std::find(kKnownMetrics.begin(), kKnownMetrics.end(), m) == kKnownMetrics.end()) {
      throw ConfigError(fmt::format("unknown metric '{}'", m));
    }
    const bool set_metric = m != "f_measure" && m != "f_time";
    if (set_metric && campaign.n < 1) throw ConfigError("campaign.n must be >= 1");
    if ((m == "dispersion" || m == "diversity" || m == "divergence") && campaign.n < 2) {
      throw ConfigError(fmt::format("metric '{}' needs campaign.n >= 2", m));
    }
  }
  if (output_dir.empty()) throw ConfigError("output.dir must not be empty");
  for (const auto& g : generators) make_generator(g, d);
}

bool ExperimentConfig::operator==(const ExperimentConfig& other) const {
  return bounds.size() == other.bounds.size() &&
         std::equal(bounds.begin(), bounds.end(), other.bounds.begin(),
                    [](const Interval& a, const Interval& b) { return a.lo == b.lo && a.hi == b.hi; }) &&
         generators == other.generators && same_profile(profile, other.profile) &&
         campaign == other.campaign && metrics == other.metrics && output_dir == other.output_dir;
}

Json to_json(const ExperimentConfig& c) {
  Json out;
  out["domain"] = {{"bounds", bounds_to_json(c.bounds)}};
  out["generators"] = Json::array();
  for (const auto& g : c.generators) out["generators"].push_back(generator_to_json(g));
  out["profile"] = {
      {"theta", c.profile.theta},
      {"pattern", std::string(simlab::to_string(c.profile.pattern.kind))},
      {"aspect", c.profile.pattern.aspect},
      {"count", c.profile.pattern.count},
      {"q_percent", c.profile.pattern.q_percent},
      {"replace_per_run", c.profile.replace_per_run},
      {"placement_seed", c.profile.placement_seed},
  };
  Json campaign = {
      {"cap", c.campaign.cap},         {"seed", c.campaign.seed},
      {"m", c.campaign.m},             {"z", c.campaign.z},
      {"r", c.campaign.r},             {"pilot_runs", c.campaign.pilot_runs},
      {"n", c.campaign.n},             {"subdomains", c.campaign.subdomains},
  };
  if (c.campaign.runs) {
    campaign["runs"] = *c.campaign.runs;
  } else {
    campaign["runs"] = "auto";
  }
  out["campaign"] = campaign;
  out["metrics"] = c.metrics;
  out["output"] = {{"dir", c.output_dir}};
  return out;
}

ExperimentConfig config_from_json(const Json& value) {
  ExperimentConfig c;
  JsonReader top(value, "config");

  if (const Json* dom = top.raw("domain")) {
    JsonReader r(*dom, "domain");
    const auto d = r.optional_count("d");
    if (const Json* b = r.raw("bounds")) {
      c.bounds = bounds_from_json(*b);
      if (d && *d != c.bounds.size()) {
        throw ConfigError(fmt::format("domain.d = {} disagrees with {} bounds", *d, c.bounds.size()));
      }
    } else if (d) {
      if (*d < 1) throw ConfigError("domain.d must be >= 1");
      c.bounds.assign(*d, Interval{});
    }
    r.finish();
  }

  if (const Json* gens = top.raw("generators")) {
    if (!gens->is_array()) throw ConfigError("generators must be an array");
    c.generators.clear();
    for (std::size_t i = 0; i < gens->size(); ++i) {
      c.generators.push_back(generator_from_json((*gens)[i], fmt::format("generators[{}]", i)));
    }
  }

  if (const Json* prof = top.raw("profile")) {
    JsonReader r(*prof, "profile");
    c.profile.theta = r.number("theta", c.profile.theta);
    c.profile.pattern.kind = simlab::pattern_kind_from_string(
        r.text("pattern", std::string(simlab::to_string(c.profile.pattern.kind))));
    c.profile.pattern.aspect = r.number("aspect", c.profile.pattern.aspect);
    c.profile.pattern.count = r.count("count", c.profile.pattern.count);
    c.profile.pattern.q_percent = r.number("q_percent", c.profile.pattern.q_percent);
    c.profile.replace_per_run = r.flag("replace_per_run", c.profile.replace_per_run);
    c.profile.placement_seed = r.count("placement_seed", c.profile.placement_seed);
    r.finish();
  }

  if (const Json* camp = top.raw("campaign")) {
    JsonReader r(*camp, "campaign");
    if (const Json* runs = r.raw("runs")) {
      if (runs->is_string()) {
        if (runs->get<std::string>() != "auto") {
          throw ConfigError("campaign.runs must be a positive integer or \"auto\"");
        }
        c.campaign.runs.reset();
      } else {
        c.campaign.runs = r.optional_count("runs");
      }
    }
    c.campaign.cap = r.count("cap", c.campaign.cap);
    c.campaign.seed = r.count("seed", c.campaign.seed);
    c.campaign.m = r.count("m", c.campaign.m);
    c.campaign.z = r.number("z", c.campaign.z);
    c.campaign.r = r.number("r", c.campaign.r);
    c.campaign.pilot_runs = r.count("pilot_runs", c.campaign.pilot_runs);
    c.campaign.n = r.count("n", c.campaign.n);
    c.campaign.subdomains = r.count("subdomains", c.campaign.subdomains);
    r.finish();
  }

  if (const Json* metrics = top.raw("metrics")) {
    if (!metrics->is_array()) throw ConfigError("metrics must be an array of names");
    c.metrics.clear();
    for (const auto& m : *metrics) {
      if (!m.is_string()) throw ConfigError("metrics must be an array of names");
      c.metrics.push_back(m.get<std::string>());
    }
  }

  if (const Json* out = top.raw("output")) {
    JsonReader r(*out, "output");
    c.output_dir = r.text("dir", c.output_dir);
    r.finish();
  }

  top.finish();
  c.validate();
  return c;
}

ExperimentConfig parse_config_text(const std::string& text) {
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
  }
  return config_from_json(value);
}

ExperimentConfig parse_config(std::istream& in) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  return parse_config(in);
}

std::string serialize(const ExperimentConfig& config) { return to_json(config).dump(2) + "\n"; }

std::vector<Interval> parse_bounds(const std::string& text) {
  std::vector<Interval> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError(fmt::format("bound '{}' must look like lo:hi", item));
    }
    try {
      std::size_t used = 0;
      const std::string lo = item.substr(0, colon);
      const std::string hi = item.substr(colon + 1);
      Interval iv{std::stod(lo, &used), 0.0};
      if (used != lo.size()) throw std::invalid_argument(lo);
      iv.hi = std::stod(hi, &used);
      if (used != hi.size()) throw std::invalid_argument(hi);
      out.push_back(iv);
    } catch (const std::logic_error&) {
      throw ConfigError(fmt::format("bound '{}' must look like lo:hi", item));
    }
  }
  if (out.empty()) throw ConfigError("bounds must list at least one lo:hi pair");
  InputDomain{out};  // throws on empty or inverted intervals
  return out;
}

}  // namespace artkit::cli
