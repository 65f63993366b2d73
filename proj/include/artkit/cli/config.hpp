#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "artkit/core.hpp"
#include "artkit/simlab.hpp"

// Experiment configuration: a single JSON document, parsed strictly.
namespace artkit::cli {

using Json = nlohmann::json;

/// Reads typed fields from a JSON object and rejects keys nobody asked for.
class JsonReader {
 public:
  JsonReader(const Json& object, std::string where);

  bool has(const std::string& key) const;
  double number(const std::string& key, double fallback);
  std::optional<double> optional_number(const std::string& key);
  std::uint64_t count(const std::string& key, std::uint64_t fallback);
  std::optional<std::uint64_t> optional_count(const std::string& key);
  std::string text(const std::string& key, const std::string& fallback);
  bool flag(const std::string& key, bool fallback);
  const Json* raw(const std::string& key);

  /// Throws ConfigError naming the first unknown key.
  void finish() const;

 private:
  const Json& object_;
  std::string where_;
  std::set<std::string> used_;
};

struct GeneratorSpec {
  std::string strategy = "rt";
  std::string label;  // defaults to the strategy name
  Json options = Json::object();

  std::string display_name() const { return label.empty() ? strategy : label; }
  bool operator==(const GeneratorSpec&) const = default;
};

struct CampaignConfig {
  std::optional<std::uint64_t> runs;  // unset: chosen from a pilot
  std::uint64_t cap = simlab::kDefaultCap;
  std::uint64_t seed = 0;
  std::uint64_t m = 1;
  double z = 1.96;
  double r = 5.0;
  std::uint64_t pilot_runs = 200;
  std::uint64_t n = 100;  // test-set size for P, E and distribution metrics
  std::uint64_t subdomains = 1000;

  bool operator==(const CampaignConfig&) const = default;
};

inline const std::vector<std::string> kKnownMetrics = {
    "f_measure",  "f_time",    "p_measure",  "e_measure",        "discrepancy",
    "dispersion", "diversity", "divergence", "edge_center_ratio",
};

struct ExperimentConfig {
  std::vector<Interval> bounds = {Interval{}, Interval{}};
  std::vector<GeneratorSpec> generators = {GeneratorSpec{}};
  simlab::ProfileSpec profile;
  CampaignConfig campaign;
  std::vector<std::string> metrics = {"f_measure"};
  std::string output_dir = "artkit-out";

  InputDomain domain() const { return InputDomain(bounds); }
  void validate() const;
  bool operator==(const ExperimentConfig& other) const;
};

Json generator_to_json(const GeneratorSpec& spec);
GeneratorSpec generator_from_json(const Json& value, const std::string& where);

Json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const Json& value);

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize(const ExperimentConfig& config);

/// Parses "lo:hi,lo:hi,..." into bounds.
std::vector<Interval> parse_bounds(const std::string& text);

}  // namespace artkit::cli
