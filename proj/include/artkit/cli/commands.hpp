#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "artkit/cli/config.hpp"

namespace artkit::cli {

inline constexpr std::string_view kToolkitName = "artkit";
inline constexpr std::string_view kToolkitVersion = "1.0.0";

// Sub-stream tags used by the CLI beyond simlab's generation and placement.
inline constexpr std::uint64_t kMetricTag = 2;
inline constexpr std::uint64_t kSubdomainTag = 3;

struct GenerateRequest {
  GeneratorSpec generator;
  std::vector<Interval> bounds = {Interval{}, Interval{}};
  std::uint64_t n = 10;
  std::uint64_t seed = 0;
  bool header = true;
};

/// Writes n tests as CSV rows, one coordinate per column. The tests come from
/// sub-stream (seed, 0) of the generation tag.
void cmd_generate(const GenerateRequest& request, std::ostream& out);

struct RunOptions {
  std::size_t jobs = 1;
  std::optional<std::string> output_dir;  // overrides the config's output.dir
  std::ostream* log = nullptr;            // warnings, when set
};

/// Runs the campaign of every configured generator and writes runs.csv,
/// metrics.csv, summary.csv, report.json and, with two or more generators,
/// comparisons.csv (each generator against the first). The summary table is
/// also written to `out`. Returns the report.
Json cmd_simulate(const ExperimentConfig& config, const RunOptions& options, std::ostream& out);

/// As cmd_simulate but requires at least two generators and writes the
/// comparison table to `out`.
Json cmd_compare(const ExperimentConfig& config, const RunOptions& options, std::ostream& out);

inline const std::vector<std::string> kPointMetrics = {
    "discrepancy", "dispersion", "diversity", "divergence", "edge_center_ratio",
};

/// Reads a CSV point set: one test per row, comma-separated coordinates,
/// optional header row and '#' comment lines. Throws ConfigError naming the
/// offending line.
std::vector<TestCase> parse_points(std::istream& in);

struct MetricsRequest {
  std::vector<std::string> metrics = {"dispersion"};
  std::optional<std::vector<Interval>> bounds;  // unit cube when unset
  std::uint64_t subdomains = 1000;
  std::uint64_t seed = 0;
};

/// Computes the requested metrics on a point set and writes "metric,value"
/// rows.
void cmd_metrics(const MetricsRequest& request, std::istream& points, std::ostream& out);

}  // namespace artkit::cli
