#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "artkit/cli/commands.hpp"
#include "artkit/cli/config.hpp"
#include "artkit/core.hpp"

namespace {

using artkit::ConfigError;
using namespace artkit::cli;

constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("ARTKIT_SEED");
  if (!raw || !*raw) return std::nullopt;
  try {
    std::size_t used = 0;
    const std::string text(raw);
    if (text.front() == '-') throw std::invalid_argument(text);
    const auto v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError(fmt::format("ARTKIT_SEED='{}' is not a non-negative integer", raw));
  }
}

Json option_value(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error&) {
    return Json(text);
  }
}

std::size_t default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"artkit: adaptive random testing toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolkitVersion));

  // generate
  auto* gen = app.add_subcommand("generate", "Emit test cases from one strategy as CSV");
  std::string strategy = "rt";
  std::size_t dims = 2;
  std::string bounds_text;
  std::uint64_t n = 10;
  std::optional<std::uint64_t> seed_flag;
  std::vector<std::string> settings;
  std::string generator_json;
  std::string gen_config;
  std::string gen_output;
  bool no_header = false;
  gen->add_option("--strategy", strategy, "Generation strategy");
  gen->add_option("--d", dims, "Number of dimensions (unit cube)")->check(CLI::PositiveNumber);
  gen->add_option("--bounds", bounds_text, "Domain as lo:hi,lo:hi,...");
  gen->add_option("--n", n, "Number of test cases");
  gen->add_option("--seed", seed_flag, "Master seed");
  gen->add_option("--set", settings, "Strategy option key=value (value parsed as JSON)");
  gen->add_option("--generator", generator_json, "Generator spec as a JSON object");
  gen->add_option("--config", gen_config, "Take domain and first generator from a config file");
  gen->add_option("--output", gen_output, "Write to a file instead of standard output");
  gen->add_flag("--no-header", no_header, "Omit the header row");

  // simulate and compare share their flags
  struct RunFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::size_t jobs = default_jobs();
    std::string output_dir;
    std::optional<std::uint64_t> runs;
  };
  RunFlags sim_flags;
  RunFlags cmp_flags;
  auto add_run_flags = [](CLI::App* cmd, RunFlags& f) {
    cmd->add_option("--config", f.config, "Experiment config (JSON)")->required();
    cmd->add_option("--seed", f.seed, "Master seed (overrides config and ARTKIT_SEED)");
    cmd->add_option("--jobs", f.jobs, "Parallel replications")->check(CLI::PositiveNumber);
    cmd->add_option("--output-dir", f.output_dir, "Directory for output files");
    cmd->add_option("--runs", f.runs, "Replications per generator (overrides config)");
  };
  auto* sim = app.add_subcommand("simulate", "Run F-measure campaigns and write a report");
  add_run_flags(sim, sim_flags);
  auto* cmp = app.add_subcommand("compare", "Compare two or more generators on paired campaigns");
  add_run_flags(cmp, cmp_flags);

  // metrics
  auto* met = app.add_subcommand("metrics", "Compute distribution metrics of a point set");
  std::string points_path;
  std::vector<std::string> metric_names;
  std::string met_bounds;
  std::uint64_t subdomains = 1000;
  std::uint64_t met_seed = 0;
  met->add_option("--points", points_path, "CSV point file, '-' for standard input")->required();
  met->add_option("--metric", metric_names, "Metric name (repeatable)")
      ->required()
      ->delimiter(',');
  met->add_option("--bounds", met_bounds, "Domain as lo:hi,lo:hi,... (unit cube by default)");
  met->add_option("--subdomains", subdomains, "Random subdomains for discrepancy");
  met->add_option("--seed", met_seed, "Seed of the discrepancy subdomains");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (gen->parsed()) {
      GenerateRequest req;
      if (!gen_config.empty()) {
        const auto cfg = load_config(gen_config);
        req.bounds = cfg.bounds;
        req.generator = cfg.generators.front();
        req.seed = cfg.campaign.seed;
      } else {
        req.bounds = bounds_text.empty() ? std::vector<artkit::Interval>(dims, artkit::Interval{})
                                         : parse_bounds(bounds_text);
        if (!bounds_text.empty() && gen->count("--d") && req.bounds.size() != dims) {
          throw ConfigError("--d disagrees with the number of --bounds");
        }
        req.generator.strategy = strategy;
      }
      if (!generator_json.empty()) {
        Json parsed;
        try {
          parsed = Json::parse(generator_json);
        } catch (const Json::parse_error& e) {
          throw ConfigError(fmt::format("--generator is not valid JSON: {}", e.what()));
        }
        req.generator = generator_from_json(parsed, "--generator");
      }
      for (const auto& kv : settings) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
          throw ConfigError(fmt::format("--set '{}' must look like key=value", kv));
        }
        req.generator.options[kv.substr(0, eq)] = option_value(kv.substr(eq + 1));
      }
      if (auto s = env_seed()) req.seed = *s;
      if (seed_flag) req.seed = *seed_flag;
      req.n = n;
      req.header = !no_header;
      if (gen_output.empty()) {
        cmd_generate(req, std::cout);
      } else {
        std::ofstream out(gen_output, std::ios::binary);
        if (!out) throw ConfigError(fmt::format("cannot write '{}'", gen_output));
        cmd_generate(req, out);
      }
      return 0;
    }

    if (sim->parsed() || cmp->parsed()) {
      const RunFlags& f = sim->parsed() ? sim_flags : cmp_flags;
      auto cfg = load_config(f.config);
      if (auto s = env_seed()) cfg.campaign.seed = *s;
      if (f.seed) cfg.campaign.seed = *f.seed;
      if (f.runs) cfg.campaign.runs = *f.runs;
      RunOptions opts;
      opts.jobs = f.jobs;
      if (!f.output_dir.empty()) opts.output_dir = f.output_dir;
      opts.log = &std::cerr;
      if (sim->parsed()) {
        cmd_simulate(cfg, opts, std::cout);
      } else {
        cmd_compare(cfg, opts, std::cout);
      }
      return 0;
    }

    if (met->parsed()) {
      MetricsRequest req;
      req.metrics = metric_names;
      if (!met_bounds.empty()) req.bounds = parse_bounds(met_bounds);
      req.subdomains = subdomains;
      req.seed = met_seed;
      if (points_path == "-") {
        cmd_metrics(req, std::cin, std::cout);
      } else {
        std::ifstream in(points_path);
        if (!in) throw ConfigError(fmt::format("cannot open point file '{}'", points_path));
        cmd_metrics(req, in, std::cout);
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const artkit::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
