#include "artkit/cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "artkit/cli/factory.hpp"
#include "artkit/metrics.hpp"
#include "artkit/simlab.hpp"
#include "artkit/statistics.hpp"

namespace artkit::cli {

using simlab::format_double;

void cmd_generate(const GenerateRequest& request, std::ostream& out) {
  const InputDomain domain(request.bounds);
  auto generator = make_generator(request.generator, domain);
  RngStream rng = RngStream::derive(request.seed, 0, simlab::kGenerationTag);
  if (request.header) {
    for (std::size_t j = 0; j < domain.dims(); ++j) out << (j ? ",x" : "x") << j;
    out << '\n';
  }
  for (std::uint64_t i = 0; i < request.n; ++i) {
    const TestCase tc = generator->next(rng);
    for (std::size_t j = 0; j < tc.dims(); ++j) out << (j ? "," : "") << format_double(tc[j]);
    out << '\n';
  }
}

namespace {

bool lower_is_better(const std::string& metric) {
  return metric == "f_measure" || metric == "f_time" || metric == "discrepancy" ||
         metric == "dispersion" || metric == "edge_center_ratio";
}

bool contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

struct MetricSeries {
  std::vector<double> values;    // one per run, used by the rank tests
  std::vector<double> summary;   // the values the mean is taken over
};

struct GeneratorResult {
  std::string label;
  std::string strategy;
  std::vector<simlab::RunRecord> records;
  std::size_t censored = 0;
  std::map<std::string, MetricSeries> metrics;
  std::vector<std::string> warnings;
};

std::optional<simlab::Summary> summary_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return simlab::summarize(v);
}

Json summary_json(const std::optional<simlab::Summary>& s) {
  if (!s) return Json{{"count", 0}, {"mean", nullptr}, {"sd", nullptr}};
  return Json{{"count", s->count},
              {"mean", number_or_null(s->mean)},
              {"sd", number_or_null(s->sd)},
              {"ci_low", number_or_null(s->ci_low)},
              {"ci_high", number_or_null(s->ci_high)},
              {"ci_level", s->ci_level}};
}

std::uint64_t choose_runs(const ExperimentConfig& cfg, const InputDomain& domain,
                          const std::vector<simlab::GeneratorFactory>& factories,
                          std::size_t jobs, Json& pilot_report) {
  if (cfg.campaign.runs) return *cfg.campaign.runs;
  simlab::CampaignSpec pilot;
  pilot.runs = cfg.campaign.pilot_runs;
  pilot.cap = cfg.campaign.cap;
  pilot.master_seed = cfg.campaign.seed;
  pilot.m = cfg.campaign.m;
  pilot.jobs = jobs;
  std::uint64_t runs = 1;
  pilot_report = Json::array();
  for (std::size_t g = 0; g < factories.size(); ++g) {
    const auto records = simlab::run_campaign(factories[g], domain, cfg.profile, pilot);
    std::vector<double> f;
    for (const auto& r : records) {
      if (!r.censored) f.push_back(static_cast<double>(r.f_count));
    }
    if (f.size() < 2) {
      throw ConfigError(fmt::format(
          "pilot of generator '{}' is censored in {} of {} runs; raise campaign.cap or set "
          "campaign.runs",
          cfg.generators[g].display_name(), records.size() - f.size(), records.size()));
    }
    const auto s = simlab::summarize(f);
    const auto need = simlab::required_runs(cfg.campaign.z, s.sd, s.mean, cfg.campaign.r);
    pilot_report.push_back(Json{{"generator", cfg.generators[g].display_name()},
                                {"runs", cfg.campaign.pilot_runs},
                                {"mean", s.mean},
                                {"sd", s.sd},
                                {"required_runs", need}});
    runs = std::max(runs, need);
  }
  return runs;
}

GeneratorResult run_generator(const ExperimentConfig& cfg, const GeneratorSpec& spec,
                              const InputDomain& domain, const simlab::GeneratorFactory& factory,
                              std::uint64_t runs, std::size_t jobs) {
  GeneratorResult res;
  res.label = spec.display_name();
  res.strategy = spec.strategy;
  const auto& wanted = cfg.metrics;

  simlab::CampaignSpec campaign;
  campaign.runs = runs;
  campaign.cap = cfg.campaign.cap;
  campaign.master_seed = cfg.campaign.seed;
  campaign.m = cfg.campaign.m;
  campaign.jobs = jobs;
  campaign.record_time = contains(wanted, "f_time");
  res.records = simlab::run_campaign(factory, domain, cfg.profile, campaign);

  auto& f = res.metrics["f_measure"];
  for (const auto& r : res.records) {
    f.values.push_back(static_cast<double>(r.f_count));
    if (r.censored) {
      ++res.censored;
    } else {
      f.summary.push_back(static_cast<double>(r.f_count));
    }
    if (campaign.record_time) {
      auto& t = res.metrics["f_time"];
      t.values.push_back(static_cast<double>(r.f_time_ns));
      if (!r.censored) t.summary.push_back(static_cast<double>(r.f_time_ns));
    }
  }
  if (2 * res.censored > res.records.size()) {
    res.warnings.push_back(fmt::format(
        "{} of {} runs were censored at cap {}; mean F-count covers uncensored runs only",
        res.censored, res.records.size(), cfg.campaign.cap));
  }

  if (contains(wanted, "p_measure") || contains(wanted, "e_measure")) {
    const auto counts = simlab::failure_counts(factory, domain, cfg.profile, cfg.campaign.n, runs,
                                               cfg.campaign.seed, jobs);
    for (auto c : counts) {
      if (contains(wanted, "p_measure")) res.metrics["p_measure"].values.push_back(c > 0 ? 1.0 : 0.0);
      if (contains(wanted, "e_measure")) res.metrics["e_measure"].values.push_back(static_cast<double>(c));
    }
  }

  std::vector<std::string> point_metrics;
  for (const auto& m : wanted) {
    if (contains(kPointMetrics, m)) point_metrics.push_back(m);
  }
  if (!point_metrics.empty()) {
    std::vector<std::vector<double>> table(point_metrics.size(), std::vector<double>(runs));
    simlab::for_each_run(runs, jobs, factory, [&](std::size_t run, Generator& gen) {
      RngStream rng = RngStream::derive(cfg.campaign.seed, run, kMetricTag);
      std::vector<TestCase> tests;
      tests.reserve(cfg.campaign.n);
      for (std::uint64_t i = 0; i < cfg.campaign.n; ++i) tests.push_back(gen.next(rng));
      for (std::size_t k = 0; k < point_metrics.size(); ++k) {
        const auto& m = point_metrics[k];
        double v = 0.0;
        if (m == "discrepancy") {
          RngStream sub = RngStream::derive(cfg.campaign.seed, run, kSubdomainTag);
          v = metrics::discrepancy(tests, domain, cfg.campaign.subdomains, sub);
        } else if (m == "dispersion") {
          v = metrics::dispersion(tests);
        } else if (m == "diversity") {
          v = metrics::diversity(tests);
        } else if (m == "divergence") {
          v = metrics::divergence(tests);
        } else {
          v = metrics::edge_center_ratio(tests, domain);
        }
        table[k][run] = v;
      }
    });
    for (std::size_t k = 0; k < point_metrics.size(); ++k) {
      res.metrics[point_metrics[k]].values = std::move(table[k]);
    }
  }
  for (auto& [name, series] : res.metrics) {
    if (name != "f_measure" && name != "f_time") {
      for (double v : series.values) {
        if (std::isfinite(v)) series.summary.push_back(v);
      }
    }
  }
  return res;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  out << text;
}

std::string field(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

struct Outcome {
  Json report;
  std::string summary_csv;
  std::string comparison_csv;
};

Outcome run_experiment(const ExperimentConfig& cfg, const RunOptions& options,
                       std::string_view command) {
  cfg.validate();
  const InputDomain domain = cfg.domain();
  const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
  std::vector<simlab::GeneratorFactory> factories;
  for (const auto& g : cfg.generators) factories.push_back(make_factory(g, domain));

  Json pilot = nullptr;
  const std::uint64_t runs = choose_runs(cfg, domain, factories, jobs, pilot);

  std::vector<GeneratorResult> results;
  for (std::size_t g = 0; g < factories.size(); ++g) {
    results.push_back(run_generator(cfg, cfg.generators[g], domain, factories[g], runs, jobs));
    if (options.log) {
      for (const auto& w : results.back().warnings) {
        *options.log << "warning: " << results.back().label << ": " << w << '\n';
      }
    }
  }

  Outcome out;
  Json& report = out.report;
  report["toolkit"] = kToolkitName;
  report["version"] = kToolkitVersion;
  report["command"] = command;
  report["seed"] = cfg.campaign.seed;
  report["config"] = to_json(cfg);
  report["runs"] = runs;
  report["runs_source"] = cfg.campaign.runs ? "config" : "pilot";
  report["pilot"] = pilot;

  std::ostringstream runs_csv;
  std::ostringstream metrics_csv;
  std::ostringstream summary_csv;
  runs_csv << simlab::kRunsCsvHeader << '\n';
  metrics_csv << "run_index,generator,metric,value\n";
  summary_csv << "generator,metric,count,mean,sd,ci_low,ci_high,censored\n";

  report["generators"] = Json::array();
  std::vector<std::map<std::string, std::optional<simlab::Summary>>> summaries;
  for (const auto& res : results) {
    simlab::write_runs_csv(runs_csv, res.label, cfg.profile, domain.dims(), res.records, false);
    Json entry{{"label", res.label},
               {"strategy", res.strategy},
               {"runs", res.records.size()},
               {"censored", res.censored},
               {"warnings", res.warnings}};
    auto& sums = summaries.emplace_back();
    for (const auto& metric : cfg.metrics) {
      const auto& series = res.metrics.at(metric);
      for (std::size_t run = 0; run < series.values.size(); ++run) {
        metrics_csv << run << ',' << res.label << ',' << metric << ','
                    << format_double(series.values[run]) << '\n';
      }
      const auto s = summary_of(series.summary);
      sums[metric] = s;
      entry["metrics"][metric] = summary_json(s);
      summary_csv << res.label << ',' << metric << ',' << (s ? s->count : 0) << ','
                  << field(s ? std::optional(s->mean) : std::nullopt) << ','
                  << field(s ? std::optional(s->sd) : std::nullopt) << ','
                  << field(s ? std::optional(s->ci_low) : std::nullopt) << ','
                  << field(s ? std::optional(s->ci_high) : std::nullopt) << ','
                  << (metric == "f_measure" || metric == "f_time" ? res.censored : 0) << '\n';
    }
    report["generators"].push_back(entry);
  }

  std::ostringstream comparison_csv;
  comparison_csv << "baseline,candidate,metric,baseline_mean,candidate_mean,improvement_percent,"
                    "u,p_value,exact,a12\n";
  report["comparisons"] = Json::array();
  for (std::size_t g = 1; g < results.size(); ++g) {
    const auto& base = results.front();
    const auto& cand = results[g];
    Json block{{"baseline", base.label}, {"candidate", cand.label}};
    for (const auto& metric : cfg.metrics) {
      const auto& a = cand.metrics.at(metric).values;
      const auto& b = base.metrics.at(metric).values;
      const auto mw = simlab::mann_whitney_u(a, b);
      const double a12 = simlab::a12_effect_size(a, b);
      const auto& sb = summaries.front().at(metric);
      const auto& sc = summaries[g].at(metric);
      std::optional<double> improvement;
      if (sb && sc && sb->mean != 0.0) {
        improvement = simlab::improvement_percent(sb->mean, sc->mean, lower_is_better(metric));
      }
      block["metrics"][metric] = Json{
          {"baseline_mean", sb ? number_or_null(sb->mean) : Json(nullptr)},
          {"candidate_mean", sc ? number_or_null(sc->mean) : Json(nullptr)},
          {"improvement_percent", improvement ? number_or_null(*improvement) : Json(nullptr)},
          {"lower_is_better", lower_is_better(metric)},
          {"u", mw.u},
          {"p_value", mw.p_two_sided},
          {"exact", mw.exact},
          {"a12", a12},
      };
      comparison_csv << base.label << ',' << cand.label << ',' << metric << ','
                     << field(sb ? std::optional(sb->mean) : std::nullopt) << ','
                     << field(sc ? std::optional(sc->mean) : std::nullopt) << ','
                     << field(improvement) << ',' << format_double(mw.u) << ','
                     << format_double(mw.p_two_sided) << ',' << (mw.exact ? 1 : 0) << ','
                     << format_double(a12) << '\n';
    }
    report["comparisons"].push_back(block);
  }

  const std::filesystem::path dir = options.output_dir.value_or(cfg.output_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "runs.csv", runs_csv.str());
  write_file(dir / "metrics.csv", metrics_csv.str());
  write_file(dir / "summary.csv", summary_csv.str());
  write_file(dir / "report.json", report.dump(2) + "\n");
  if (results.size() > 1) write_file(dir / "comparisons.csv", comparison_csv.str());
  out.summary_csv = summary_csv.str();
  out.comparison_csv = comparison_csv.str();
  return out;
}

}  // namespace

Json cmd_simulate(const ExperimentConfig& config, const RunOptions& options, std::ostream& out) {
  auto outcome = run_experiment(config, options, "simulate");
  out << outcome.summary_csv;
  return std::move(outcome.report);
}

Json cmd_compare(const ExperimentConfig& config, const RunOptions& options, std::ostream& out) {
  if (config.generators.size() < 2) {
    throw ConfigError("compare needs at least two generators");
  }
  auto outcome = run_experiment(config, options, "compare");
  out << outcome.comparison_csv;
  return std::move(outcome.report);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::vector<TestCase> parse_points(std::istream& in) {
  std::vector<TestCase> points;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool seen_row = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = split(text);
    std::vector<double> coords;
    coords.reserve(fields.size());
    bool numeric = true;
    for (const auto& f : fields) {
      const auto v = parse_number(f);
      if (!v) {
        numeric = false;
        break;
      }
      coords.push_back(*v);
    }
    if (!numeric) {
      // A header is allowed only before the first data row.
      if (!seen_row && !parse_number(fields.front())) {
        seen_row = true;
        width = fields.size();
        continue;
      }
      throw ConfigError(fmt::format("line {}: expected {} comma-separated numbers, got '{}'",
                                    line_no, width ? width : fields.size(), text));
    }
    if (width == 0) width = coords.size();
    if (coords.size() != width) {
      throw ConfigError(
          fmt::format("line {}: expected {} columns, found {}", line_no, width, coords.size()));
    }
    seen_row = true;
    points.emplace_back(std::move(coords));
  }
  if (points.empty()) throw ConfigError("point file contains no rows");
  return points;
}

void cmd_metrics(const MetricsRequest& request, std::istream& points_in, std::ostream& out) {
  if (request.metrics.empty()) throw ConfigError("name at least one metric");
  for (const auto& m : request.metrics) {
    if (!contains(kPointMetrics, m)) {
      throw ConfigError(fmt::format("unknown metric '{}'; known: {}", m,
                                    fmt::join(kPointMetrics, ", ")));
    }
  }
  const auto points = parse_points(points_in);
  const std::size_t d = points.front().dims();
  const InputDomain domain =
      request.bounds ? InputDomain(*request.bounds) : InputDomain::unit(d);
  if (domain.dims() != d) {
    throw ConfigError(fmt::format("points have {} columns but the domain has {} dimensions", d,
                                  domain.dims()));
  }
  std::ostringstream buffer;
  buffer << "metric,value\n";
  for (const auto& m : request.metrics) {
    double v = 0.0;
    if (m == "discrepancy") {
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (!domain.contains(points[i])) {
          throw ConfigError(fmt::format("point {} lies outside the domain", i + 1));
        }
      }
      RngStream rng(request.seed);
      v = metrics::discrepancy(points, domain, request.subdomains, rng);
    } else if (m == "dispersion" || m == "diversity") {
      if (points.size() < 2) {
        throw ConfigError(fmt::format("{} needs at least two points; the file has one", m));
      }
      v = m == "dispersion" ? metrics::dispersion(points) : metrics::diversity(points);
    } else if (m == "divergence") {
      v = metrics::divergence(points);
    } else {
      v = metrics::edge_center_ratio(points, domain);
    }
    buffer << m << ',' << format_double(v) << '\n';
  }
  out << buffer.str();
}

}  // namespace artkit::cli
