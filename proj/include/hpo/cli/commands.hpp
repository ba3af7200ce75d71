#pragma once

#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "hpo/cli/run_config.hpp"
#include "hpo/data/metrics.hpp"
#include "hpo/nested/nested.hpp"

namespace hpo {

// Everything a run needs, built from a validated config. Dataset tasks fill
// data/learner/plan; synthetic tasks only the objective.
struct Problem {
  std::shared_ptr<const Objective> objective;
  std::optional<Dataset> data;
  LearnerPtr learner;
  std::optional<SearchSpace> space;
  std::optional<Metric> metric;
  ResamplingPlan plan;
};

/// Data seed derive_seed(seed, 6), resampling plan derive_seed(seed, 5).
/// Mismatches between task, learner, metric and space throw ConfigError.
Problem build_problem(const RunConfig& rc);
ExecPolicy make_policy(const RunConfig& rc, JobLog* log = nullptr);
/// Config as recorded in output documents: without workers, level and out.
nlohmann::json config_record(const RunConfig& rc);

struct TuneArtifacts {
  Archive archive;
  TuningResult result;
  nlohmann::json summary;
  std::string space_json;
};

/// Writes archive.jsonl, archive.csv, trace.csv, space.json, summary.json and
/// timing.json into rc.out. Nothing is written unless the run completes.
TuneArtifacts cmd_tune(const RunConfig& rc, std::ostream& log);

/// Writes nested_report.json, nested_report.txt, inner_<i>.jsonl and timing.json.
NestedReport cmd_nested(const RunConfig& rc, std::ostream& log);

/// Writes benchmark.json, benchmark.txt, traces/<label>_seed<s>.csv and timing.json.
nlohmann::json cmd_benchmark(const BenchmarkConfig& bc, std::ostream& log);

/// Summarizes an archive (a .jsonl file or a run directory holding archive.jsonl).
/// Writes report.txt and report.json into out_dir when given.
nlohmann::json cmd_report(const std::string& path, const std::optional<std::string>& out_dir, std::ostream& log);

/// Incumbent summary of an archive; scores are losses, plus metric-scale values when a metric is known.
nlohmann::json archive_summary(const Archive& archive, std::size_t best_index, const std::optional<Metric>& metric);
std::string archive_summary_text(const nlohmann::json& summary);

/// Linear-interpolation quantile of the finite values; NaN when there are none.
double quantile(std::vector<double> values, double q);

}  // namespace hpo
