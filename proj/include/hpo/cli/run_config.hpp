#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpo/core/parallel.hpp"
#include "hpo/data/dataset.hpp"
#include "hpo/data/resampling.hpp"
#include "hpo/objective/objective.hpp"
#include "hpo/tuners/driver.hpp"

namespace hpo {

// Run configuration document (JSON). Fields, with defaults:
//   seed         integer, required (may come from --seed instead)
//   task         {"dataset": "<bundled name>"} | {"csv": "<path>", "target": "<column>", "type": "classification"}
//                | {"synthetic": "sphere|branin|low_effective_dim", "dim": 2, "noise_sd": 0, "folds": 1}
//   learner      registry id, required for dataset tasks ("knn", "pipe:impute+knn", "branch:knn|cart", ...)
//   space        space document; default the learner's (or synthetic function's) full space
//   tuner        {"kind": "random|grid|es|bo|hyperband|racing", ...constants}
//   resampling   {"kind": "cv|holdout", "folds": 3, "repeats": 1, "train_fraction": 0.667, "stratify": false}
//   outer        same shape, nested runs only; default cv with 3 folds
//   metric       metric id; default "ce" for classification, "mse" for regression
//   termination  {"max_evals", "max_fidelity", "max_wall", "target", "stagnation": {"window", "delta"}, "ei_threshold"}
//   fidelity     {"lower", "upper"} training-subsample fidelity units (needed by hyperband)
//   workers      1;  level  "config" (outer|batch|config|fold|combined)
//   out          output directory, default "hpo_out"
//   final_tuning false (nested runs)
//   failure_penalty, cost  optional

struct TaskConfig {
  enum class Kind { bundled, csv, synthetic };
  Kind kind = Kind::bundled;
  std::string name;  // bundled dataset or synthetic function
  std::string path, target;
  std::optional<TaskType> type;
  std::size_t dim = 2;
  double noise_sd = 0.0;
  std::size_t folds = 1;
};

struct RunConfig {
  std::uint64_t seed = 0;
  TaskConfig task;
  std::string learner;
  std::optional<nlohmann::json> space;
  TunerSpec tuner;
  ResamplingSpec resampling = ResamplingSpec::cv(3);
  ResamplingSpec outer = ResamplingSpec::cv(3);
  std::optional<std::string> metric;
  Termination termination;
  std::optional<FidelitySpec> fidelity;
  int workers = 1;
  ParallelLevel level = ParallelLevel::config;
  std::string out = "hpo_out";
  bool final_tuning = false;
  std::optional<double> failure_penalty;
  std::vector<double> cost;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<ParallelLevel> level;
  std::optional<std::string> out;
};

/// Validates the whole document before anything runs; ConfigError carries a JSON pointer.
RunConfig parse_run_config(const nlohmann::json& doc, const Overrides& ov = {});
nlohmann::json run_config_to_json(const RunConfig& rc);

ResamplingSpec resampling_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json resampling_to_json(const ResamplingSpec& r);
Termination termination_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json termination_to_json(const Termination& t);

/// Benchmark suite: a task plus >= 2 tuners sharing one budget.
//   seed, task, learner, space, resampling, metric, fidelity, workers, level, out as above
//   tuners       [{"kind": ..., "label": optional, "budget": optional, must equal the suite budget}, ...]
//   budget       {"max_evals" | "max_fidelity" | "max_wall": value}
//   seeds        number of paired seeds, default 10
//   checkpoints  budget values at which best-so-far is summarized; default quarters of the budget
struct BenchmarkConfig {
  RunConfig base;  // tuner and termination unused
  std::vector<TunerSpec> tuners;
  std::vector<std::string> labels;  // unique; default kind, suffixed when repeated
  Termination budget;
  std::size_t seeds = 10;
  std::vector<double> checkpoints;
};

BenchmarkConfig parse_benchmark_config(const nlohmann::json& doc, const Overrides& ov = {});

/// Reads a JSON file; ConfigError on I/O or parse errors (with line information).
nlohmann::json read_json_file(const std::string& path);

}  // namespace hpo
