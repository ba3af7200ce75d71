#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpo/data/metrics.hpp"
#include "hpo/data/resampling.hpp"
#include "hpo/learn/learner.hpp"
#include "hpo/objective/archive.hpp"
#include "hpo/objective/objective.hpp"
#include "hpo/tuners/driver.hpp"

namespace hpo {

/// Everything a self-tuning learner needs besides the data.
struct TuningSetup {
  LearnerPtr learner;
  std::optional<SearchSpace> space;  // default: the learner's full space
  TunerSpec tuner;
  Termination termination;
  ResamplingSpec inner = ResamplingSpec::cv(3);
  Metric metric;
  std::optional<FidelitySpec> fidelity;
  std::optional<double> failure_penalty;
  std::vector<double> cost;  // cost matrix for the "cost" metric
};

struct TunedModel {
  Config best;                 // chosen configuration
  double inner_estimate = 0.0; // its inner resampling estimate, metric scale
  std::size_t best_index = 0;
  ModelPtr model;              // refit on all given data
  Archive archive;
  ResamplingPlan inner_plan;   // row indices into the given data
  TuningResult result;
  std::vector<std::string> events;
  double tune_seconds = 0.0, refit_seconds = 0.0;
};

/// Tunes on `data` with the inner resampling, then refits the chosen
/// configuration on all of `data`. Seed streams: derive_seed(seed, 1) tuner,
/// 2 evaluations, 3 final model, 4 inner plan. Throws Error if no evaluation succeeded.
TunedModel tuned_train(const TuningSetup& setup, const Dataset& data, std::uint64_t seed,
                       const ExecPolicy& policy = {});

/// The self-tuning learner as an ordinary learner without hyperparameters.
class TunedLearner : public Learner {
 public:
  explicit TunedLearner(TuningSetup setup, ExecPolicy policy = {});
  std::string id() const override { return "tuned." + setup_.learner->id(); }
  const SearchSpace& space() const override { return empty_; }
  Capabilities capabilities() const override { return setup_.learner->capabilities(); }
  ModelPtr train(const Dataset& data, const Config& cfg, std::uint64_t seed) const override;
  const TuningSetup& setup() const { return setup_; }

 private:
  TuningSetup setup_;
  ExecPolicy policy_;
  SearchSpace empty_;
};

/// Throws LeakageError unless every inner split of `inner` (row indices into the
/// outer training set) maps into outer.train and misses outer.test.
void check_containment(const Split& outer, const ResamplingPlan& inner);
/// Containment checks performed so far in this process.
std::size_t leakage_checks();

struct OuterResult {
  std::size_t split = 0;
  std::optional<double> score;  // outer test score, metric scale
  Config best;
  double inner_estimate = 0.0;
  std::size_t n_train = 0, n_test = 0;
  Archive archive;
  std::string stop_reason;
  std::string error;
  double tune_seconds = 0.0, refit_seconds = 0.0, eval_seconds = 0.0;
};

struct NestedOptions {
  bool final_tuning = false;  // extra tuning run on all data, for reporting the configuration
};

struct NestedReport {
  std::string metric;
  std::vector<OuterResult> outer;
  std::optional<double> aggregate;  // mean of defined outer scores
  double sd = 0.0;
  std::optional<double> inner_mean;  // mean of the inner estimates of the chosen configs
  std::optional<TunedModel> final;
};

/// Outer split i runs tuned_train on its training rows with seed derive_seed(seed, i)
/// and scores once on its test rows. Outer splits run in parallel at the outer level;
/// all other levels are passed to the inner tuning runs.
NestedReport nested_evaluate(const TuningSetup& setup, const Dataset& data, const ResamplingPlan& outer,
                             std::uint64_t seed, const ExecPolicy& policy = {}, const NestedOptions& opt = {});

/// Structured report without wall-clock times (those go to nested_timing_json).
nlohmann::json nested_report_to_json(const NestedReport& r);
nlohmann::json nested_timing_json(const NestedReport& r);
std::string nested_report_table(const NestedReport& r);

}  // namespace hpo
