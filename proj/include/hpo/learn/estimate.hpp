#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "hpo/core/parallel.hpp"
#include "hpo/data/metrics.hpp"
#include "hpo/data/resampling.hpp"
#include "hpo/learn/learner.hpp"

namespace hpo {

using Aggregator = std::function<double(const std::vector<double>&)>;

double mean_aggregator(const std::vector<double>& v);

struct GeEstimate {
  std::optional<double> aggregate;  // over defined splits; nullopt if none
  std::vector<std::optional<double>> per_split;
  std::size_t undefined = 0;
};

/// Raw metric value of `model` on the labeled rows of `test`.
std::optional<double> score_model(const Model& model, const Dataset& test, const Metric& metric,
                                  const ScoreContext& ctx = {});

/// Trains on split.train (optionally subsampled to floor(train_fraction * n_train)
/// rows, at least 2, stratified for classification) and scores on split.test.
/// `seed` drives both the subsample and the learner.
std::optional<double> evaluate_split(const Learner& learner, const Config& cfg, const Dataset& data, const Split& split,
                                     const Metric& metric, std::uint64_t seed, double train_fraction = 1.0,
                                     const ScoreContext& ctx = {});

/// Resampled generalization-error estimate. Split i uses seed derive_seed(seed, i);
/// splits run in parallel when the policy selects the fold level. A failing split
/// surfaces as SplitError carrying its index.
GeEstimate estimate_ge(const Learner& learner, const Config& cfg, const Dataset& data, const ResamplingPlan& plan,
                       const Metric& metric, std::uint64_t seed, const ExecPolicy& policy = {},
                       const Aggregator& agr = mean_aggregator, const ScoreContext& ctx = {});

}  // namespace hpo
