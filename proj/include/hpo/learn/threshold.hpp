#pragma once

#include <cstdint>
#include <span>

#include "hpo/data/metrics.hpp"

namespace hpo {

struct ThresholdResult {
  ThresholdRule rule;
  double achieved = 0.0;  // raw metric value under `rule`
  double baseline = 0.0;  // raw metric value under the default rule
};

struct ThresholdOptions {
  std::size_t draws = 100;        // multiclass random-search draws
  std::size_t refine_passes = 2;  // multiclass coordinate sweeps
  std::size_t line_points = 20;
  std::uint64_t seed = 0;
};

/// Default rule: threshold 0.5 on probabilities, 0 on raw scores, uniform weights multiclass.
ThresholdRule default_threshold_rule(const PredictionMatrix& f);

/// Binary (one score column or two probability columns): exhaustive search over
/// -inf, midpoints of consecutive distinct scores, +inf; ties keep the smaller t.
/// Multiclass: weights on the simplex, uniform start, Dirichlet(1) draws, then
/// per-coordinate line refinement. Requires a label-based metric; throws
/// InvalidArgument if y holds a single class.
ThresholdResult tune_threshold(std::span<const double> y, const PredictionMatrix& f, const Metric& metric,
                               const ThresholdOptions& opt = {}, const ScoreContext& ctx = {});

}  // namespace hpo
