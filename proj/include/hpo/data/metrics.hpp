#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hpo/data/prediction.hpp"

namespace hpo {

enum class Direction { minimize, maximize };
enum class MetricInput { labels, scores, probabilities };

std::string_view to_string(Direction d);

struct Metric {
  std::string id;
  Direction direction = Direction::minimize;
  MetricInput input = MetricInput::labels;
  bool regression = false;

  /// Maps a raw value to the minimized scale (negates maximize metrics).
  double to_loss(double raw) const { return direction == Direction::maximize ? -raw : raw; }
};

const std::vector<Metric>& metric_catalogue();
/// Accepts catalogue ids plus the aliases "log-loss" and "rsq". Throws InvalidArgument.
const Metric& find_metric(std::string_view id);

struct ScoreContext {
  /// Row-major g x g cost matrix C(true, predicted); required by "cost".
  std::span<const double> cost{};
  /// Overrides the default label rule (argmax, or >= 0.5 for one score column).
  const ThresholdRule* rule = nullptr;
  /// Number of classes; 0 infers it from the prediction width and the labels.
  std::size_t n_classes = 0;
};

/// Metric value, or nullopt when undefined (zero denominator, empty input,
/// single-class AUC). Positive class is code 1.
std::optional<double> score(const Metric& metric, std::span<const double> y, const PredictionMatrix& f,
                            const ScoreContext& ctx = {});
std::optional<double> score(std::string_view metric, std::span<const double> y, const PredictionMatrix& f,
                            const ScoreContext& ctx = {});

/// Rank-based (Mann-Whitney) AUC with midranks for ties.
std::optional<double> auc(std::span<const double> y, std::span<const double> scores);

struct Confusion {
  double tp = 0, fp = 0, tn = 0, fn = 0;
};
Confusion confusion(std::span<const double> y, std::span<const double> yhat);

}  // namespace hpo
