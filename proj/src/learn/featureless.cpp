#include "hpo/learn/featureless.hpp"

#include <numeric>

#include "hpo/core/errors.hpp"
#include "hpo/core/rng.hpp"

namespace hpo {

PredictionMatrix FeaturelessModel::predict(const Dataset& features) const {
  PredictionMatrix out(features.n_rows(), value_.size(), probabilities_);
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t k = 0; k < value_.size(); ++k) out(i, k) = value_[k];
  return out;
}

ModelPtr FeaturelessLearner::train(const Dataset& data, const Config&, std::uint64_t) const {
  const double n = static_cast<double>(data.n_rows());
  if (data.task() == TaskType::regression) {
    const auto y = data.target();
    return std::make_shared<FeaturelessModel>(std::vector<double>{std::accumulate(y.begin(), y.end(), 0.0) / n}, false);
  }
  std::vector<double> freq(data.n_classes(), 0.0);
  const auto counts = data.class_counts();
  for (std::size_t k = 0; k < counts.size(); ++k) freq[k] = static_cast<double>(counts[k]) / n;
  return std::make_shared<FeaturelessModel>(std::move(freq), true);
}

PredictionMatrix RandomLabelModel::predict(const Dataset& features) const {
  Rng rng = make_rng(seed_);
  std::uniform_int_distribution<std::size_t> pick(0, classes_ - 1);
  PredictionMatrix out(features.n_rows(), classes_, true);
  for (std::size_t i = 0; i < out.rows(); ++i) out(i, pick(rng)) = 1.0;
  return out;
}

RandomLabelLearner::RandomLabelLearner() : space_({ParamSpec::real("dummy", 0.0, 1.0)}) {}

ModelPtr RandomLabelLearner::train(const Dataset& data, const Config&, std::uint64_t seed) const {
  if (data.n_classes() < 2) throw FitError("featureless_random needs at least two classes");
  return std::make_shared<RandomLabelModel>(data.n_classes(), seed);
}

}  // namespace hpo
