#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hpo/learn/learner.hpp"

namespace hpo {

enum class KnnKernel { rectangular, optimal, epanechnikov, gaussian, inv, rank };

std::string_view to_string(KnnKernel k);
KnnKernel parse_knn_kernel(std::string_view s);

/// Weights for the k nearest neighbours given their distances normalized by the
/// (k+1)-th distance. `features` is the input dimension (used by "optimal").
std::vector<double> knn_weights(KnnKernel kernel, const std::vector<double>& scaled_dist, std::size_t features);

struct KnnParams {
  std::size_t k = 7;
  double p = 2.0;
  KnnKernel kernel = KnnKernel::optimal;
};

/// Weighted k-NN in the style of kknn: Minkowski distance, neighbour ties broken by row index.
class KnnModel : public Model {
 public:
  KnnModel(const Dataset& train, KnnParams params);

  PredictionMatrix predict(const Dataset& features) const override;
  /// Single-threaded reference for predict().
  PredictionMatrix predict_serial(const Dataset& features) const;

  const KnnParams& params() const { return params_; }

 private:
  void predict_row(const double* q, PredictionMatrix& out, std::size_t row) const;

  KnnParams params_;
  std::size_t n_ = 0;
  std::size_t p_ = 0;
  std::vector<double> x_;
  std::vector<double> y_;
  std::size_t classes_ = 0;  // 0 for regression
};

/// Preset: k real [log 1, log 50] exp_floor (default 7), distance real [1, 5]
/// (default 2), kernel categorical (default optimal).
class KnnLearner : public Learner {
 public:
  KnnLearner();
  std::string id() const override { return "knn"; }
  const SearchSpace& space() const override { return space_; }
  Capabilities capabilities() const override { return {true, true, false, false, true}; }
  ModelPtr train(const Dataset& data, const Config& cfg, std::uint64_t seed) const override;

  static KnnParams params_from(const TransformedConfig& t);

 private:
  SearchSpace space_;
};

}  // namespace hpo
