#pragma once

#include <cstddef>
#include <vector>

#include "hpo/learn/learner.hpp"

namespace hpo {

struct LinearFit {
  std::vector<double> theta;
  double intercept = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct ProxGradOptions {
  std::size_t max_iter = 10000;
  double tol = 1e-8;
};

/// argmin (1/2n)||y - X theta - b||^2 + lambda((1-alpha)/2 ||theta||^2 + alpha ||theta||_1)
/// with an unpenalized intercept b. X is n x p row-major. Accelerated proximal
/// gradient with fixed step 1/L, L the largest eigenvalue of Xc'Xc / n.
LinearFit fit_elastic_net_gaussian(const std::vector<double>& x, std::size_t n, std::size_t p,
                                   const std::vector<double>& y, double lambda, double alpha,
                                   const ProxGradOptions& opt = {});

/// Same penalty on the mean binomial negative log-likelihood, y in {0, 1}.
LinearFit fit_elastic_net_logistic(const std::vector<double>& x, std::size_t n, std::size_t p,
                                   const std::vector<double>& y, double lambda, double alpha,
                                   const ProxGradOptions& opt = {});

class ElasticNetModel : public Model {
 public:
  ElasticNetModel(LinearFit fit, bool logistic) : fit_(std::move(fit)), logistic_(logistic) {}
  PredictionMatrix predict(const Dataset& features) const override;
  const LinearFit& fit() const { return fit_; }

 private:
  LinearFit fit_;
  bool logistic_;
};

/// Preset: s real [-12, 12] with 2^x (lambda, default 1), alpha real [0, 1] (default 1).
/// Regression and binary classification; multiclass raises CapabilityError.
class ElasticNetLearner : public Learner {
 public:
  ElasticNetLearner();
  std::string id() const override { return "elastic_net"; }
  const SearchSpace& space() const override { return space_; }
  Capabilities capabilities() const override { return {true, true, false, false, true}; }
  ModelPtr train(const Dataset& data, const Config& cfg, std::uint64_t seed) const override;

 private:
  SearchSpace space_;
};

}  // namespace hpo
