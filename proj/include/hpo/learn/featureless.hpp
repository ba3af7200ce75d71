#pragma once

#include <cstdint>
#include <vector>

#include "hpo/learn/learner.hpp"

namespace hpo {

/// Predicts training class frequencies (classification) or the training mean.
class FeaturelessModel : public Model {
 public:
  explicit FeaturelessModel(std::vector<double> value, bool probabilities)
      : value_(std::move(value)), probabilities_(probabilities) {}
  PredictionMatrix predict(const Dataset& features) const override;

 private:
  std::vector<double> value_;
  bool probabilities_;
};

class FeaturelessLearner : public Learner {
 public:
  std::string id() const override { return "featureless"; }
  const SearchSpace& space() const override { return space_; }
  Capabilities capabilities() const override { return {true, true, true, true, true}; }
  ModelPtr train(const Dataset& data, const Config& cfg, std::uint64_t seed) const override;

 private:
  SearchSpace space_;
};

/// Labels drawn uniformly at random over the training classes, independent of the
/// features; one-hot probability rows. Deterministic given the model seed.
class RandomLabelModel : public Model {
 public:
  RandomLabelModel(std::size_t classes, std::uint64_t seed) : classes_(classes), seed_(seed) {}
  PredictionMatrix predict(const Dataset& features) const override;

 private:
  std::size_t classes_;
  std::uint64_t seed_;
};

/// Random-label classifier with a single inert hyperparameter "dummy" real [0, 1].
class RandomLabelLearner : public Learner {
 public:
  RandomLabelLearner();
  std::string id() const override { return "featureless_random"; }
  const SearchSpace& space() const override { return space_; }
  Capabilities capabilities() const override { return {false, true, true, true, true}; }
  ModelPtr train(const Dataset& data, const Config& cfg, std::uint64_t seed) const override;

 private:
  SearchSpace space_;
};

}  // namespace hpo
