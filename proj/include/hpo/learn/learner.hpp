#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "hpo/data/dataset.hpp"
#include "hpo/data/prediction.hpp"
#include "hpo/space/search_space.hpp"

namespace hpo {

struct Capabilities {
  bool regression = true;
  bool classification = true;
  bool missing = false;
  bool categorical = false;
  bool probabilistic = true;
};

class Model {
 public:
  virtual ~Model() = default;
  /// One row per input row. Classification models return g class probabilities.
  virtual PredictionMatrix predict(const Dataset& features) const = 0;

  std::string learner_id;
  std::size_t n_train = 0;
  double train_seconds = 0.0;
};

using ModelPtr = std::shared_ptr<const Model>;

/// Trainable predictor. `cfg` is on the tuner scale of space(); parameters the
/// configuration omits fall back to the learner's defaults.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual std::string id() const = 0;
  virtual const SearchSpace& space() const = 0;
  virtual Capabilities capabilities() const = 0;
  virtual ModelPtr train(const Dataset& data, const Config& cfg, std::uint64_t seed) const = 0;
};

using LearnerPtr = std::shared_ptr<const Learner>;

/// Throws CapabilityError if `data` needs something the learner lacks.
void check_capabilities(const Learner& learner, const Dataset& data);

/// Trains, stamps learner id / n_train / timing on the model.
ModelPtr train_model(const Learner& learner, const Dataset& data, const Config& cfg, std::uint64_t seed);

}  // namespace hpo
