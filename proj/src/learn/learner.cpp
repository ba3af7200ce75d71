#include "hpo/learn/learner.hpp"

#include <chrono>

#include "hpo/core/errors.hpp"

namespace hpo {

void check_capabilities(const Learner& learner, const Dataset& data) {
  const auto caps = learner.capabilities();
  if (data.task() == TaskType::regression && !caps.regression)
    throw CapabilityError(learner.id() + " does not support regression");
  if (data.task() == TaskType::classification && !caps.classification)
    throw CapabilityError(learner.id() + " does not support classification");
  if (!caps.missing && data.has_missing()) throw CapabilityError(learner.id() + " cannot handle missing values");
  if (!caps.categorical && data.has_categorical())
    throw CapabilityError(learner.id() + " cannot handle categorical features");
}

ModelPtr train_model(const Learner& learner, const Dataset& data, const Config& cfg, std::uint64_t seed) {
  if (!data.labeled()) throw InvalidArgument("training data has no target");
  check_capabilities(learner, data);
  const auto start = std::chrono::steady_clock::now();
  auto model = learner.train(data, cfg, seed);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto stamped = std::const_pointer_cast<Model>(model);
  stamped->learner_id = learner.id();
  stamped->n_train = data.n_rows();
  stamped->train_seconds = secs;
  return model;
}

}  // namespace hpo
