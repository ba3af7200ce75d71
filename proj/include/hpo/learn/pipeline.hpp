#pragma once

#include <string>
#include <vector>

#include "hpo/learn/learner.hpp"
#include "hpo/learn/preprocess.hpp"

namespace hpo {

/// Linear chain of preprocessing ops ending in one learner. Op parameters are
/// prefixed "<op>."; the terminal learner's parameters keep their own names.
class Pipeline : public Learner {
 public:
  Pipeline(std::vector<PreprocOpPtr> ops, LearnerPtr terminal);

  std::string id() const override;
  const SearchSpace& space() const override { return space_; }
  Capabilities capabilities() const override;
  ModelPtr train(const Dataset& data, const Config& cfg, std::uint64_t seed) const override;

  const std::vector<PreprocOpPtr>& ops() const { return ops_; }
  const Learner& terminal() const { return *terminal_; }

 private:
  std::vector<PreprocOpPtr> ops_;
  LearnerPtr terminal_;
  SearchSpace space_;
};

class PipelineModel : public Model {
 public:
  PipelineModel(std::vector<FittedOpPtr> fitted, ModelPtr terminal)
      : fitted_(std::move(fitted)), terminal_(std::move(terminal)) {}
  PredictionMatrix predict(const Dataset& features) const override;
  /// Features as seen by the terminal model.
  Dataset transform(const Dataset& features) const;

 private:
  std::vector<FittedOpPtr> fitted_;
  ModelPtr terminal_;
};

/// Chooses one of several learners through the categorical parameter "branch"
/// (levels are the alternative ids). Alternative parameters are prefixed "<alt>."
/// and active only when that alternative is chosen.
class Branch : public Learner {
 public:
  explicit Branch(std::vector<LearnerPtr> alternatives);

  std::string id() const override;
  const SearchSpace& space() const override { return space_; }
  Capabilities capabilities() const override;
  ModelPtr train(const Dataset& data, const Config& cfg, std::uint64_t seed) const override;

 private:
  std::vector<LearnerPtr> alts_;
  SearchSpace space_;
};

/// Registry ids: knn, elastic_net, cart, featureless, featureless_random,
/// "pipe:<op>+...+<learner>" and "branch:<a>|<b>|...".
LearnerPtr make_learner(const std::string& id);
std::vector<std::string> builtin_learner_ids();

}  // namespace hpo
