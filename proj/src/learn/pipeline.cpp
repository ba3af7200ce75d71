#include "hpo/learn/pipeline.hpp"

#include "hpo/core/errors.hpp"
#include "hpo/learn/cart.hpp"
#include "hpo/learn/elastic_net.hpp"
#include "hpo/learn/featureless.hpp"
#include "hpo/learn/knn.hpp"

namespace hpo {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

}  // namespace

Pipeline::Pipeline(std::vector<PreprocOpPtr> ops, LearnerPtr terminal)
    : ops_(std::move(ops)), terminal_(std::move(terminal)) {
  if (!terminal_) throw InvalidArgument("pipeline needs a terminal learner");
  std::vector<SearchSpace> parts;
  for (const auto& op : ops_) parts.push_back(op->space().prefixed(op->id() + "."));
  parts.push_back(terminal_->space());
  space_ = concat(parts);
}

std::string Pipeline::id() const {
  std::string s = "pipe:";
  for (const auto& op : ops_) s += op->id() + "+";
  return s + terminal_->id();
}

Capabilities Pipeline::capabilities() const {
  Capabilities caps = terminal_->capabilities();
  for (const auto& op : ops_) {
    caps.missing = caps.missing || op->removes_missing();
    caps.categorical = caps.categorical || op->removes_categorical();
  }
  return caps;
}

ModelPtr Pipeline::train(const Dataset& data, const Config& cfg, std::uint64_t seed) const {
  Dataset current = data;
  std::vector<FittedOpPtr> fitted;
  Config rest = cfg;
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const std::string prefix = ops_[i]->id() + ".";
    Config op_cfg = space_.slice(cfg, prefix);
    for (const auto& [name, v] : op_cfg.values()) rest.erase(prefix + name);
    Rng rng = make_rng(derive_seed(seed, i + 1));
    auto res = ops_[i]->fit_transform(current, op_cfg, rng);
    fitted.push_back(std::move(res.fitted));
    current = std::move(res.data);
  }
  check_capabilities(*terminal_, current);
  auto model = terminal_->train(current, rest, derive_seed(seed, 0));
  return std::make_shared<PipelineModel>(std::move(fitted), std::move(model));
}

Dataset PipelineModel::transform(const Dataset& features) const {
  Dataset current = features;
  for (const auto& f : fitted_) current = f->transform(current);
  return current;
}

PredictionMatrix PipelineModel::predict(const Dataset& features) const { return terminal_->predict(transform(features)); }

Branch::Branch(std::vector<LearnerPtr> alternatives) : alts_(std::move(alternatives)) {
  if (alts_.size() < 2) throw InvalidArgument("branch needs at least two alternatives");
  std::vector<std::string> levels;
  for (const auto& a : alts_) levels.push_back(a->id());
  std::vector<ParamSpec> specs{ParamSpec::categorical("branch", levels)};
  for (const auto& a : alts_) {
    const SearchSpace sub = a->space().prefixed(a->id() + ".");
    for (auto s : sub.specs()) {
      if (!s.condition) s.when("branch", {a->id()});
      specs.push_back(std::move(s));
    }
  }
  space_ = SearchSpace(std::move(specs));
}

std::string Branch::id() const {
  std::string s = "branch:";
  for (std::size_t i = 0; i < alts_.size(); ++i) s += (i ? "|" : "") + alts_[i]->id();
  return s;
}

Capabilities Branch::capabilities() const {
  Capabilities caps = alts_.front()->capabilities();
  for (const auto& a : alts_) {
    const auto c = a->capabilities();
    caps.regression = caps.regression && c.regression;
    caps.classification = caps.classification && c.classification;
    caps.missing = caps.missing && c.missing;
    caps.categorical = caps.categorical && c.categorical;
    caps.probabilistic = caps.probabilistic && c.probabilistic;
  }
  return caps;
}

ModelPtr Branch::train(const Dataset& data, const Config& cfg, std::uint64_t seed) const {
  const std::string choice = cfg.has("branch") ? cfg.level("branch") : alts_.front()->id();
  for (const auto& a : alts_)
    if (a->id() == choice) return a->train(data, space_.slice(cfg, choice + "."), seed);
  throw InvalidArgument("branch level '" + choice + "' names no alternative");
}

LearnerPtr make_learner(const std::string& id) {
  if (id == "knn") return std::make_shared<KnnLearner>();
  if (id == "elastic_net") return std::make_shared<ElasticNetLearner>();
  if (id == "cart") return std::make_shared<CartLearner>();
  if (id == "featureless") return std::make_shared<FeaturelessLearner>();
  if (id == "featureless_random") return std::make_shared<RandomLabelLearner>();
  if (starts_with(id, "branch:")) {
    std::vector<LearnerPtr> alts;
    for (const auto& a : split(id.substr(7), '|')) alts.push_back(make_learner(a));
    return std::make_shared<Branch>(std::move(alts));
  }
  if (starts_with(id, "pipe:")) {
    auto parts = split(id.substr(5), '+');
    if (parts.size() < 2) throw InvalidArgument("pipeline id needs at least one operator and a learner: '" + id + "'");
    std::vector<PreprocOpPtr> ops;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) ops.push_back(make_op(parts[i]));
    return std::make_shared<Pipeline>(std::move(ops), make_learner(parts.back()));
  }
  throw InvalidArgument("unknown learner '" + id + "'");
}

std::vector<std::string> builtin_learner_ids() {
  return {"knn", "elastic_net", "cart", "featureless", "featureless_random"};
}

}  // namespace hpo
