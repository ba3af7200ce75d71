#include "hpo/learn/estimate.hpp"

#include <cmath>
#include <numeric>

#include "hpo/core/errors.hpp"

namespace hpo {

double mean_aggregator(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::optional<double> score_model(const Model& model, const Dataset& test, const Metric& metric,
                                  const ScoreContext& ctx) {
  const auto f = model.predict(test);
  ScoreContext c = ctx;
  if (c.n_classes == 0 && test.task() == TaskType::classification) c.n_classes = test.n_classes();
  return score(metric, test.target(), f, c);
}

std::optional<double> evaluate_split(const Learner& learner, const Config& cfg, const Dataset& data, const Split& split,
                                     const Metric& metric, std::uint64_t seed, double train_fraction,
                                     const ScoreContext& ctx) {
  std::vector<std::size_t> rows = split.train;
  if (train_fraction < 1.0) {
    const auto m = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(rows.size()) + 1e-9)));
    std::vector<std::size_t> strata;
    if (data.task() == TaskType::classification) strata = data.class_codes();
    Rng rng = make_rng(derive_seed(seed, 0x5b5));
    rows = subsample_rows(rows, m, strata, rng);
  }
  const auto model = train_model(learner, data.subset(rows), cfg, seed);
  return score_model(*model, data.subset(split.test), metric, ctx);
}

GeEstimate estimate_ge(const Learner& learner, const Config& cfg, const Dataset& data, const ResamplingPlan& plan,
                       const Metric& metric, std::uint64_t seed, const ExecPolicy& policy, const Aggregator& agr,
                       const ScoreContext& ctx) {
  GeEstimate est;
  est.per_split.resize(plan.size());
  run_level(policy, ParallelLevel::fold, plan.size(), [&](std::size_t i) {
    try {
      est.per_split[i] = evaluate_split(learner, cfg, data, plan.splits[i], metric, derive_seed(seed, i), 1.0, ctx);
    } catch (const SplitError&) {
      throw;
    } catch (const std::exception& e) {
      throw SplitError(i, e.what());
    }
  });
  std::vector<double> defined;
  for (const auto& s : est.per_split) {
    if (s)
      defined.push_back(*s);
    else
      ++est.undefined;
  }
  if (!defined.empty()) est.aggregate = agr(defined);
  return est;
}

}  // namespace hpo
