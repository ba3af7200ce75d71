#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hpo/core/parallel.hpp"
#include "hpo/data/metrics.hpp"
#include "hpo/data/resampling.hpp"
#include "hpo/learn/learner.hpp"
#include "hpo/space/search_space.hpp"

namespace hpo {

/// Fidelity range in abstract units; fraction of the full budget is fidelity / upper.
struct FidelitySpec {
  double lower = 1.0;
  double upper = 1.0;
};

/// Black-box c(cfg) on the minimization scale, evaluated fold by fold so that
/// racing and the combined parallel level can address single folds.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual std::string id() const = 0;
  virtual const SearchSpace& space() const = 0;
  virtual std::optional<FidelitySpec> fidelity() const { return std::nullopt; }
  virtual std::size_t n_folds() const = 0;
  /// Loss of `cfg` on fold `fold`; nullopt when the metric is undefined there.
  /// `eval_seed` is the per-evaluation stream. Throws on learner failure.
  virtual std::optional<double> evaluate_fold(const Config& cfg, double fidelity, std::size_t fold,
                                              std::uint64_t eval_seed) const = 0;

  double full_fidelity() const;
  /// Throws InvalidArgument outside the fidelity bounds.
  void check_fidelity(double fidelity) const;
};

struct Evaluation {
  double score = 0.0;  // mean of defined fold losses; meaningless if failed
  std::vector<std::optional<double>> per_split;
  bool failed = false;
  std::string error;
};

/// Mean loss over all folds, fold jobs spread at the fold level.
/// A throwing fold, or no defined fold, yields a failed evaluation.
Evaluation evaluate(const Objective& obj, const Config& cfg, double fidelity, std::uint64_t eval_seed,
                    const ExecPolicy& policy = {});
/// Combines finished fold results into an Evaluation.
Evaluation aggregate_folds(std::vector<std::optional<double>> per_split, const std::string& error);

enum class SyntheticKind { sphere, branin, low_effective_dim };

std::string_view to_string(SyntheticKind k);
SyntheticKind parse_synthetic_kind(std::string_view s);

/// Deterministic test functions. With noise_sd > 0 every fold adds independent
/// N(0, noise_sd^2 / fraction) noise from the evaluation stream.
class SyntheticObjective : public Objective {
 public:
  SyntheticObjective(SyntheticKind kind, std::size_t dim = 2, double noise_sd = 0.0, std::size_t folds = 1,
                     std::optional<FidelitySpec> fid = std::nullopt);

  std::string id() const override { return std::string(to_string(kind_)); }
  const SearchSpace& space() const override { return space_; }
  std::optional<FidelitySpec> fidelity() const override { return fid_; }
  std::size_t n_folds() const override { return folds_; }
  std::optional<double> evaluate_fold(const Config& cfg, double fidelity, std::size_t fold,
                                      std::uint64_t eval_seed) const override;

  SyntheticKind kind() const { return kind_; }
  double value(const std::vector<double>& x) const;
  double value(const Config& cfg) const;
  /// Numerical minimum: grid scan followed by compass search from the best grid points.
  double reference_optimum() const;

 private:
  SyntheticKind kind_;
  std::size_t dim_;
  double noise_sd_;
  std::size_t folds_;
  std::optional<FidelitySpec> fid_;
  SearchSpace space_;
};

/// c(cfg) = mean loss of the learner over a fixed resampling plan. With a
/// fidelity spec, each split's training rows are subsampled to
/// floor(fidelity / upper * n_train) (at least 2, stratified for classification).
class ResampledObjective : public Objective {
 public:
  ResampledObjective(LearnerPtr learner, Dataset data, ResamplingPlan plan, Metric metric,
                     std::optional<SearchSpace> space = std::nullopt, std::optional<FidelitySpec> fid = std::nullopt,
                     std::vector<double> cost = {});

  std::string id() const override { return learner_->id(); }
  const SearchSpace& space() const override { return space_; }
  std::optional<FidelitySpec> fidelity() const override { return fid_; }
  std::size_t n_folds() const override { return plan_.size(); }
  std::optional<double> evaluate_fold(const Config& cfg, double fidelity, std::size_t fold,
                                      std::uint64_t eval_seed) const override;

  const Learner& learner() const { return *learner_; }
  const LearnerPtr& learner_ptr() const { return learner_; }
  const Dataset& data() const { return data_; }
  const ResamplingPlan& plan() const { return plan_; }
  const Metric& metric() const { return metric_; }
  ScoreContext context() const;

 private:
  LearnerPtr learner_;
  Dataset data_;
  ResamplingPlan plan_;
  Metric metric_;
  SearchSpace space_;
  std::optional<FidelitySpec> fid_;
  std::vector<double> cost_;
};

}  // namespace hpo
