#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hpo/core/parallel.hpp"
#include "hpo/objective/archive.hpp"
#include "hpo/objective/objective.hpp"

namespace hpo {

struct Proposal {
  Config config;
  std::optional<double> fidelity;  // full fidelity when empty
  std::string tag;
};

struct EvaluatorOptions {
  std::uint64_t seed = 0;
  ExecPolicy policy{};
  /// Score given to failed evaluations; default is worst observed + 1 (1.0 on an empty archive).
  std::optional<double> failure_penalty;
  int retries = 1;
};

/// Evaluates proposal batches against an objective and appends them to an archive
/// in proposal order. Evaluation i uses seed derive_seed(seed, i), so archives do
/// not depend on the worker count or the parallel level.
class Evaluator {
 public:
  Evaluator(const Objective& objective, EvaluatorOptions opt);

  const Objective& objective() const { return obj_; }
  const EvaluatorOptions& options() const { return opt_; }
  std::uint64_t eval_seed(std::size_t index) const { return derive_seed(opt_.seed, index); }

  /// Jobs: config/batch level = one per proposal; fold level = one per split;
  /// combined = one per (proposal, split) pair. Returns the archive indices.
  std::vector<std::size_t> run(Archive& archive, const std::vector<Proposal>& batch) const;
  std::size_t run_one(Archive& archive, const Proposal& p) const { return run(archive, {p}).front(); }

  /// Single fold of a configuration that will be archived under `index`;
  /// retried once on failure. Used by racing.
  std::optional<double> fold_loss(const Config& cfg, double fidelity, std::size_t fold, std::size_t index) const;

  double failure_score(const Archive& archive) const;

 private:
  const Objective& obj_;
  EvaluatorOptions opt_;
};

}  // namespace hpo
