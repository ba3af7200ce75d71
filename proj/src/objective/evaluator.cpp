#include "hpo/objective/evaluator.hpp"

#include <chrono>

#include "hpo/core/errors.hpp"

namespace hpo {

Evaluator::Evaluator(const Objective& objective, EvaluatorOptions opt) : obj_(objective), opt_(std::move(opt)) {
  if (opt_.retries < 0) throw InvalidArgument("retries must be non-negative");
}

double Evaluator::failure_score(const Archive& archive) const {
  if (opt_.failure_penalty) return *opt_.failure_penalty;
  const auto w = archive.worst_score();
  return w ? *w + 1.0 : 1.0;
}

std::optional<double> Evaluator::fold_loss(const Config& cfg, double fidelity, std::size_t fold,
                                           std::size_t index) const {
  for (int attempt = 0;; ++attempt) {
    try {
      return obj_.evaluate_fold(cfg, fidelity, fold, eval_seed(index));
    } catch (const std::exception&) {
      if (attempt >= opt_.retries) throw;
    }
  }
}

std::vector<std::size_t> Evaluator::run(Archive& archive, const std::vector<Proposal>& batch) const {
  const std::size_t n = batch.size();
  const std::size_t k = obj_.n_folds();
  const std::size_t first = archive.next_index();
  std::vector<double> fid(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto v = validate(obj_.space(), batch[j].config);
    if (!v.empty()) throw InvalidArgument("invalid configuration proposed by '" + batch[j].tag + "': " + v.front().message);
    fid[j] = batch[j].fidelity.value_or(obj_.full_fidelity());
    obj_.check_fidelity(fid[j]);
  }

  std::vector<std::optional<double>> loss(n * k);
  std::vector<std::string> errors(n * k);
  std::vector<double> seconds(n * k, 0.0);
  auto job = [&](std::size_t j, std::size_t f) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      loss[j * k + f] = fold_loss(batch[j].config, fid[j], f, first + j);
    } catch (const std::exception& e) {
      errors[j * k + f] = "split " + std::to_string(f) + ": " + e.what();
    }
    seconds[j * k + f] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  const auto& pol = opt_.policy;
  if (pol.level == ParallelLevel::combined) {
    run_level(pol, ParallelLevel::combined, n * k, [&](std::size_t i) { job(i / k, i % k); });
  } else {
    const ParallelLevel outer_level = pol.level == ParallelLevel::batch ? ParallelLevel::batch : ParallelLevel::config;
    const ExecPolicy inner = pol.parallel_at(outer_level) ? pol.serial_inner() : pol;
    run_level(pol, outer_level, n, [&](std::size_t j) {
      run_level(inner, ParallelLevel::fold, k, [&](std::size_t f) { job(j, f); });
    });
  }

  std::vector<std::size_t> indices;
  for (std::size_t j = 0; j < n; ++j) {
    std::string error;
    double sec = 0.0;
    for (std::size_t f = 0; f < k; ++f) {
      if (error.empty()) error = errors[j * k + f];
      sec += seconds[j * k + f];
    }
    auto ev = aggregate_folds({loss.begin() + static_cast<std::ptrdiff_t>(j * k),
                               loss.begin() + static_cast<std::ptrdiff_t>((j + 1) * k)},
                              error);
    ArchiveEntry e;
    e.index = first + j;
    e.config = batch[j].config;
    e.fidelity = fid[j];
    e.per_split = std::move(ev.per_split);
    e.seconds = sec;
    e.tag = batch[j].tag;
    e.failed = ev.failed;
    e.error = ev.error;
    e.score = ev.failed ? failure_score(archive) : ev.score;
    indices.push_back(archive.append(std::move(e)));
  }
  return indices;
}

}  // namespace hpo
