#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hpo {

/// Granularity at which independent jobs are spread over workers.
/// outer: outer resampling iterations; batch: whole tuning iterations;
/// config: one job per proposed configuration; fold: one job per inner split;
/// combined: one job per (configuration, inner split) pair.
enum class ParallelLevel { outer, batch, config, fold, combined };

std::string_view to_string(ParallelLevel level);
std::optional<ParallelLevel> parse_parallel_level(std::string_view s);

/// Records every parallel spawn so job counts can be checked against the loop structure.
class JobLog {
 public:
  struct Spawn {
    ParallelLevel level;
    std::size_t jobs;
  };

  void record(ParallelLevel level, std::size_t jobs) {
    std::lock_guard lock(mutex_);
    spawns_.push_back({level, jobs});
  }
  std::vector<Spawn> spawns() const {
    std::lock_guard lock(mutex_);
    return spawns_;
  }

 private:
  mutable std::mutex mutex_;
  std::vector<Spawn> spawns_;
};

struct ExecPolicy {
  int workers = 1;
  ParallelLevel level = ParallelLevel::config;
  JobLog* log = nullptr;

  bool parallel_at(ParallelLevel l) const { return level == l; }
  /// Policy used for work nested inside a job that already runs in parallel.
  ExecPolicy serial_inner() const { return ExecPolicy{1, level, log}; }
};

/// Serial reference: runs job(0) .. job(n-1) in order.
template <class Job>
void run_jobs_serial(std::size_t n, Job&& job) {
  for (std::size_t i = 0; i < n; ++i) job(i);
}

/// Runs job(0) .. job(n-1) on up to `workers` OpenMP threads with static
/// round-robin assignment. Each job must write only to its own output slot.
/// The first exception (lowest job index) is rethrown after all jobs finish.
template <class Job>
void run_jobs(std::size_t n, int workers, Job&& job) {
  if (workers <= 1 || n <= 1) {
    run_jobs_serial(n, job);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(static, 1) num_threads(workers)
  for (long i = 0; i < count; ++i) {
    try {
      job(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Convenience: spawn at `level` if the policy selects it, otherwise run serially.
template <class Job>
void run_level(const ExecPolicy& policy, ParallelLevel level, std::size_t n, Job&& job) {
  if (policy.parallel_at(level)) {
    if (policy.log) policy.log->record(level, n);
    run_jobs(n, policy.workers, job);
  } else {
    run_jobs_serial(n, job);
  }
}

}  // namespace hpo
