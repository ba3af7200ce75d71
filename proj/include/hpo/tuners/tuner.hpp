#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hpo/objective/archive.hpp"
#include "hpo/objective/evaluator.hpp"

namespace hpo {

/// Stateful proposer. The driver alternates propose and observe; observe receives
/// the archived results of earlier proposals in evaluation-index order.
class Tuner {
 public:
  Tuner(SearchSpace space, std::uint64_t seed);
  virtual ~Tuner() = default;

  virtual std::string kind() const = 0;
  /// Up to n valid proposals. An empty result means the tuner is waiting for
  /// results (finished() false) or done (finished() true).
  virtual std::vector<Proposal> propose(const Archive& archive, std::size_t n) = 0;
  virtual void observe(std::span<const ArchiveEntry> entries) = 0;
  virtual bool finished() const { return false; }
  /// Natural number of proposals per tuning iteration.
  virtual std::size_t batch_size() const { return 1; }
  /// True when all proposals are independent of results (whole budget can be one batch).
  virtual bool embarrassingly_parallel() const { return false; }
  /// Maximum EI over the last probe set (BO only).
  virtual std::optional<double> max_ei() const { return std::nullopt; }
  /// Index of the identified best entry; default best-observed.
  virtual std::size_t identify(const Archive& archive) const;

  /// Seeds the tuner from a previous run on a compatible space.
  /// Default: the prior incumbent is prepended to the first proposal batch.
  virtual void warm_start(const Archive& prior, const SearchSpace& prior_space);

  const SearchSpace& space() const { return space_; }
  /// Diagnostic events (e.g. surrogate fallbacks).
  const std::vector<std::string>& events() const { return events_; }

 protected:
  /// Pops up to n queued warm-start configurations.
  std::vector<Proposal> take_warm(std::size_t n);

  SearchSpace space_;
  Rng rng_;
  std::deque<Config> warm_queue_;
  std::vector<std::string> events_;
};

using TunerPtr = std::unique_ptr<Tuner>;

class RandomTuner : public Tuner {
 public:
  RandomTuner(SearchSpace space, std::uint64_t seed, std::size_t batch = 1);
  std::string kind() const override { return "random"; }
  std::vector<Proposal> propose(const Archive& archive, std::size_t n) override;
  void observe(std::span<const ArchiveEntry>) override {}
  std::size_t batch_size() const override { return batch_; }
  bool embarrassingly_parallel() const override { return true; }

 private:
  std::size_t batch_;
};

/// Full grid (optionally shuffled); signals completion once exhausted.
class GridTuner : public Tuner {
 public:
  GridTuner(SearchSpace space, std::uint64_t seed, std::size_t resolution, bool shuffle = false, std::size_t batch = 1);
  std::string kind() const override { return "grid"; }
  std::vector<Proposal> propose(const Archive& archive, std::size_t n) override;
  void observe(std::span<const ArchiveEntry>) override {}
  bool finished() const override { return warm_queue_.empty() && next_ >= points_.size(); }
  std::size_t batch_size() const override { return batch_; }
  bool embarrassingly_parallel() const override { return true; }
  std::size_t grid_size() const { return points_.size(); }

 private:
  std::vector<Config> points_;
  std::size_t next_ = 0;
  std::size_t batch_;
};

}  // namespace hpo
