#include "hpo/tuners/tuner.hpp"

#include <algorithm>

#include "hpo/core/errors.hpp"

namespace hpo {

Tuner::Tuner(SearchSpace space, std::uint64_t seed) : space_(std::move(space)), rng_(make_rng(seed)) {
  if (space_.empty()) throw InvalidArgument("tuner needs a non-empty search space");
}

std::size_t Tuner::identify(const Archive& archive) const { return incumbent(archive).index; }

void Tuner::warm_start(const Archive& prior, const SearchSpace& prior_space) {
  check_compatible(space_, prior_space);
  if (prior.empty()) return;
  warm_queue_.push_back(incumbent(prior).config);
}

std::vector<Proposal> Tuner::take_warm(std::size_t n) {
  std::vector<Proposal> out;
  while (!warm_queue_.empty() && out.size() < n) {
    out.push_back({warm_queue_.front(), std::nullopt, kind() + ":warm"});
    warm_queue_.pop_front();
  }
  return out;
}

RandomTuner::RandomTuner(SearchSpace space, std::uint64_t seed, std::size_t batch)
    : Tuner(std::move(space), seed), batch_(std::max<std::size_t>(batch, 1)) {}

std::vector<Proposal> RandomTuner::propose(const Archive&, std::size_t n) {
  auto out = take_warm(n);
  while (out.size() < n) out.push_back({sample_uniform(space_, rng_), std::nullopt, "random"});
  return out;
}

GridTuner::GridTuner(SearchSpace space, std::uint64_t seed, std::size_t resolution, bool shuffle, std::size_t batch)
    : Tuner(std::move(space), seed), batch_(std::max<std::size_t>(batch, 1)) {
  points_ = grid(space_, resolution);
  if (shuffle) std::shuffle(points_.begin(), points_.end(), rng_);
}

std::vector<Proposal> GridTuner::propose(const Archive&, std::size_t n) {
  auto out = take_warm(n);
  while (out.size() < n && next_ < points_.size()) out.push_back({points_[next_++], std::nullopt, "grid"});
  return out;
}

}  // namespace hpo
