#pragma once

#include "hpo/tuners/tuner.hpp"

namespace hpo {

struct EsOptions {
  std::size_t mu = 10;
  std::size_t lambda = 10;  // offspring per generation
  std::size_t tournament = 2;
  double p_crossover = 0.7;
  double sigma_fraction = 0.1;  // real mutation sd relative to the range
  double p_categorical = 0.1;   // categorical resampling probability
};

/// (mu + lambda) evolution strategy for mixed hierarchical spaces.
class EsTuner : public Tuner {
 public:
  struct Member {
    Config config;
    double score = 0.0;
    std::size_t index = 0;  // archive index; smaller = older
  };

  EsTuner(SearchSpace space, std::uint64_t seed, EsOptions opt = {});
  std::string kind() const override { return "es"; }
  std::vector<Proposal> propose(const Archive& archive, std::size_t n) override;
  void observe(std::span<const ArchiveEntry> entries) override;
  std::size_t batch_size() const override { return population_.empty() ? opt_.mu : opt_.lambda; }
  /// Top-mu prior configurations join the initial population with their scores;
  /// the rest of the population is sampled uniformly.
  void warm_start(const Archive& prior, const SearchSpace& prior_space) override;

  const std::vector<Member>& population() const { return population_; }
  std::size_t generation() const { return generation_; }

  // Variation operators, exposed for testing.
  const Member& tournament_select();
  Config crossover(const Config& a, const Config& b);
  Config mutate(const Config& c);
  /// (mu + lambda) survival: best mu of the pool by score, ties to the older member.
  static std::vector<Member> survive(std::vector<Member> pool, std::size_t mu);

 private:
  void make_generation();

  EsOptions opt_;
  std::vector<Member> population_;
  std::vector<Config> pending_;  // current generation, not yet proposed
  std::size_t proposed_ = 0;     // proposed but not yet observed
  std::vector<Member> results_;  // observed members of the current generation
  std::size_t generation_size_ = 0;
  std::size_t generation_ = 0;
};

}  // namespace hpo
