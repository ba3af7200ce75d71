#pragma once

#include "hpo/tuners/tuner.hpp"

namespace hpo {

struct HbStage {
  std::size_t n = 0;      // population size
  double fidelity = 0.0;  // per-configuration fidelity
};

struct HbBracket {
  std::size_t s = 0;
  std::size_t p = 0;  // starting population
  std::vector<HbStage> stages;
};

struct HbSchedule {
  std::size_t s_max = 0;
  double budget = 0.0;  // B = (s_max + 1) * upper, per bracket
  std::vector<HbBracket> brackets;  // s = s_max down to 0
};

/// Bracket design for integer eta >= 2 and upper > eta.
HbSchedule hyperband_schedule(double upper, unsigned eta);

/// Total spend of a bracket, sum_t floor(p eta^-t) * fidelity_t.
double bracket_spend(const HbBracket& b);

/// Stage-t survivors: the k = floor(n / eta) best by score, ties to the smaller
/// evaluation index. Input: (score, index) pairs. Returns positions into the input.
std::vector<std::size_t> top_k(const std::vector<std::pair<double, std::size_t>>& scored, std::size_t k);

struct HbOptions {
  unsigned eta = 2;
  std::size_t repeats = 1;  // full passes over all brackets
};

/// Hyperband over uniformly sampled configurations. Fidelities are in the
/// objective's units; the schedule's maximum equals `upper`.
class HyperbandTuner : public Tuner {
 public:
  HyperbandTuner(SearchSpace space, std::uint64_t seed, double lower, double upper, HbOptions opt = {});
  std::string kind() const override { return "hyperband"; }
  std::vector<Proposal> propose(const Archive& archive, std::size_t n) override;
  void observe(std::span<const ArchiveEntry> entries) override;
  bool finished() const override { return done_; }
  std::size_t batch_size() const override;
  /// Best entry among those evaluated at the highest fidelity seen.
  std::size_t identify(const Archive& archive) const override;

  const HbSchedule& schedule() const { return schedule_; }
  /// Populations of every finished stage, as archive indices (for testing).
  const std::vector<std::vector<std::size_t>>& stage_log() const { return stage_log_; }

 private:
  void start_bracket();
  void start_stage(std::vector<Config> population);

  HbOptions opt_;
  HbSchedule schedule_;
  std::size_t bracket_ = 0, stage_ = 0, pass_ = 0;
  std::vector<Config> population_;
  std::size_t next_ = 0;
  std::vector<std::pair<double, std::size_t>> results_;
  std::vector<Config> result_configs_;
  std::vector<std::vector<std::size_t>> stage_log_;
  bool done_ = false;
};

}  // namespace hpo
