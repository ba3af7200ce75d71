#pragma once

#include "hpo/tuners/acquisition.hpp"
#include "hpo/tuners/gp.hpp"
#include "hpo/tuners/tuner.hpp"

namespace hpo {

struct BoOptions {
  std::size_t init_design = 0;  // 0 = 4 * number of parameters
  std::size_t batch = 1;        // > 1 switches to qLCB
  AcquisitionKind acquisition = AcquisitionKind::ei;
  double kappa = 1.0;  // LCB exploration weight for single proposals
  std::size_t candidates = 1000;
  std::size_t refine_top = 5;
  std::size_t refine_steps = 20;
  double refine_sigma = 0.05;  // local step sd relative to the range
  std::size_t ei_probes = 1000;
  int gp_restarts = 10;
};

/// Sequential model-based optimization with a GP surrogate.
class BoTuner : public Tuner {
 public:
  BoTuner(SearchSpace space, std::uint64_t seed, BoOptions opt = {});
  std::string kind() const override { return "bo"; }
  std::vector<Proposal> propose(const Archive& archive, std::size_t n) override;
  void observe(std::span<const ArchiveEntry>) override {}
  std::size_t batch_size() const override { return opt_.batch; }
  std::optional<double> max_ei() const override { return max_ei_; }
  /// Prior entries join the surrogate's training data.
  void warm_start(const Archive& prior, const SearchSpace& prior_space) override;

  std::size_t init_design() const { return init_; }
  std::size_t fallbacks() const { return fallbacks_; }
  /// kappa values drawn for the last batch (qLCB only).
  const std::vector<double>& last_kappas() const { return kappas_; }

 private:
  struct Candidate {
    Config config;
    std::vector<double> enc;
    double utility = 0.0;
  };

  Config perturb(const Config& c);
  bool near_existing(const std::vector<double>& enc, const std::vector<std::vector<double>>& seen) const;

  BoOptions opt_;
  std::size_t init_;
  std::vector<Config> prior_configs_;
  std::vector<double> prior_scores_;
  std::optional<double> max_ei_;
  std::vector<double> kappas_;
  std::size_t fallbacks_ = 0;
  std::size_t fits_ = 0;
};

}  // namespace hpo
