#include "hpo/tuners/bo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hpo/core/errors.hpp"

namespace hpo {

BoTuner::BoTuner(SearchSpace space, std::uint64_t seed, BoOptions opt)
    : Tuner(std::move(space), seed), opt_(opt), init_(opt.init_design ? opt.init_design : 4 * space_.dim()) {
  if (opt_.batch == 0) throw InvalidArgument("bo: batch must be positive");
  if (opt_.candidates == 0) throw InvalidArgument("bo: need at least one acquisition candidate");
  init_ = std::max<std::size_t>(init_, 2);
}

void BoTuner::warm_start(const Archive& prior, const SearchSpace& prior_space) {
  check_compatible(space_, prior_space);
  for (const auto& e : prior.entries()) {
    prior_configs_.push_back(e.config);
    prior_scores_.push_back(e.score);
  }
}

Config BoTuner::perturb(const Config& c) {
  Config out = c;
  for (const auto& s : space_.specs()) {
    if (!out.has(s.name)) continue;
    if (s.kind == ParamKind::categorical) {
      if (uniform01(rng_) < 0.1) out.set(s.name, sample_param(s, rng_));
      continue;
    }
    double v = out.number(s.name) + std::normal_distribution<double>(0.0, opt_.refine_sigma * (s.upper - s.lower))(rng_);
    v = std::clamp(v, s.lower, s.upper);
    if (s.kind == ParamKind::integer) v = std::clamp(std::round(v), static_cast<double>(s.int_lower()), static_cast<double>(s.int_upper()));
    out.set(s.name, v);
  }
  return repair(space_, out, rng_);
}

bool BoTuner::near_existing(const std::vector<double>& enc, const std::vector<std::vector<double>>& seen) const {
  for (const auto& s : seen) {
    double d = 0.0;
    for (std::size_t i = 0; i < enc.size(); ++i) d += (enc[i] - s[i]) * (enc[i] - s[i]);
    if (std::sqrt(d) <= 1e-9) return true;
  }
  return false;
}

std::vector<Proposal> BoTuner::propose(const Archive& archive, std::size_t n) {
  kappas_.clear();
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < prior_configs_.size(); ++i) {
    xs.push_back(encode_numeric(space_, prior_configs_[i]));
    ys.push_back(prior_scores_[i]);
  }
  for (const auto& e : archive.entries()) {
    xs.push_back(encode_numeric(space_, e.config));
    ys.push_back(e.score);
  }

  std::vector<Proposal> out;
  auto uniform_fill = [&](const std::string& tag) {
    while (out.size() < n) out.push_back({sample_uniform(space_, rng_), std::nullopt, tag});
    return out;
  };
  if (xs.size() < init_) return uniform_fill("bo:init");

  GpOptions gopt;
  gopt.restarts = opt_.gp_restarts;
  gopt.seed = rng_();
  std::optional<GaussianProcess> gp;
  try {
    gp = GaussianProcess::fit(xs, ys, gopt);
    ++fits_;
  } catch (const FitError& e) {
    ++fallbacks_;
    events_.push_back(std::string("surrogate fit failed, random proposal: ") + e.what());
    max_ei_.reset();
    return uniform_fill("bo:fallback");
  }

  const double c_min = *std::min_element(ys.begin(), ys.end());
  std::vector<Candidate> cands(opt_.candidates);
  std::vector<std::vector<double>> encs(opt_.candidates);
  for (std::size_t i = 0; i < opt_.candidates; ++i) {
    cands[i].config = sample_uniform(space_, rng_);
    cands[i].enc = encode_numeric(space_, cands[i].config);
    encs[i] = cands[i].enc;
  }
  const auto pred = gp->predict_batch(encs);
  double mei = 0.0;
  for (std::size_t i = 0; i < std::min(opt_.ei_probes, pred.size()); ++i)
    mei = std::max(mei, expected_improvement(pred[i].mean, pred[i].sd, c_min));
  max_ei_ = mei;

  std::vector<std::vector<double>> seen = xs;
  for (std::size_t slot = 0; slot < n; ++slot) {
    double kappa = opt_.kappa;
    const bool use_lcb = n > 1 || opt_.acquisition == AcquisitionKind::lcb;
    if (n > 1) {
      kappa = draw_qlcb_kappa(rng_);
      kappas_.push_back(kappa);
    }
    auto utility = [&](const GpPrediction& p) {
      return use_lcb ? lcb_utility(p.mean, p.sd, kappa) : expected_improvement(p.mean, p.sd, c_min);
    };
    for (std::size_t i = 0; i < cands.size(); ++i) cands[i].utility = utility(pred[i]);

    std::vector<std::size_t> order(cands.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t top = std::min(opt_.refine_top, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        if (cands[a].utility != cands[b].utility) return cands[a].utility > cands[b].utility;
                        return a < b;
                      });
    Candidate best = cands[order[0]];
    for (std::size_t r = 0; r < top; ++r) {
      Candidate cur = cands[order[r]];
      for (std::size_t step = 0; step < opt_.refine_steps; ++step) {
        Candidate next;
        next.config = perturb(cur.config);
        next.enc = encode_numeric(space_, next.config);
        next.utility = utility(gp->predict(next.enc));
        if (next.utility > cur.utility) cur = std::move(next);
      }
      if (cur.utility > best.utility) best = std::move(cur);
    }

    std::string tag = use_lcb ? (n > 1 ? "bo:qlcb" : "bo:lcb") : "bo:ei";
    for (int tries = 0; near_existing(best.enc, seen) && tries < 1000; ++tries) {
      best.config = sample_uniform(space_, rng_);
      best.enc = encode_numeric(space_, best.config);
      tag = "bo:dedup";
    }
    seen.push_back(best.enc);
    out.push_back({best.config, std::nullopt, tag});
  }
  return out;
}

}  // namespace hpo
