#include "hpo/tuners/hyperband.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hpo/core/errors.hpp"

namespace hpo {

namespace {

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= b;
  return r;
}

}  // namespace

HbSchedule hyperband_schedule(double upper, unsigned eta) {
  if (eta < 2) throw InvalidArgument("hyperband: eta must be an integer >= 2");
  if (!(upper > static_cast<double>(eta))) throw InvalidArgument("hyperband: upper fidelity must exceed eta");
  HbSchedule sch;
  while (static_cast<double>(ipow(eta, sch.s_max + 1)) <= upper) ++sch.s_max;
  sch.budget = static_cast<double>(sch.s_max + 1) * upper;
  for (std::size_t s = sch.s_max + 1; s-- > 0;) {
    HbBracket b;
    b.s = s;
    // p = ceil((B / upper) * eta^s / (s + 1)), exactly in integers
    const std::size_t num = (sch.s_max + 1) * ipow(eta, s);
    b.p = (num + s) / (s + 1);
    for (std::size_t t = 0; t <= s; ++t)
      b.stages.push_back({b.p / ipow(eta, t), upper * static_cast<double>(ipow(eta, t)) / static_cast<double>(ipow(eta, s))});
    sch.brackets.push_back(std::move(b));
  }
  return sch;
}

double bracket_spend(const HbBracket& b) {
  double total = 0.0;
  for (const auto& st : b.stages) total += static_cast<double>(st.n) * st.fidelity;
  return total;
}

std::vector<std::size_t> top_k(const std::vector<std::pair<double, std::size_t>>& scored, std::size_t k) {
  std::vector<std::size_t> pos(scored.size());
  std::iota(pos.begin(), pos.end(), std::size_t{0});
  std::stable_sort(pos.begin(), pos.end(), [&](std::size_t a, std::size_t b) {
    if (scored[a].first != scored[b].first) return scored[a].first < scored[b].first;
    return scored[a].second < scored[b].second;
  });
  pos.resize(std::min(k, pos.size()));
  return pos;
}

HyperbandTuner::HyperbandTuner(SearchSpace space, std::uint64_t seed, double lower, double upper, HbOptions opt)
    : Tuner(std::move(space), seed), opt_(opt), schedule_(hyperband_schedule(upper, opt.eta)) {
  if (opt_.repeats == 0) throw InvalidArgument("hyperband: repeats must be positive");
  const double smallest = schedule_.brackets.front().stages.front().fidelity;
  if (smallest < lower * (1.0 - 1e-12))
    throw InvalidArgument("hyperband: smallest stage fidelity " + std::to_string(smallest) +
                          " is below the objective's lower fidelity bound");
  start_bracket();
}

std::size_t HyperbandTuner::batch_size() const {
  if (done_) return 1;
  return std::max<std::size_t>(1, population_.size() - next_);
}

void HyperbandTuner::start_bracket() {
  const auto& b = schedule_.brackets[bracket_];
  std::vector<Config> pop;
  while (!warm_queue_.empty() && pop.size() < b.p) {
    pop.push_back(warm_queue_.front());
    warm_queue_.pop_front();
  }
  while (pop.size() < b.p) pop.push_back(sample_uniform(space_, rng_));
  stage_ = 0;
  start_stage(std::move(pop));
}

void HyperbandTuner::start_stage(std::vector<Config> population) {
  population_ = std::move(population);
  next_ = 0;
  results_.clear();
  result_configs_.clear();
}

std::vector<Proposal> HyperbandTuner::propose(const Archive&, std::size_t n) {
  std::vector<Proposal> out;
  if (done_) return out;
  // the first bracket may have been built before warm_start queued configurations
  if (bracket_ == 0 && stage_ == 0 && next_ == 0 && pass_ == 0 && !warm_queue_.empty()) start_bracket();
  const auto& b = schedule_.brackets[bracket_];
  const double fid = b.stages[stage_].fidelity;
  const std::string tag = "hyperband:s" + std::to_string(b.s) + "t" + std::to_string(stage_);
  while (next_ < population_.size() && out.size() < n) out.push_back({population_[next_++], fid, tag});
  return out;
}

void HyperbandTuner::observe(std::span<const ArchiveEntry> entries) {
  for (const auto& e : entries) {
    if (results_.size() >= next_) throw InvalidArgument("hyperband: observed more results than proposed");
    results_.push_back({e.score, e.index});
    result_configs_.push_back(e.config);
  }
  if (results_.size() < population_.size()) return;

  std::vector<std::size_t> idx;
  for (const auto& r : results_) idx.push_back(r.second);
  stage_log_.push_back(std::move(idx));

  const auto& b = schedule_.brackets[bracket_];
  if (stage_ < b.s) {
    const auto keep = top_k(results_, results_.size() / opt_.eta);
    std::vector<Config> next;
    for (auto p : keep) next.push_back(result_configs_[p]);
    ++stage_;
    start_stage(std::move(next));
    return;
  }
  if (++bracket_ == schedule_.brackets.size()) {
    bracket_ = 0;
    if (++pass_ == opt_.repeats) {
      done_ = true;
      return;
    }
  }
  start_bracket();
}

std::size_t HyperbandTuner::identify(const Archive& archive) const {
  double top = -1.0;
  for (const auto& e : archive.entries())
    if (!e.failed) top = std::max(top, e.fidelity);
  const ArchiveEntry* best = nullptr;
  for (const auto& e : archive.entries())
    if (!e.failed && e.fidelity == top && (!best || e.score < best->score)) best = &e;
  if (!best) return incumbent(archive).index;
  return best->index;
}

}  // namespace hpo
