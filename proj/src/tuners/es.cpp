#include "hpo/tuners/es.hpp"

#include <algorithm>
#include <cmath>

#include "hpo/core/errors.hpp"

namespace hpo {

EsTuner::EsTuner(SearchSpace space, std::uint64_t seed, EsOptions opt) : Tuner(std::move(space), seed), opt_(opt) {
  if (opt_.mu == 0 || opt_.lambda == 0) throw InvalidArgument("es: mu and lambda must be positive");
  if (opt_.tournament == 0) throw InvalidArgument("es: tournament size must be positive");
  if (opt_.p_crossover < 0 || opt_.p_crossover > 1 || opt_.p_categorical < 0 || opt_.p_categorical > 1)
    throw InvalidArgument("es: probabilities must lie in [0, 1]");
  if (!(opt_.sigma_fraction > 0)) throw InvalidArgument("es: sigma_fraction must be positive");
}

std::vector<EsTuner::Member> EsTuner::survive(std::vector<Member> pool, std::size_t mu) {
  std::stable_sort(pool.begin(), pool.end(), [](const Member& a, const Member& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.index < b.index;
  });
  if (pool.size() > mu) pool.resize(mu);
  return pool;
}

const EsTuner::Member& EsTuner::tournament_select() {
  if (population_.empty()) throw InvalidArgument("es: empty population");
  std::uniform_int_distribution<std::size_t> pick(0, population_.size() - 1);
  const Member* best = &population_[pick(rng_)];
  for (std::size_t i = 1; i < opt_.tournament; ++i) {
    const Member* c = &population_[pick(rng_)];
    if (c->score < best->score || (c->score == best->score && c->index < best->index)) best = c;
  }
  return *best;
}

Config EsTuner::crossover(const Config& a, const Config& b) {
  Config child;
  for (std::size_t i : space_.topological_order()) {
    const auto& name = space_.specs()[i].name;
    const bool from_a = uniform01(rng_) < 0.5;
    const Config& first = from_a ? a : b;
    const Config& second = from_a ? b : a;
    if (first.has(name))
      child.set(name, first.at(name));
    else if (second.has(name))
      child.set(name, second.at(name));
  }
  return repair(space_, child, rng_);
}

Config EsTuner::mutate(const Config& c) {
  Config out = c;
  for (const auto& s : space_.specs()) {
    if (!out.has(s.name)) continue;
    const double range = s.upper - s.lower;
    switch (s.kind) {
      case ParamKind::real: {
        const double v = out.number(s.name) + std::normal_distribution<double>(0.0, opt_.sigma_fraction * range)(rng_);
        out.set(s.name, std::clamp(v, s.lower, s.upper));
        break;
      }
      case ParamKind::integer: {
        std::geometric_distribution<long long> geo(1.0 / (1.0 + opt_.sigma_fraction * range));
        const long long step = geo(rng_) - geo(rng_);
        const auto v = static_cast<long long>(std::llround(out.number(s.name))) + step;
        out.set(s.name, static_cast<double>(std::clamp(v, s.int_lower(), s.int_upper())));
        break;
      }
      case ParamKind::categorical:
        if (uniform01(rng_) < opt_.p_categorical) out.set(s.name, sample_param(s, rng_));
        break;
    }
  }
  return repair(space_, out, rng_);
}

void EsTuner::make_generation() {
  pending_.clear();
  results_.clear();
  if (population_.size() < opt_.mu && generation_ == 0) {
    for (std::size_t i = population_.size(); i < opt_.mu; ++i) pending_.push_back(sample_uniform(space_, rng_));
  } else {
    for (std::size_t i = 0; i < opt_.lambda; ++i) {
      const Config p1 = tournament_select().config;
      const Config p2 = tournament_select().config;
      Config child = uniform01(rng_) < opt_.p_crossover ? crossover(p1, p2) : p1;
      pending_.push_back(mutate(child));
    }
  }
  generation_size_ = pending_.size();
}

std::vector<Proposal> EsTuner::propose(const Archive&, std::size_t n) {
  if (pending_.empty() && proposed_ == 0 && results_.empty()) make_generation();
  std::vector<Proposal> out;
  const std::string tag = "es:gen" + std::to_string(generation_);
  while (!pending_.empty() && out.size() < n) {
    out.push_back({pending_.front(), std::nullopt, tag});
    pending_.erase(pending_.begin());
    ++proposed_;
  }
  return out;
}

void EsTuner::observe(std::span<const ArchiveEntry> entries) {
  for (const auto& e : entries) {
    if (proposed_ == 0) throw InvalidArgument("es: observed more results than proposed");
    --proposed_;
    results_.push_back({e.config, e.score, e.index});
  }
  if (results_.size() == generation_size_ && pending_.empty() && proposed_ == 0) {
    auto pool = population_;
    pool.insert(pool.end(), results_.begin(), results_.end());
    population_ = survive(std::move(pool), opt_.mu);
    results_.clear();
    generation_size_ = 0;
    ++generation_;
  }
}

void EsTuner::warm_start(const Archive& prior, const SearchSpace& prior_space) {
  check_compatible(space_, prior_space);
  std::vector<Member> pool;
  for (const auto& e : prior.entries())
    if (!e.failed) pool.push_back({e.config, e.score, 0});
  pool = survive(std::move(pool), opt_.mu);
  population_ = std::move(pool);
  if (population_.size() >= opt_.mu) generation_ = 1;
}

}  // namespace hpo
