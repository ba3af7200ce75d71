#include "hpo/tuners/racing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "hpo/core/errors.hpp"

namespace hpo {

std::string_view to_string(RaceTest t) { return t == RaceTest::t_test ? "t-test" : "friedman"; }

std::optional<RaceTest> parse_race_test(std::string_view s) {
  if (s == "t-test" || s == "t_test" || s == "t") return RaceTest::t_test;
  if (s == "friedman" || s == "f") return RaceTest::friedman;
  return std::nullopt;
}

std::optional<PairedT> paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw InvalidArgument("paired t-test: length mismatch");
  const std::size_t n = a.size();
  if (n < 2) return std::nullopt;
  PairedT r;
  for (std::size_t i = 0; i < n; ++i) r.mean_diff += b[i] - a[i];
  r.mean_diff /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = b[i] - a[i] - r.mean_diff;
    ss += d * d;
  }
  r.sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (r.sd == 0.0) {
    r.p = r.mean_diff == 0.0 ? 1.0 : 0.0;
    return r;
  }
  const double t = r.mean_diff / (r.sd / std::sqrt(static_cast<double>(n)));
  boost::math::students_t dist(static_cast<double>(n - 1));
  r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
  return r;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> o(v.size());
  std::iota(o.begin(), o.end(), std::size_t{0});
  std::stable_sort(o.begin(), o.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < o.size();) {
    std::size_t j = i;
    while (j + 1 < o.size() && v[o[j + 1]] == v[o[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) r[o[t]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

FriedmanResult friedman_test(const std::vector<std::vector<double>>& blocks, double alpha) {
  if (blocks.empty()) throw InvalidArgument("friedman: no blocks");
  const std::size_t k = blocks.front().size();
  if (k < 2) throw InvalidArgument("friedman: need at least two treatments");
  const double b = static_cast<double>(blocks.size()), kd = static_cast<double>(k);
  FriedmanResult res;
  res.rank_sums.assign(k, 0.0);
  double A = 0.0;
  for (const auto& row : blocks) {
    if (row.size() != k) throw InvalidArgument("friedman: ragged blocks");
    const auto r = average_ranks(row);
    for (std::size_t j = 0; j < k; ++j) {
      res.rank_sums[j] += r[j];
      A += r[j] * r[j];
    }
  }
  const double C = b * kd * (kd + 1.0) * (kd + 1.0) / 4.0;
  double sr2 = 0.0;
  for (double R : res.rank_sums) sr2 += R * R;
  if (A - C <= 1e-12) {
    res.statistic = 0.0;
    res.p = 1.0;
    res.critical_difference = std::numeric_limits<double>::infinity();
    return res;
  }
  res.statistic = (kd - 1.0) * (sr2 - b * C) / (A - C);
  boost::math::chi_squared chi(kd - 1.0);
  res.p = boost::math::cdf(boost::math::complement(chi, std::max(0.0, res.statistic)));
  if (blocks.size() < 2) {
    res.critical_difference = std::numeric_limits<double>::infinity();
    return res;
  }
  const double df = (b - 1.0) * (kd - 1.0);
  boost::math::students_t t(df);
  const double q = boost::math::quantile(t, 1.0 - alpha / 2.0);
  res.critical_difference = q * std::sqrt(std::max(0.0, 2.0 * (b * A - sr2) / df));
  return res;
}

RaceResult race_scores(std::size_t n_configs, std::size_t n_folds, const FoldScorer& score, const RaceOptions& opt,
                       const ExecPolicy& policy) {
  if (n_configs == 0) throw InvalidArgument("race: no configurations");
  if (opt.t_first == 0 || opt.t_each == 0) throw InvalidArgument("race: t_first and t_each must be positive");
  if (n_folds < opt.t_first)
    throw InvalidArgument("race: " + std::to_string(n_folds) + " folds available but t_first is " +
                          std::to_string(opt.t_first));
  if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) throw InvalidArgument("race: alpha must lie in (0, 1)");

  RaceResult res;
  res.scores.assign(n_configs, std::vector<std::optional<double>>(n_folds));
  res.eliminated_at.assign(n_configs, 0);
  res.failed.assign(n_configs, false);
  res.errors.assign(n_configs, "");
  std::vector<std::size_t> alive(n_configs);
  std::iota(alive.begin(), alive.end(), std::size_t{0});

  auto mean_of = [&](std::size_t i) {
    double s = 0.0;
    std::size_t c = 0;
    for (const auto& v : res.scores[i])
      if (v) s += *v, ++c;
    return c ? s / static_cast<double>(c) : std::numeric_limits<double>::infinity();
  };

  const ParallelLevel level = policy.level == ParallelLevel::combined ? ParallelLevel::combined
                              : policy.level == ParallelLevel::fold   ? ParallelLevel::fold
                                                                      : ParallelLevel::config;
  std::size_t next_test = opt.t_first;
  while (res.folds_run < n_folds && !alive.empty()) {
    if (res.folds_run >= opt.t_first && alive.size() <= opt.n_min) break;
    std::size_t block = std::min(next_test, n_folds) - res.folds_run;
    if (opt.max_evals) {
      const std::size_t left = *opt.max_evals > res.evaluations ? *opt.max_evals - res.evaluations : 0;
      block = std::min(block, left / alive.size());
      if (block == 0) break;
    }
    const std::size_t f0 = res.folds_run;
    const std::size_t jobs = alive.size() * block;
    std::vector<std::string> err(jobs);
    std::vector<std::optional<double>> out(jobs);
    run_level(policy, level, jobs, [&](std::size_t j) {
      try {
        out[j] = score(alive[j / block], f0 + j % block);
        if (!out[j]) err[j] = "undefined loss";
        else if (!std::isfinite(*out[j])) err[j] = "non-finite loss", out[j].reset();
      } catch (const std::exception& e) {
        err[j] = e.what();
      }
    });
    res.evaluations += jobs;
    res.folds_run += block;

    std::vector<std::size_t> still;
    for (std::size_t a = 0; a < alive.size(); ++a) {
      const std::size_t i = alive[a];
      bool bad = false;
      for (std::size_t f = 0; f < block; ++f) {
        const std::size_t j = a * block + f;
        res.scores[i][f0 + f] = out[j];
        if (!err[j].empty() && !bad) {
          bad = true;
          res.errors[i] = "fold " + std::to_string(f0 + f) + ": " + err[j];
        }
      }
      if (bad) {
        res.failed[i] = true;
        res.eliminated_at[i] = res.folds_run;
      } else {
        still.push_back(i);
      }
    }
    alive = std::move(still);

    if (res.folds_run != next_test) continue;
    next_test += opt.t_each;
    if (alive.size() < 2) continue;

    std::size_t best = alive.front();
    for (auto i : alive)
      if (mean_of(i) < mean_of(best)) best = i;
    auto fold_values = [&](std::size_t i) {
      std::vector<double> v(res.folds_run);
      for (std::size_t f = 0; f < res.folds_run; ++f) v[f] = *res.scores[i][f];
      return v;
    };

    std::vector<bool> drop(alive.size(), false);
    if (opt.test == RaceTest::friedman && alive.size() >= 3) {
      std::vector<std::vector<double>> blocks(res.folds_run, std::vector<double>(alive.size()));
      for (std::size_t a = 0; a < alive.size(); ++a)
        for (std::size_t f = 0; f < res.folds_run; ++f) blocks[f][a] = *res.scores[alive[a]][f];
      const auto fr = friedman_test(blocks, opt.alpha);
      if (fr.p < opt.alpha) {
        const double rbest = *std::min_element(fr.rank_sums.begin(), fr.rank_sums.end());
        for (std::size_t a = 0; a < alive.size(); ++a) drop[a] = fr.rank_sums[a] - rbest > fr.critical_difference;
      }
    } else {
      const auto vb = fold_values(best);
      for (std::size_t a = 0; a < alive.size(); ++a) {
        if (alive[a] == best) continue;
        const auto t = paired_t_test(vb, fold_values(alive[a]));
        if (!t) continue;
        drop[a] = t->sd == 0.0 ? t->mean_diff > 0.0 : (t->p < opt.alpha && t->mean_diff > 0.0);
      }
    }
    std::vector<std::size_t> keep;
    for (std::size_t a = 0; a < alive.size(); ++a) {
      if (drop[a]) res.eliminated_at[alive[a]] = res.folds_run;
      else keep.push_back(alive[a]);
    }
    alive = std::move(keep);
  }

  res.survivors = alive;
  std::stable_sort(res.survivors.begin(), res.survivors.end(),
                   [&](std::size_t a, std::size_t b) { return mean_of(a) < mean_of(b); });
  std::vector<std::size_t> out_pos;
  for (std::size_t i = 0; i < n_configs; ++i)
    if (std::find(alive.begin(), alive.end(), i) == alive.end()) out_pos.push_back(i);
  std::stable_sort(out_pos.begin(), out_pos.end(), [&](std::size_t a, std::size_t b) {
    if (res.failed[a] != res.failed[b]) return !res.failed[a];
    if (res.eliminated_at[a] != res.eliminated_at[b]) return res.eliminated_at[a] > res.eliminated_at[b];
    return mean_of(a) < mean_of(b);
  });
  res.ranking = res.survivors;
  res.ranking.insert(res.ranking.end(), out_pos.begin(), out_pos.end());
  return res;
}

RaceResult race(const Evaluator& evaluator, Archive& archive, const std::vector<Config>& configs,
                const RaceOptions& opt, const std::string& tag) {
  const auto& obj = evaluator.objective();
  for (const auto& c : configs) {
    const auto v = validate(obj.space(), c);
    if (!v.empty()) throw InvalidArgument("race: invalid configuration: " + v.front().message);
  }
  const std::size_t first = archive.next_index();
  const std::size_t k = obj.n_folds();
  const double full = obj.full_fidelity();
  auto res = race_scores(
      configs.size(), k,
      [&](std::size_t i, std::size_t f) { return evaluator.fold_loss(configs[i], full, f, first + i); }, opt,
      evaluator.options().policy);

  for (std::size_t i = 0; i < configs.size(); ++i) {
    ArchiveEntry e;
    e.index = first + i;
    e.config = configs[i];
    e.per_split = res.scores[i];
    std::size_t ran = 0;
    double sum = 0.0;
    for (const auto& v : res.scores[i])
      if (v) sum += *v, ++ran;
    // failed folds count toward the spend even though they produce no score
    const std::size_t spent = res.eliminated_at[i] ? res.eliminated_at[i] : res.folds_run;
    e.fidelity = full * static_cast<double>(spent) / static_cast<double>(k);
    e.tag = tag;
    e.failed = res.failed[i] || ran == 0;
    e.error = res.failed[i] ? res.errors[i] : (ran == 0 ? "no folds evaluated" : "");
    e.score = e.failed ? evaluator.failure_score(archive) : sum / static_cast<double>(ran);
    res.indices.push_back(archive.append(std::move(e)));
  }
  return res;
}

std::vector<double> parent_probabilities(std::size_t n_elite) {
  if (n_elite == 0) throw InvalidArgument("parent_probabilities: no elites");
  const double n = static_cast<double>(n_elite);
  std::vector<double> p(n_elite);
  for (std::size_t r = 1; r <= n_elite; ++r) p[r - 1] = 2.0 * (n - static_cast<double>(r) + 1.0) / (n * (n + 1.0));
  return p;
}

std::size_t default_race_count(std::size_t dim) {
  if (dim == 0) return 2;
  std::size_t lg = 0;
  while ((std::size_t{1} << (lg + 1)) <= dim) ++lg;
  return 2 + lg;
}

double truncated_normal(Rng& rng, double mean, double sd, double lo, double hi) {
  if (!(lo <= hi)) throw InvalidArgument("truncated_normal: empty interval");
  if (!(sd > 0.0)) return std::clamp(mean, lo, hi);
  std::normal_distribution<double> nd(mean, sd);
  for (int i = 0; i < 1000; ++i) {
    const double x = nd(rng);
    if (x >= lo && x <= hi) return x;
  }
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

namespace {

struct Candidate {
  Config config;
  std::map<std::string, std::vector<double>> probs;  // categorical sampling vectors
};

Candidate make_child(const SearchSpace& space, const Candidate& parent, double sd_scale, double beta, Rng& rng) {
  Candidate child;
  child.probs = parent.probs;
  Config c;
  for (std::size_t idx : space.topological_order()) {
    const auto& s = space.specs()[idx];
    if (!parent.config.has(s.name)) continue;  // repair samples newly active params uniformly
    switch (s.kind) {
      case ParamKind::real:
        c.set(s.name, truncated_normal(rng, parent.config.number(s.name), sd_scale * (s.upper - s.lower) / 2.0,
                                       s.lower, s.upper));
        break;
      case ParamKind::integer: {
        const double lo = static_cast<double>(s.int_lower()), hi = static_cast<double>(s.int_upper());
        const double x = truncated_normal(rng, parent.config.number(s.name), sd_scale * (hi - lo) / 2.0, lo - 0.5, hi + 0.5);
        c.set(s.name, std::clamp(std::round(x), lo, hi));
        break;
      }
      case ParamKind::categorical: {
        auto& p = child.probs[s.name];
        if (p.size() != s.levels.size()) p.assign(s.levels.size(), 1.0 / static_cast<double>(s.levels.size()));
        const auto at = *s.level_index(parent.config.level(s.name));
        for (std::size_t l = 0; l < p.size(); ++l) p[l] = (1.0 - beta) * p[l] + (l == at ? beta : 0.0);
        std::discrete_distribution<std::size_t> pick(p.begin(), p.end());
        c.set(s.name, s.levels[pick(rng)]);
        break;
      }
    }
  }
  child.config = repair(space, c, rng);
  return child;
}

}  // namespace

IraceResult irace_run(const Evaluator& evaluator, Archive& archive, std::size_t budget, std::uint64_t seed,
                      const IraceOptions& opt, const std::vector<Config>& warm) {
  const auto& obj = evaluator.objective();
  const auto& space = obj.space();
  const std::size_t n_races = opt.n_races ? opt.n_races : default_race_count(space.dim());
  const std::size_t tf = opt.race.t_first, te = opt.race.t_each;
  if (obj.n_folds() < tf)
    throw InvalidArgument("irace: objective has " + std::to_string(obj.n_folds()) + " folds but t_first is " +
                          std::to_string(tf));
  if (budget < n_races * 2 * tf)
    throw InvalidArgument("irace: budget " + std::to_string(budget) + " below the minimum of " +
                          std::to_string(n_races * 2 * tf) + " fold evaluations for " + std::to_string(n_races) +
                          " races");
  if (!(opt.sd_decay > 0.0 && opt.sd_decay <= 1.0)) throw InvalidArgument("irace: sd_decay must lie in (0, 1]");
  if (!(opt.categorical_shift >= 0.0 && opt.categorical_shift <= 1.0))
    throw InvalidArgument("irace: categorical_shift must lie in [0, 1]");

  Rng rng = make_rng(seed);
  IraceResult out;
  std::vector<Candidate> elites;
  std::size_t remaining = budget;
  double sd_scale = 1.0;
  for (std::size_t r = 1; r <= n_races; ++r) {
    const std::size_t b_r = remaining / (n_races - r + 1);
    std::size_t n_r = std::max<std::size_t>(2, b_r / (tf + te * std::min<std::size_t>(5, r)));
    n_r = std::min(n_r, std::max<std::size_t>(2, b_r / tf));

    std::vector<Candidate> pop;
    if (opt.elitist)
      for (std::size_t i = 0; i < elites.size() && pop.size() + 1 < n_r; ++i) pop.push_back(elites[i]);
    if (r == 1)
      for (const auto& w : warm)
        if (pop.size() < n_r) pop.push_back({canonicalize(space, w), {}});
    if (r == 1 || elites.empty()) {
      while (pop.size() < n_r) pop.push_back({sample_uniform(space, rng), {}});
    } else {
      const auto pp = parent_probabilities(elites.size());
      std::discrete_distribution<std::size_t> pick(pp.begin(), pp.end());
      while (pop.size() < n_r) pop.push_back(make_child(space, elites[pick(rng)], sd_scale, opt.categorical_shift, rng));
    }

    std::vector<Config> cfgs;
    for (const auto& c : pop) cfgs.push_back(c.config);
    RaceOptions ro = opt.race;
    ro.max_evals = b_r;
    const auto res = race(evaluator, archive, cfgs, ro, "irace:r" + std::to_string(r));
    out.population_sizes.push_back(pop.size());
    out.fold_evaluations += res.evaluations;
    remaining -= std::min(remaining, res.evaluations);
    ++out.races;

    std::vector<Candidate> next;
    for (auto i : res.survivors) next.push_back(pop[i]);
    if (next.empty())
      for (auto i : res.ranking)
        if (!res.failed[i]) {
          next.push_back(pop[i]);
          break;
        }
    if (!next.empty()) elites = std::move(next);
    sd_scale *= opt.sd_decay;

    if (r == n_races) {
      const std::size_t best = res.ranking.front();
      out.best_index = res.failed[best] ? incumbent(archive).index : res.indices[best];
    }
  }
  return out;
}

}  // namespace hpo
