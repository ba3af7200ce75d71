#include "hpo/tuners/driver.hpp"

#include <chrono>
#include <cmath>
#include <set>

#include "hpo/core/errors.hpp"
#include "hpo/tuners/bo.hpp"
#include "hpo/tuners/es.hpp"
#include "hpo/tuners/hyperband.hpp"
#include "hpo/tuners/racing.hpp"

namespace hpo {

namespace {

// Typed access to tuner constants; rejects keys nobody asked for.
class Params {
 public:
  Params(const nlohmann::json& j, std::string kind)
      : j_(j.is_null() ? empty() : j), kind_(std::move(kind)) {
    if (!j_.is_object()) throw ConfigError("tuner", "constants must be an object");
  }
  template <class T>
  void get(const char* key, T& out) {
    used_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("tuner." + std::string(key), e.what());
    }
  }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key()) && it.key() != "kind")
        throw ConfigError("tuner." + it.key(), "unknown constant for tuner '" + kind_ + "'");
  }

 private:
  static const nlohmann::json& empty() {
    static const nlohmann::json e = nlohmann::json::object();
    return e;
  }
  const nlohmann::json& j_;
  std::string kind_;
  std::set<std::string> used_;
};

IraceOptions irace_options(const nlohmann::json& j) {
  IraceOptions o;
  Params p(j, "racing");
  p.get("n_races", o.n_races);
  p.get("t_first", o.race.t_first);
  p.get("t_each", o.race.t_each);
  std::string test = std::string(to_string(o.race.test));
  p.get("test", test);
  const auto t = parse_race_test(test);
  if (!t) throw ConfigError("tuner.test", "expected 't-test' or 'friedman', got '" + test + "'");
  o.race.test = *t;
  p.get("alpha", o.race.alpha);
  p.get("n_min", o.race.n_min);
  p.get("sd_decay", o.sd_decay);
  p.get("categorical_shift", o.categorical_shift);
  p.get("elitist", o.elitist);
  p.finish();
  return o;
}

}  // namespace

TunerSpec tuner_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("tuner", "expected an object");
  if (!j.contains("kind") || !j.at("kind").is_string()) throw ConfigError("tuner.kind", "missing tuner kind");
  TunerSpec s;
  s.kind = j.at("kind").get<std::string>();
  s.params = j;
  s.params.erase("kind");
  return s;
}

nlohmann::json tuner_spec_to_json(const TunerSpec& spec) {
  nlohmann::json j = spec.params;
  j["kind"] = spec.kind;
  return j;
}

TunerPtr make_tuner(const TunerSpec& spec, const Objective& objective, std::uint64_t seed) {
  const SearchSpace& space = objective.space();
  Params p(spec.params, spec.kind);
  TunerPtr t;
  if (spec.kind == "random") {
    std::size_t batch = 1;
    p.get("batch", batch);
    t = std::make_unique<RandomTuner>(space, seed, batch);
  } else if (spec.kind == "grid") {
    std::size_t resolution = 10, batch = 1;
    bool shuffle = false;
    p.get("resolution", resolution);
    p.get("shuffle", shuffle);
    p.get("batch", batch);
    t = std::make_unique<GridTuner>(space, seed, resolution, shuffle, batch);
  } else if (spec.kind == "es") {
    EsOptions o;
    p.get("mu", o.mu);
    p.get("lambda", o.lambda);
    p.get("tournament", o.tournament);
    p.get("p_crossover", o.p_crossover);
    p.get("sigma_fraction", o.sigma_fraction);
    p.get("p_categorical", o.p_categorical);
    t = std::make_unique<EsTuner>(space, seed, o);
  } else if (spec.kind == "bo") {
    BoOptions o;
    std::string acq = std::string(to_string(o.acquisition));
    p.get("init_design", o.init_design);
    p.get("batch", o.batch);
    p.get("acquisition", acq);
    p.get("kappa", o.kappa);
    p.get("candidates", o.candidates);
    p.get("refine_top", o.refine_top);
    p.get("refine_steps", o.refine_steps);
    p.get("refine_sigma", o.refine_sigma);
    p.get("ei_probes", o.ei_probes);
    p.get("gp_restarts", o.gp_restarts);
    try {
      o.acquisition = parse_acquisition(acq);
    } catch (const Error& e) {
      throw ConfigError("tuner.acquisition", e.what());
    }
    t = std::make_unique<BoTuner>(space, seed, o);
  } else if (spec.kind == "hyperband") {
    HbOptions o;
    p.get("eta", o.eta);
    p.get("repeats", o.repeats);
    const auto fid = objective.fidelity();
    if (!fid) throw ConfigError("tuner.kind", "hyperband needs an objective with a fidelity range");
    t = std::make_unique<HyperbandTuner>(space, seed, fid->lower, fid->upper, o);
  } else if (spec.kind == "racing") {
    throw ConfigError("tuner.kind", "racing drives its own evaluations; use tune()");
  } else {
    throw ConfigError("tuner.kind", "unknown tuner '" + spec.kind + "'");
  }
  p.finish();
  return t;
}

TuningResult run_tuning(Tuner& tuner, const Evaluator& evaluator, Archive& archive, const Termination& termination) {
  termination.check();
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  const bool batch_level = evaluator.options().policy.level == ParallelLevel::batch;

  TuningResult res;
  for (;;) {
    const auto v = should_stop(termination, archive, elapsed(), tuner.max_ei());
    if (v.stop) {
      res.stop_reason = v.reason;
      break;
    }
    if (tuner.finished()) {
      res.stop_reason = "exhausted";
      break;
    }
    std::size_t n = tuner.batch_size();
    if (termination.max_evals) {
      const std::size_t left = *termination.max_evals - std::min(*termination.max_evals, archive.size());
      if (batch_level && tuner.embarrassingly_parallel()) n = left;
      n = std::min(n, left);
    }
    auto props = tuner.propose(archive, std::max<std::size_t>(n, 1));
    if (props.empty()) {
      if (!tuner.finished()) throw Error("tuner '" + tuner.kind() + "' proposed nothing without finishing");
      res.stop_reason = "exhausted";
      break;
    }
    bool trimmed = false;
    if (termination.max_fidelity) {
      double spent = archive.total_fidelity();
      std::size_t keep = 0;
      for (; keep < props.size(); ++keep) {
        const double f = props[keep].fidelity.value_or(evaluator.objective().full_fidelity());
        if (spent + f > *termination.max_fidelity * (1.0 + 1e-12)) break;
        spent += f;
      }
      trimmed = keep < props.size();
      props.resize(keep);
    }
    if (!props.empty()) {
      const std::size_t before = archive.size();
      evaluator.run(archive, props);
      tuner.observe(std::span<const ArchiveEntry>(archive.entries()).subspan(before));
      ++res.iterations;
    }
    if (trimmed) {
      res.stop_reason = "max_fidelity";
      break;
    }
  }
  res.seconds = elapsed();
  if (archive.size() > archive.n_failed()) res.best_index = tuner.identify(archive);
  return res;
}

void validate_tuner_spec(const TunerSpec& spec, const Objective& objective) {
  if (spec.kind == "racing") irace_options(spec.params);
  else make_tuner(spec, objective, 0);
}

TuneOutcome tune(const Objective& objective, const TuneOptions& opt) {
  opt.termination.check();
  EvaluatorOptions eo;
  eo.seed = derive_seed(opt.seed, 2);
  eo.policy = opt.policy;
  eo.failure_penalty = opt.failure_penalty;
  Evaluator evaluator(objective, eo);
  TuneOutcome out;

  if (opt.tuner.kind == "racing") {
    const auto io = irace_options(opt.tuner.params);
    const double k = static_cast<double>(objective.n_folds());
    std::size_t budget = 0;
    if (opt.termination.max_evals) budget = *opt.termination.max_evals * objective.n_folds();
    else if (opt.termination.max_fidelity)
      budget = static_cast<std::size_t>(std::floor(*opt.termination.max_fidelity / objective.full_fidelity() * k + 1e-9));
    else throw ConfigError("termination", "racing needs max_evals or max_fidelity as its budget");
    std::vector<Config> warm;
    if (opt.warm_archive) {
      check_compatible(objective.space(), *opt.warm_space);
      warm.push_back(incumbent(*opt.warm_archive).config);
    }
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = irace_run(evaluator, out.archive, budget, derive_seed(opt.seed, 1), io, warm);
    out.result.best_index = r.best_index;
    out.result.iterations = r.races;
    out.result.stop_reason = "exhausted";
    out.result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }

  auto tuner = make_tuner(opt.tuner, objective, derive_seed(opt.seed, 1));
  if (opt.warm_archive) {
    if (!opt.warm_space) throw InvalidArgument("warm start needs the prior run's search space");
    tuner->warm_start(*opt.warm_archive, *opt.warm_space);
  }
  out.result = run_tuning(*tuner, evaluator, out.archive, opt.termination);
  out.events = tuner->events();
  return out;
}

}  // namespace hpo
