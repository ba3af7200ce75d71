#include "hpo/nested/nested.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include "hpo/core/errors.hpp"
#include "hpo/learn/estimate.hpp"
#include "hpo/space/space_io.hpp"

namespace hpo {

namespace {

std::atomic<std::size_t> g_checks{0};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double to_metric_scale(const Metric& m, double loss) { return m.direction == Direction::maximize ? -loss : loss; }

TunedModel tune_impl(const TuningSetup& setup, const Dataset& data, std::uint64_t seed, const ExecPolicy& policy,
                     const Split* outer) {
  if (!setup.learner) throw InvalidArgument("tuning setup has no learner");
  TunedModel tm;
  Rng plan_rng = make_rng(derive_seed(seed, 4));
  tm.inner_plan = setup.inner.instantiate(data, plan_rng);
  if (outer) check_containment(*outer, tm.inner_plan);

  const auto t0 = std::chrono::steady_clock::now();
  ResampledObjective obj(setup.learner, data, tm.inner_plan, setup.metric, setup.space, setup.fidelity, setup.cost);
  TuneOptions o;
  o.tuner = setup.tuner;
  o.termination = setup.termination;
  o.seed = seed;
  o.policy = policy;
  o.failure_penalty = setup.failure_penalty;
  auto out = tune(obj, o);
  tm.tune_seconds = seconds_since(t0);
  tm.archive = std::move(out.archive);
  tm.result = out.result;
  tm.events = std::move(out.events);
  if (tm.result.best_index == 0) throw Error("tuning produced no successful evaluation");
  tm.best_index = tm.result.best_index;
  const auto& e = tm.archive[tm.best_index - 1];
  tm.best = e.config;
  tm.inner_estimate = to_metric_scale(setup.metric, e.score);

  const auto t1 = std::chrono::steady_clock::now();
  tm.model = train_model(*setup.learner, data, tm.best, derive_seed(seed, 3));
  tm.refit_seconds = seconds_since(t1);
  return tm;
}

}  // namespace

TunedModel tuned_train(const TuningSetup& setup, const Dataset& data, std::uint64_t seed, const ExecPolicy& policy) {
  return tune_impl(setup, data, seed, policy, nullptr);
}

TunedLearner::TunedLearner(TuningSetup setup, ExecPolicy policy) : setup_(std::move(setup)), policy_(policy) {
  if (!setup_.learner) throw InvalidArgument("tuned learner needs a learner");
}

ModelPtr TunedLearner::train(const Dataset& data, const Config&, std::uint64_t seed) const {
  return tuned_train(setup_, data, seed, policy_).model;
}

void check_containment(const Split& outer, const ResamplingPlan& inner) {
  const std::unordered_set<std::size_t> test(outer.test.begin(), outer.test.end());
  auto check_rows = [&](const std::vector<std::size_t>& rows, std::size_t s) {
    for (auto r : rows) {
      if (r >= outer.train.size())
        throw LeakageError("inner split " + std::to_string(s) + " indexes row " + std::to_string(r) +
                           " beyond the outer training set");
      if (test.count(outer.train[r]))
        throw LeakageError("inner split " + std::to_string(s) + " touches outer test row " +
                           std::to_string(outer.train[r]));
    }
  };
  for (std::size_t s = 0; s < inner.splits.size(); ++s) {
    check_rows(inner.splits[s].train, s);
    check_rows(inner.splits[s].test, s);
  }
  ++g_checks;
}

std::size_t leakage_checks() { return g_checks.load(); }

NestedReport nested_evaluate(const TuningSetup& setup, const Dataset& data, const ResamplingPlan& outer,
                             std::uint64_t seed, const ExecPolicy& policy, const NestedOptions& opt) {
  outer.check();
  if (outer.n != data.n_rows()) throw InvalidArgument("outer plan does not match the dataset size");
  NestedReport rep;
  rep.metric = setup.metric.id;
  rep.outer.resize(outer.size());
  const ExecPolicy inner = policy.parallel_at(ParallelLevel::outer) ? policy.serial_inner() : policy;

  run_level(policy, ParallelLevel::outer, outer.size(), [&](std::size_t i) {
    auto& r = rep.outer[i];
    const auto& sp = outer.splits[i];
    r.split = i;
    r.n_train = sp.train.size();
    r.n_test = sp.test.size();
    try {
      const Dataset train = data.subset(sp.train);
      auto tm = tune_impl(setup, train, derive_seed(seed, i), inner, &sp);
      r.best = tm.best;
      r.inner_estimate = tm.inner_estimate;
      r.stop_reason = tm.result.stop_reason;
      r.tune_seconds = tm.tune_seconds;
      r.refit_seconds = tm.refit_seconds;
      r.archive = std::move(tm.archive);
      const auto t0 = std::chrono::steady_clock::now();
      ScoreContext ctx;
      ctx.cost = setup.cost;
      r.score = score_model(*tm.model, data.subset(sp.test), setup.metric, ctx);
      r.eval_seconds = seconds_since(t0);
      if (!r.score) r.error = "outer split " + std::to_string(i) + ": metric undefined on the test rows";
    } catch (const std::exception& e) {
      r.error = "outer split " + std::to_string(i) + ": " + e.what();
    }
  });

  std::vector<double> s, in;
  for (const auto& r : rep.outer) {
    if (r.score) s.push_back(*r.score);
    if (r.error.empty() || r.score) in.push_back(r.inner_estimate);
  }
  if (!s.empty()) {
    double m = 0.0;
    for (double v : s) m += v;
    m /= static_cast<double>(s.size());
    rep.aggregate = m;
    if (s.size() > 1) {
      double ss = 0.0;
      for (double v : s) ss += (v - m) * (v - m);
      rep.sd = std::sqrt(ss / static_cast<double>(s.size() - 1));
    }
  }
  if (!in.empty()) {
    double m = 0.0;
    for (double v : in) m += v;
    rep.inner_mean = m / static_cast<double>(in.size());
  }
  if (opt.final_tuning) rep.final = tuned_train(setup, data, derive_seed(seed, outer.size()), policy);
  return rep;
}

nlohmann::json nested_report_to_json(const NestedReport& r) {
  nlohmann::json j;
  j["schema"] = 1;
  j["metric"] = r.metric;
  j["aggregate"] = r.aggregate ? nlohmann::json(*r.aggregate) : nlohmann::json(nullptr);
  j["sd"] = r.sd;
  j["inner_mean"] = r.inner_mean ? nlohmann::json(*r.inner_mean) : nlohmann::json(nullptr);
  auto& outer = j["outer"] = nlohmann::json::array();
  for (const auto& o : r.outer) {
    nlohmann::json e;
    e["split"] = o.split;
    e["score"] = o.score ? nlohmann::json(*o.score) : nlohmann::json(nullptr);
    e["n_train"] = o.n_train;
    e["n_test"] = o.n_test;
    if (o.error.empty() || o.score) {
      e["config"] = config_to_json(o.best);
      e["inner_estimate"] = o.inner_estimate;
      e["evaluations"] = o.archive.size();
      e["stop_reason"] = o.stop_reason;
    }
    if (!o.error.empty()) e["error"] = o.error;
    outer.push_back(std::move(e));
  }
  if (r.final) {
    j["final"] = {{"config", config_to_json(r.final->best)},
                  {"inner_estimate", r.final->inner_estimate},
                  {"evaluations", r.final->archive.size()}};
  }
  return j;
}

nlohmann::json nested_timing_json(const NestedReport& r) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& o : r.outer)
    j.push_back({{"split", o.split}, {"tune", o.tune_seconds}, {"refit", o.refit_seconds}, {"evaluate", o.eval_seconds}});
  return j;
}

std::string nested_report_table(const NestedReport& r) {
  std::ostringstream os;
  os << std::left << std::setw(7) << "split" << std::setw(9) << "n_train" << std::setw(8) << "n_test" << std::setw(12)
     << ("outer " + r.metric).substr(0, 11) << std::setw(12) << "inner" << "config\n";
  os << std::fixed << std::setprecision(4);
  for (const auto& o : r.outer) {
    os << std::setw(7) << o.split << std::setw(9) << o.n_train << std::setw(8) << o.n_test;
    if (o.score) os << std::setw(12) << *o.score;
    else os << std::setw(12) << "NA";
    if (o.error.empty() || o.score) os << std::setw(12) << o.inner_estimate << o.best.str();
    else os << o.error;
    os << "\n";
  }
  os << "aggregate: ";
  if (r.aggregate) os << *r.aggregate << " +- " << r.sd;
  else os << "NA";
  if (r.inner_mean) os << "   mean inner estimate: " << *r.inner_mean;
  os << "\n";
  return os.str();
}

}  // namespace hpo
