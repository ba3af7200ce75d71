#include "hpo/cli/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "hpo/core/errors.hpp"
#include "hpo/data/bundled.hpp"
#include "hpo/data/metrics.hpp"
#include "hpo/learn/pipeline.hpp"
#include "hpo/space/space_io.hpp"

namespace hpo {

namespace {

using nlohmann::json;

// Strict view of one JSON object: typed lookups, unknown keys rejected by finish().
class Obj {
 public:
  Obj(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_.empty() ? "/" : where_, "expected an object");
  }
  std::string at(const std::string& key) const { return where_ + "/" + key; }
  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }
  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }
  template <class T>
  std::optional<T> opt(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = j_.at(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(at(key), "expected true or false");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(at(key), "expected a string");
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
        throw ConfigError(at(key), "expected a non-negative integer");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(at(key), "expected an integer");
    } else {
      if (!v.is_number()) throw ConfigError(at(key), "expected a number");
    }
    return v.get<T>();
  }
  template <class T>
  T req(const std::string& key) {
    auto v = opt<T>(key);
    if (!v) throw ConfigError(at(key), "required field is missing");
    return *v;
  }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(at(it.key()), "unknown field");
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

ParallelLevel parse_level(const std::string& s, const std::string& where) {
  const auto l = parse_parallel_level(s);
  if (!l) throw ConfigError(where, "unknown parallelization level '" + s + "'");
  return *l;
}

TaskConfig parse_task(const json& j) {
  Obj o(j, "/task");
  TaskConfig t;
  const int kinds = int(o.has("dataset")) + int(o.has("csv")) + int(o.has("synthetic"));
  if (kinds != 1) throw ConfigError("/task", "give exactly one of 'dataset', 'csv' or 'synthetic'");
  if (o.has("dataset")) {
    t.kind = TaskConfig::Kind::bundled;
    t.name = o.req<std::string>("dataset");
    const auto names = bundled_names();
    if (std::find(names.begin(), names.end(), t.name) == names.end())
      throw ConfigError("/task/dataset", "unknown bundled dataset '" + t.name + "'");
  } else if (o.has("csv")) {
    t.kind = TaskConfig::Kind::csv;
    t.path = o.req<std::string>("csv");
    t.target = o.req<std::string>("target");
    if (auto ty = o.opt<std::string>("type")) {
      if (*ty == "classification") t.type = TaskType::classification;
      else if (*ty == "regression") t.type = TaskType::regression;
      else throw ConfigError("/task/type", "expected 'classification' or 'regression'");
    }
  } else {
    t.kind = TaskConfig::Kind::synthetic;
    t.name = o.req<std::string>("synthetic");
    try {
      parse_synthetic_kind(t.name);
    } catch (const Error& e) {
      throw ConfigError("/task/synthetic", e.what());
    }
    if (auto d = o.opt<std::size_t>("dim")) t.dim = *d;
    if (auto n = o.opt<double>("noise_sd")) t.noise_sd = *n;
    if (auto f = o.opt<std::size_t>("folds")) t.folds = *f;
    if (t.dim == 0) throw ConfigError("/task/dim", "must be positive");
    if (t.folds == 0) throw ConfigError("/task/folds", "must be positive");
    if (t.noise_sd < 0) throw ConfigError("/task/noise_sd", "must be non-negative");
  }
  o.finish();
  return t;
}

void parse_common(Obj& o, RunConfig& rc, const Overrides& ov) {
  if (ov.seed) {
    rc.seed = *ov.seed;
    o.has("seed");
  } else {
    rc.seed = o.req<std::uint64_t>("seed");
  }
  if (!o.has("task")) throw ConfigError("/task", "required field is missing");
  rc.task = parse_task(o.raw("task"));
  if (auto l = o.opt<std::string>("learner")) {
    rc.learner = *l;
    try {
      make_learner(rc.learner);
    } catch (const Error& e) {
      throw ConfigError("/learner", e.what());
    }
  } else if (rc.task.kind != TaskConfig::Kind::synthetic) {
    throw ConfigError("/learner", "required for dataset tasks");
  }
  if (o.has("space")) {
    rc.space = o.raw("space");
    space_from_json(*rc.space, "/space");
  }
  if (o.has("resampling")) rc.resampling = resampling_from_json(o.raw("resampling"), "/resampling");
  if (auto m = o.opt<std::string>("metric")) {
    try {
      find_metric(*m);
    } catch (const Error& e) {
      throw ConfigError("/metric", e.what());
    }
    rc.metric = *m;
  }
  if (o.has("fidelity")) {
    Obj f(o.raw("fidelity"), "/fidelity");
    FidelitySpec fs;
    fs.lower = f.req<double>("lower");
    fs.upper = f.req<double>("upper");
    f.finish();
    if (!(fs.lower > 0 && fs.lower <= fs.upper)) throw ConfigError("/fidelity", "need 0 < lower <= upper");
    rc.fidelity = fs;
  }
  if (auto w = o.opt<int>("workers")) rc.workers = *w;
  if (auto l = o.opt<std::string>("level")) rc.level = parse_level(*l, "/level");
  if (auto out = o.opt<std::string>("out")) rc.out = *out;
  if (auto p = o.opt<double>("failure_penalty")) rc.failure_penalty = *p;
  if (o.has("cost")) {
    const auto& c = o.raw("cost");
    if (!c.is_array()) throw ConfigError("/cost", "expected a flat row-major array");
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!c[i].is_number()) throw ConfigError("/cost/" + std::to_string(i), "expected a number");
      rc.cost.push_back(c[i].get<double>());
    }
  }
  if (ov.workers) rc.workers = *ov.workers;
  if (ov.level) rc.level = *ov.level;
  if (ov.out) rc.out = *ov.out;
  if (rc.workers < 1) throw ConfigError("/workers", "must be at least 1");
}

}  // namespace

ResamplingSpec resampling_from_json(const json& j, const std::string& where) {
  Obj o(j, where);
  const auto kind = o.opt<std::string>("kind").value_or("cv");
  ResamplingSpec r;
  if (kind == "cv") {
    const auto folds = o.opt<std::size_t>("folds").value_or(3);
    const auto repeats = o.opt<std::size_t>("repeats").value_or(1);
    if (folds < 2) throw ConfigError(where + "/folds", "cross-validation needs at least 2 folds");
    if (repeats < 1) throw ConfigError(where + "/repeats", "must be at least 1");
    r = ResamplingSpec::cv(folds, repeats, o.opt<bool>("stratify").value_or(false));
  } else if (kind == "holdout") {
    const double frac = o.opt<double>("train_fraction").value_or(2.0 / 3.0);
    if (!(frac > 0 && frac < 1)) throw ConfigError(where + "/train_fraction", "must lie strictly between 0 and 1");
    r = ResamplingSpec::holdout(frac, o.opt<bool>("stratify").value_or(false));
  } else {
    throw ConfigError(where + "/kind", "expected 'cv' or 'holdout'");
  }
  o.finish();
  return r;
}

json resampling_to_json(const ResamplingSpec& r) {
  if (r.kind == ResamplingSpec::Kind::holdout)
    return {{"kind", "holdout"}, {"train_fraction", r.train_fraction}, {"stratify", r.stratify}};
  return {{"kind", "cv"}, {"folds", r.folds}, {"repeats", r.repeats}, {"stratify", r.stratify}};
}

Termination termination_from_json(const json& j, const std::string& where) {
  Obj o(j, where);
  Termination t;
  t.max_evals = o.opt<std::size_t>("max_evals");
  t.max_fidelity = o.opt<double>("max_fidelity");
  t.max_wall = o.opt<double>("max_wall");
  t.target = o.opt<double>("target");
  t.ei_threshold = o.opt<double>("ei_threshold");
  if (o.has("stagnation")) {
    Obj s(o.raw("stagnation"), where + "/stagnation");
    Stagnation st;
    st.window = s.req<std::size_t>("window");
    st.delta = s.opt<double>("delta").value_or(0.0);
    s.finish();
    t.stagnation = st;
  }
  o.finish();
  try {
    t.check();
  } catch (const Error& e) {
    throw ConfigError(where, e.what());
  }
  return t;
}

json termination_to_json(const Termination& t) {
  json j = json::object();
  if (t.max_evals) j["max_evals"] = *t.max_evals;
  if (t.max_fidelity) j["max_fidelity"] = *t.max_fidelity;
  if (t.max_wall) j["max_wall"] = *t.max_wall;
  if (t.target) j["target"] = *t.target;
  if (t.stagnation) j["stagnation"] = {{"window", t.stagnation->window}, {"delta", t.stagnation->delta}};
  if (t.ei_threshold) j["ei_threshold"] = *t.ei_threshold;
  return j;
}

RunConfig parse_run_config(const json& doc, const Overrides& ov) {
  Obj o(doc, "");
  RunConfig rc;
  parse_common(o, rc, ov);
  if (!o.has("tuner")) throw ConfigError("/tuner", "required field is missing");
  rc.tuner = tuner_spec_from_json(o.raw("tuner"));
  static const std::set<std::string> kinds{"random", "grid", "es", "bo", "hyperband", "racing"};
  if (!kinds.count(rc.tuner.kind)) throw ConfigError("/tuner/kind", "unknown tuner '" + rc.tuner.kind + "'");
  if (!o.has("termination")) throw ConfigError("/termination", "required field is missing");
  rc.termination = termination_from_json(o.raw("termination"), "/termination");
  if (o.has("outer")) rc.outer = resampling_from_json(o.raw("outer"), "/outer");
  if (auto f = o.opt<bool>("final_tuning")) rc.final_tuning = *f;
  o.finish();
  return rc;
}

json run_config_to_json(const RunConfig& rc) {
  json j;
  j["seed"] = rc.seed;
  json task;
  switch (rc.task.kind) {
    case TaskConfig::Kind::bundled: task["dataset"] = rc.task.name; break;
    case TaskConfig::Kind::csv:
      task["csv"] = rc.task.path;
      task["target"] = rc.task.target;
      if (rc.task.type) task["type"] = std::string(to_string(*rc.task.type));
      break;
    case TaskConfig::Kind::synthetic:
      task = {{"synthetic", rc.task.name}, {"dim", rc.task.dim}, {"noise_sd", rc.task.noise_sd}, {"folds", rc.task.folds}};
      break;
  }
  j["task"] = task;
  if (!rc.learner.empty()) j["learner"] = rc.learner;
  if (rc.space) j["space"] = *rc.space;
  j["tuner"] = tuner_spec_to_json(rc.tuner);
  j["resampling"] = resampling_to_json(rc.resampling);
  j["outer"] = resampling_to_json(rc.outer);
  if (rc.metric) j["metric"] = *rc.metric;
  j["termination"] = termination_to_json(rc.termination);
  if (rc.fidelity) j["fidelity"] = {{"lower", rc.fidelity->lower}, {"upper", rc.fidelity->upper}};
  j["workers"] = rc.workers;
  j["level"] = std::string(to_string(rc.level));
  j["out"] = rc.out;
  j["final_tuning"] = rc.final_tuning;
  if (rc.failure_penalty) j["failure_penalty"] = *rc.failure_penalty;
  if (!rc.cost.empty()) j["cost"] = rc.cost;
  return j;
}

BenchmarkConfig parse_benchmark_config(const json& doc, const Overrides& ov) {
  Obj o(doc, "");
  BenchmarkConfig bc;
  parse_common(o, bc.base, ov);
  if (!o.has("budget")) throw ConfigError("/budget", "required field is missing");
  const json& budget = o.raw("budget");
  bc.budget = termination_from_json(budget, "/budget");
  if (int(bool(bc.budget.max_evals)) + int(bool(bc.budget.max_fidelity)) + int(bool(bc.budget.max_wall)) != 1 ||
      bc.budget.target || bc.budget.stagnation || bc.budget.ei_threshold)
    throw ConfigError("/budget", "give exactly one of max_evals, max_fidelity or max_wall");
  if (!o.has("tuners") || !o.raw("tuners").is_array()) throw ConfigError("/tuners", "expected an array of tuners");
  const json& tuners = o.raw("tuners");
  if (tuners.size() < 2) throw ConfigError("/tuners", "≥ 2 tuners required");
  for (std::size_t i = 0; i < tuners.size(); ++i) {
    const std::string where = "/tuners/" + std::to_string(i);
    if (!tuners[i].is_object()) throw ConfigError(where, "expected an object");
    json t = tuners[i];
    if (t.contains("budget")) {
      if (termination_to_json(termination_from_json(t["budget"], where + "/budget")) != termination_to_json(bc.budget))
        throw ConfigError(where + "/budget", "mismatched budgets: every tuner must share the suite budget");
      t.erase("budget");
    }
    std::string label = t.value("kind", std::string());
    if (t.contains("label")) {
      if (!t["label"].is_string()) throw ConfigError(where + "/label", "expected a string");
      label = t["label"].get<std::string>();
      t.erase("label");
    }
    bc.labels.push_back(label);
    try {
      bc.tuners.push_back(tuner_spec_from_json(t));
    } catch (const ConfigError& e) {
      throw ConfigError(where, e.what());
    }
  }
  const auto given = bc.labels;
  for (std::size_t i = 0; i < bc.labels.size(); ++i)
    if (std::count(given.begin(), given.end(), given[i]) > 1 && given[i] == bc.tuners[i].kind)
      bc.labels[i] += "#" + std::to_string(i);
  for (std::size_t i = 0; i < bc.labels.size(); ++i)
    if (std::count(bc.labels.begin(), bc.labels.end(), bc.labels[i]) > 1)
      throw ConfigError("/tuners/" + std::to_string(i) + "/label", "duplicate label '" + bc.labels[i] + "'");
  if (auto s = o.opt<std::size_t>("seeds")) bc.seeds = *s;
  if (bc.seeds == 0) throw ConfigError("/seeds", "must be positive");
  const double total = bc.budget.max_evals ? double(*bc.budget.max_evals)
                       : bc.budget.max_fidelity ? *bc.budget.max_fidelity
                                                : *bc.budget.max_wall;
  if (o.has("checkpoints")) {
    const json& c = o.raw("checkpoints");
    if (!c.is_array() || c.empty()) throw ConfigError("/checkpoints", "expected a non-empty array of numbers");
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!c[i].is_number() || c[i].get<double>() <= 0 || c[i].get<double>() > total)
        throw ConfigError("/checkpoints/" + std::to_string(i), "must lie in (0, budget]");
      bc.checkpoints.push_back(c[i].get<double>());
    }
    std::sort(bc.checkpoints.begin(), bc.checkpoints.end());
  } else {
    for (int q = 1; q <= 4; ++q) bc.checkpoints.push_back(total * q / 4.0);
  }
  o.finish();
  return bc;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace hpo
