#include "hpo/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "hpo/core/errors.hpp"
#include "hpo/data/bundled.hpp"
#include "hpo/learn/pipeline.hpp"
#include "hpo/space/space_io.hpp"

namespace hpo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

// Tuner errors name fields like "tuner.mu"; the CLI reports JSON pointers.
[[noreturn]] void rethrow_as_pointer(const ConfigError& e, const std::string& fallback) {
  std::string f = e.field();
  std::replace(f.begin(), f.end(), '.', '/');
  if (f.empty() || f[0] != '/') f = f.rfind("tuner", 0) == 0 ? "/" + f : fallback;
  const std::string what = e.what();
  const auto colon = what.find(": ");
  throw ConfigError(f, colon == std::string::npos ? what : what.substr(colon + 2));
}

void validate_tuner(const TunerSpec& spec, const Objective& obj, const std::string& where) {
  try {
    validate_tuner_spec(spec, obj);
  } catch (const ConfigError& e) {
    if (where == "/tuner") rethrow_as_pointer(e, where);
    throw ConfigError(where, e.what());
  } catch (const Error& e) {
    throw ConfigError(where, e.what());
  }
}

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string fmt(double v, int prec = 4) {
  if (!std::isfinite(v)) return "NA";
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

double quantile(std::vector<double> v, double q) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return !std::isfinite(x); }), v.end());
  if (v.empty()) return nan_v;
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

Problem build_problem(const RunConfig& rc) {
  Problem p;
  const auto& t = rc.task;
  if (t.kind == TaskConfig::Kind::synthetic) {
    if (!rc.learner.empty()) throw ConfigError("/learner", "synthetic tasks take no learner");
    if (rc.space) throw ConfigError("/space", "synthetic tasks use their fixed space");
    if (rc.metric) throw ConfigError("/metric", "synthetic tasks take no metric");
    p.objective = std::make_shared<SyntheticObjective>(parse_synthetic_kind(t.name), t.dim, t.noise_sd, t.folds,
                                                       rc.fidelity);
    return p;
  }
  const std::uint64_t data_seed = derive_seed(rc.seed, 6);
  try {
    p.data = t.kind == TaskConfig::Kind::bundled ? bundled(t.name, data_seed) : read_csv_file(t.path, t.target, t.type);
  } catch (const Error& e) {
    throw ConfigError("/task", e.what());
  }
  p.learner = make_learner(rc.learner);
  const bool regression = p.data->task() == TaskType::regression;
  p.metric = find_metric(rc.metric.value_or(regression ? "mse" : "ce"));
  if (p.metric->regression != regression)
    throw ConfigError("/metric", "metric '" + p.metric->id + "' does not fit a " +
                                     std::string(to_string(p.data->task())) + " task");
  if (rc.space) p.space = space_from_json(*rc.space, "/space");
  Rng rng = make_rng(derive_seed(rc.seed, 5));
  try {
    p.plan = rc.resampling.instantiate(*p.data, rng);
    p.objective = std::make_shared<ResampledObjective>(p.learner, *p.data, p.plan, *p.metric, p.space, rc.fidelity,
                                                       rc.cost);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(rc.space ? "/space" : "/resampling", e.what());
  }
  return p;
}

ExecPolicy make_policy(const RunConfig& rc, JobLog* log) { return ExecPolicy{rc.workers, rc.level, log}; }

json config_record(const RunConfig& rc) {
  json j = run_config_to_json(rc);
  j.erase("workers");
  j.erase("level");
  j.erase("out");
  return j;
}

json archive_summary(const Archive& archive, std::size_t best_index, const std::optional<Metric>& metric) {
  json j;
  j["evaluations"] = archive.size();
  j["failed"] = archive.n_failed();
  j["total_fidelity"] = archive.total_fidelity();
  std::map<std::string, std::size_t> tags;
  for (const auto& e : archive.entries()) {
    const auto colon = e.tag.find(':');
    ++tags[colon == std::string::npos ? e.tag : e.tag.substr(0, colon)];
  }
  j["proposers"] = tags;
  if (best_index == 0) {
    j["best"] = nullptr;
    return j;
  }
  const auto& e = archive[best_index - 1];
  json b;
  b["index"] = e.index;
  b["config"] = config_to_json(e.config);
  b["loss"] = e.score;
  b["fidelity"] = e.fidelity;
  b["tag"] = e.tag;
  if (metric) {
    b["metric"] = metric->id;
    b["score"] = metric->direction == Direction::maximize ? -e.score : e.score;
  }
  j["best"] = b;
  return j;
}

std::string archive_summary_text(const json& s) {
  std::ostringstream os;
  os << "evaluations: " << s["evaluations"].get<std::size_t>() << " (" << s["failed"].get<std::size_t>()
     << " failed), total fidelity " << fmt(s["total_fidelity"].get<double>(), 3) << "\n";
  os << "proposers:";
  for (auto it = s["proposers"].begin(); it != s["proposers"].end(); ++it) os << " " << it.key() << "=" << it.value();
  os << "\n";
  if (s["best"].is_null()) {
    os << "no successful evaluation\n";
    return os.str();
  }
  const auto& b = s["best"];
  os << "best: #" << b["index"].get<std::size_t>() << " loss " << fmt(b["loss"].get<double>(), 6);
  if (b.contains("score")) os << " (" << b["metric"].get<std::string>() << " " << fmt(b["score"].get<double>(), 6) << ")";
  os << " at fidelity " << fmt(b["fidelity"].get<double>(), 3) << " by " << b["tag"].get<std::string>() << "\n";
  os << "config: " << b["config"].dump() << "\n";
  if (s.contains("stop_reason")) os << "stop reason: " << s["stop_reason"].get<std::string>() << "\n";
  return os.str();
}

TuneArtifacts cmd_tune(const RunConfig& rc, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  const Problem p = build_problem(rc);
  validate_tuner(rc.tuner, *p.objective, "/tuner");
  try {
    rc.termination.check();
  } catch (const Error& e) {
    throw ConfigError("/termination", e.what());
  }

  TuneOptions o;
  o.tuner = rc.tuner;
  o.termination = rc.termination;
  o.seed = rc.seed;
  o.policy = make_policy(rc);
  o.failure_penalty = rc.failure_penalty;
  log << "tuning " << p.objective->id() << " with " << rc.tuner.kind << "\n";
  auto out = tune(*p.objective, o);

  TuneArtifacts a;
  a.archive = std::move(out.archive);
  a.result = out.result;
  a.space_json = dump(space_to_json(p.objective->space()));
  a.summary = archive_summary(a.archive, a.result.best_index, p.metric);
  a.summary["schema"] = 1;
  a.summary["command"] = "tune";
  a.summary["objective"] = p.objective->id();
  a.summary["stop_reason"] = a.result.stop_reason;
  a.summary["iterations"] = a.result.iterations;
  a.summary["events"] = out.events;
  a.summary["config"] = config_record(rc);

  json timing;
  timing["workers"] = rc.workers;
  timing["level"] = std::string(to_string(rc.level));
  timing["tuning_seconds"] = a.result.seconds;
  timing["total_seconds"] = seconds_since(t0);
  timing["entries"] = archive_timing_json(a.archive);

  const fs::path dir(rc.out);
  write_file(dir / "archive.jsonl", archive_to_jsonl(a.archive));
  write_file(dir / "archive.csv", archive_to_csv(a.archive, p.objective->space()));
  write_file(dir / "trace.csv", trace_to_csv(trace(a.archive)));
  write_file(dir / "space.json", a.space_json);
  write_file(dir / "summary.json", dump(a.summary));
  write_file(dir / "timing.json", dump(timing));
  log << archive_summary_text(a.summary);
  log << "wrote " << dir.string() << "\n";
  return a;
}

NestedReport cmd_nested(const RunConfig& rc, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  if (rc.task.kind == TaskConfig::Kind::synthetic) throw ConfigError("/task", "nested runs need a dataset task");
  const Problem p = build_problem(rc);
  validate_tuner(rc.tuner, *p.objective, "/tuner");
  try {
    rc.termination.check();
  } catch (const Error& e) {
    throw ConfigError("/termination", e.what());
  }

  TuningSetup s;
  s.learner = p.learner;
  s.space = p.space;
  s.tuner = rc.tuner;
  s.termination = rc.termination;
  s.inner = rc.resampling;
  s.metric = *p.metric;
  s.fidelity = rc.fidelity;
  s.failure_penalty = rc.failure_penalty;
  s.cost = rc.cost;
  Rng rng = make_rng(derive_seed(rc.seed, 5));
  ResamplingPlan outer;
  try {
    outer = rc.outer.instantiate(*p.data, rng);
  } catch (const Error& e) {
    throw ConfigError("/outer", e.what());
  }
  log << "nested: " << outer.size() << " outer splits, inner " << rc.resampling.str() << ", tuner " << rc.tuner.kind
      << "\n";
  const auto rep = nested_evaluate(s, *p.data, outer, rc.seed, make_policy(rc), {.final_tuning = rc.final_tuning});

  json doc = nested_report_to_json(rep);
  for (std::size_t i = 0; i < rep.outer.size(); ++i)
    if (!rep.outer[i].archive.empty()) doc["outer"][i]["archive"] = "inner_" + std::to_string(i) + ".jsonl";
  doc["config"] = config_record(rc);
  json timing;
  timing["workers"] = rc.workers;
  timing["level"] = std::string(to_string(rc.level));
  timing["splits"] = nested_timing_json(rep);
  timing["total_seconds"] = seconds_since(t0);

  const fs::path dir(rc.out);
  for (std::size_t i = 0; i < rep.outer.size(); ++i)
    if (!rep.outer[i].archive.empty())
      write_file(dir / ("inner_" + std::to_string(i) + ".jsonl"), archive_to_jsonl(rep.outer[i].archive));
  if (rep.final) write_file(dir / "final.jsonl", archive_to_jsonl(rep.final->archive));
  const std::string table = nested_report_table(rep);
  write_file(dir / "nested_report.json", dump(doc));
  write_file(dir / "nested_report.txt", table);
  write_file(dir / "timing.json", dump(timing));
  log << table << "wrote " << dir.string() << "\n";
  return rep;
}

json cmd_benchmark(const BenchmarkConfig& bc, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  // validate every tuner against the first seed's problem before running anything
  {
    RunConfig first = bc.base;
    const Problem p = build_problem(first);
    for (std::size_t i = 0; i < bc.tuners.size(); ++i)
      validate_tuner(bc.tuners[i], *p.objective, "/tuners/" + std::to_string(i));
  }
  const std::size_t nt = bc.tuners.size();
  enum class Unit { evals, fidelity, wall };
  const Unit unit = bc.budget.max_evals ? Unit::evals : bc.budget.max_fidelity ? Unit::fidelity : Unit::wall;

  // best[t][s][c]: best-so-far loss of tuner t on seed s at checkpoint c
  std::vector<std::vector<std::vector<double>>> best(nt, std::vector<std::vector<double>>(bc.seeds));
  std::vector<std::vector<double>> overhead(nt, std::vector<double>(bc.seeds, 0.0));
  std::vector<std::pair<fs::path, std::string>> traces;

  for (std::size_t s = 0; s < bc.seeds; ++s) {
    RunConfig rc = bc.base;
    rc.seed = derive_seed(bc.base.seed, s);
    const Problem p = build_problem(rc);
    for (std::size_t t = 0; t < nt; ++t) {
      TuneOptions o;
      o.tuner = bc.tuners[t];
      o.termination = bc.budget;
      o.seed = rc.seed;
      o.policy = make_policy(bc.base);
      o.failure_penalty = bc.base.failure_penalty;
      const auto out = tune(*p.objective, o);
      double eval_seconds = 0.0;
      for (const auto& e : out.archive.entries()) eval_seconds += e.seconds;
      overhead[t][s] = std::max(0.0, out.result.seconds - eval_seconds);
      const auto tr = trace(out.archive);
      for (double c : bc.checkpoints) {
        double v = nan_v;
        for (const auto& pt : tr) {
          const double used = unit == Unit::evals      ? static_cast<double>(pt.index)
                              : unit == Unit::fidelity ? pt.cumulative_fidelity
                                                       : pt.cumulative_seconds;
          if (used > c + 1e-9) break;
          v = pt.best;
        }
        best[t][s].push_back(v);
      }
      traces.emplace_back(fs::path("traces") / (bc.labels[t] + "_seed" + std::to_string(s) + ".csv"), trace_to_csv(tr));
    }
    log << "seed " << s + 1 << "/" << bc.seeds << " done\n";
  }

  json doc;
  doc["schema"] = 1;
  doc["command"] = "benchmark";
  doc["budget"] = termination_to_json(bc.budget);
  doc["seeds"] = bc.seeds;
  doc["checkpoints"] = bc.checkpoints;
  doc["config"] = config_record(bc.base);
  auto& tuners = doc["tuners"] = json::array();
  for (std::size_t t = 0; t < nt; ++t) {
    json e;
    e["label"] = bc.labels[t];
    e["tuner"] = tuner_spec_to_json(bc.tuners[t]);
    auto& cps = e["checkpoints"] = json::array();
    for (std::size_t c = 0; c < bc.checkpoints.size(); ++c) {
      std::vector<double> v;
      for (std::size_t s = 0; s < bc.seeds; ++s) v.push_back(best[t][s][c]);
      cps.push_back({{"budget", bc.checkpoints[c]},
                     {"q25", num_or_null(quantile(v, 0.25))},
                     {"median", num_or_null(quantile(v, 0.5))},
                     {"q75", num_or_null(quantile(v, 0.75))}});
    }
    json fin = json::array();
    for (std::size_t s = 0; s < bc.seeds; ++s) fin.push_back(num_or_null(best[t][s].back()));
    e["final_best"] = fin;
    tuners.push_back(std::move(e));
  }
  // wins[a][b]: share of seeds where a ends strictly below b, ties counted half
  auto final_of = [&](std::size_t t, std::size_t s) {
    const double v = best[t][s].back();
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  json wins;
  for (std::size_t a = 0; a < nt; ++a)
    for (std::size_t b = 0; b < nt; ++b) {
      if (a == b) continue;
      double w = 0.0;
      for (std::size_t s = 0; s < bc.seeds; ++s) {
        if (final_of(a, s) < final_of(b, s)) w += 1.0;
        else if (final_of(a, s) == final_of(b, s)) w += 0.5;
      }
      wins[bc.labels[a]][bc.labels[b]] = w / static_cast<double>(bc.seeds);
    }
  doc["wins"] = wins;

  std::ostringstream tab;
  tab << std::left << std::setw(16) << "tuner" << std::setw(12) << "budget" << std::setw(12) << "q25" << std::setw(12)
      << "median" << std::setw(12) << "q75" << "overhead_s\n";
  std::vector<double> med_over(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    med_over[t] = quantile(overhead[t], 0.5);
    for (const auto& cp : doc["tuners"][t]["checkpoints"]) {
      auto cell = [&](const char* k) { return cp[k].is_null() ? std::string("NA") : fmt(cp[k].get<double>()); };
      tab << std::setw(16) << bc.labels[t] << std::setw(12) << fmt(cp["budget"].get<double>(), 2) << std::setw(12)
          << cell("q25") << std::setw(12) << cell("median") << std::setw(12) << cell("q75") << fmt(med_over[t], 4)
          << "\n";
    }
  }
  tab << "\nwins at the final checkpoint (row beats column):\n";
  for (std::size_t a = 0; a < nt; ++a) {
    tab << std::setw(16) << bc.labels[a];
    for (std::size_t b = 0; b < nt; ++b)
      tab << std::setw(10) << (a == b ? std::string("-") : fmt(wins[bc.labels[a]][bc.labels[b]].get<double>(), 2));
    tab << "\n";
  }

  json timing;
  timing["workers"] = bc.base.workers;
  timing["level"] = std::string(to_string(bc.base.level));
  timing["total_seconds"] = seconds_since(t0);
  for (std::size_t t = 0; t < nt; ++t)
    timing["overhead_seconds"][bc.labels[t]] = {{"median", med_over[t]}, {"per_seed", overhead[t]}};

  const fs::path dir(bc.base.out);
  for (const auto& [rel, text] : traces) write_file(dir / rel, text);
  write_file(dir / "benchmark.json", dump(doc));
  write_file(dir / "benchmark.txt", tab.str());
  write_file(dir / "timing.json", dump(timing));
  log << tab.str() << "wrote " << dir.string() << "\n";
  return doc;
}

json cmd_report(const std::string& path, const std::optional<std::string>& out_dir, std::ostream& log) {
  fs::path file(path);
  if (fs::is_directory(file)) file /= "archive.jsonl";
  if (!fs::exists(file)) throw ConfigError(file.string(), "no archive found");
  Archive archive;
  try {
    archive = archive_from_jsonl(read_text(file));
  } catch (const std::exception& e) {
    throw ConfigError(file.string(), e.what());
  }
  std::optional<Metric> metric;
  const fs::path summary_file = file.parent_path() / "summary.json";
  if (fs::exists(summary_file)) {
    const json prior = read_json_file(summary_file.string());
    if (prior.contains("best") && prior["best"].is_object() && prior["best"].contains("metric"))
      metric = find_metric(prior["best"]["metric"].get<std::string>());
  }
  std::size_t best_pos = 0;  // 1-based position, 0 when every entry failed
  if (archive.n_failed() < archive.size())
    best_pos = static_cast<std::size_t>(&incumbent(archive) - archive.entries().data()) + 1;
  json s = archive_summary(archive, best_pos, metric);
  s["schema"] = 1;
  s["command"] = "report";
  s["archive"] = file.string();

  const auto tr = trace(archive);
  json checkpoints = json::array();
  std::ostringstream os;
  os << archive_summary_text(s) << "best so far:\n";
  for (int q = 1; q <= 4 && !tr.empty(); ++q) {
    const std::size_t k = std::max<std::size_t>(1, tr.size() * q / 4);
    const auto& pt = tr[k - 1];
    checkpoints.push_back({{"evaluations", k}, {"cumulative_fidelity", pt.cumulative_fidelity}, {"best", num_or_null(pt.best)}});
    os << "  after " << std::setw(6) << k << " evaluations: " << fmt(pt.best, 6) << "\n";
  }
  s["trace"] = checkpoints;
  log << os.str();
  if (out_dir) {
    write_file(fs::path(*out_dir) / "report.json", dump(s));
    write_file(fs::path(*out_dir) / "report.txt", os.str());
  }
  return s;
}

}  // namespace hpo
