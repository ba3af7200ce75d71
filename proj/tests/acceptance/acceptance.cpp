// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hpo/core/errors.hpp"
#include "hpo/data/bundled.hpp"
#include "hpo/data/metrics.hpp"
#include "hpo/learn/elastic_net.hpp"
#include "hpo/learn/pipeline.hpp"
#include "hpo/learn/threshold.hpp"
#include "hpo/nested/nested.hpp"
#include "hpo/tuners/acquisition.hpp"
#include "hpo/tuners/gp.hpp"
#include "hpo/tuners/hyperband.hpp"
#include "hpo/tuners/racing.hpp"

using namespace hpo;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::atomic<int> leakage_errors{0};

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

Termination evals(std::size_t n) {
  Termination t;
  t.max_evals = n;
  return t;
}

// 1
Outcome hyperband_budget() {
  Outcome o;
  int brackets = 0;
  for (unsigned eta : {2u, 3u})
    for (double upp : {8.0, 9.0, 27.0, 81.0}) {
      const auto s = hyperband_schedule(upp, eta);
      int s_max = 0;
      while (std::pow(double(eta), s_max + 1) <= upp) ++s_max;
      const double B = (s_max + 1) * upp;
      if (s.s_max != std::size_t(s_max) || std::abs(s.budget - B) > 1e-9 || s.brackets.size() != std::size_t(s_max + 1))
        o.pass = false;
      for (const auto& b : s.brackets) {
        ++brackets;
        const double es = std::pow(double(eta), double(b.s));
        const double r0 = upp / es;
        // starting population from the closed form, then the budget inequality summed stage by stage
        const double p0 = std::ceil((s_max + 1) * es / (b.s + 1) - 1e-12);
        if (double(b.p) != p0 || b.stages.size() != b.s + 1) o.pass = false;
        double spend = 0.0;
        for (std::size_t t = 0; t <= b.s; ++t) {
          const double n = std::floor(p0 / std::pow(double(eta), double(t)));
          const double r = r0 * std::pow(double(eta), double(t));
          if (double(b.stages[t].n) != n || std::abs(b.stages[t].fidelity - r) > 1e-9 * r) o.pass = false;
          spend += n * r;
        }
        if (spend > B * (1 + 1e-12)) o.pass = false;
      }
    }
  const auto fig = hyperband_schedule(8, 2);
  std::vector<std::size_t> pops;
  for (const auto& b : fig.brackets) pops.push_back(b.stages.front().n);
  if (pops != std::vector<std::size_t>{8, 6, 4, 4}) o.pass = false;
  o.detail = std::to_string(brackets) + " brackets checked; eta=2, upp=8 populations " + std::to_string(pops[0]) + "/" +
             std::to_string(pops[1]) + "/" + std::to_string(pops[2]) + "/" + std::to_string(pops[3]);
  return o;
}

// 2
Outcome ei_monte_carlo() {
  Outcome o;
  Rng rng = make_rng(2024);
  std::uniform_real_distribution<double> u(-2, 2), su(0.05, 2);
  std::normal_distribution<double> z(0, 1);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double m = u(rng), s = su(rng), c = u(rng);
    double acc = 0.0;
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) acc += std::max(c - (m + s * z(rng)), 0.0);
    worst = std::max(worst, std::abs(acc / draws - expected_improvement(m, s, c)));
  }
  if (worst >= 1e-2) o.pass = false;
  // deterministic limits
  if (expected_improvement(0.3, 0.0, 1.0) != 0.7 || expected_improvement(1.5, 0.0, 1.0) != 0.0) o.pass = false;
  if (expected_improvement(100.0, 1.0, 0.0) != 0.0) o.pass = false;
  o.detail = "max |EI - MC| = " + fmt(worst, 3) + " over 50 triples x 1e6 draws";
  return o;
}

// 3
Outcome gp_sanity() {
  Outcome o;
  double interp = 0.0, rel_sd = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng = make_rng(seed);
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (int i = 0; i < 12; ++i) {
      const double a = uniform01(rng), b = uniform01(rng);
      x.push_back({a, b});
      y.push_back(std::sin(5 * a) + std::cos(3 * b) + a * b);
    }
    const auto gp = GaussianProcess::fit(x, y, {.seed = seed, .fixed_noise_sd = 0.0});
    for (std::size_t i = 0; i < x.size(); ++i) interp = std::max(interp, std::abs(gp.predict(x[i]).mean - y[i]));
    const auto far = gp.predict({100.0, -100.0});
    const double prior = gp.hyper().signal_sd * gp.y_sd();
    rel_sd = std::max(rel_sd, std::abs(far.sd - prior) / prior);
  }
  o.pass = interp <= 1e-6 && rel_sd <= 0.05;
  o.detail = "max interpolation error " + fmt(interp, 3) + ", far-field sd off prior by " + fmt(100 * rel_sd, 3) + "%";
  return o;
}

// 4
Outcome overtuning() {
  Outcome o;
  double inner = 0.0, outer = 0.0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    const auto data = random_binary(100, 2, 500 + s);
    TuningSetup t;
    t.learner = make_learner("featureless_random");
    t.tuner = {"random", {}};
    t.termination = evals(100);
    t.inner = ResamplingSpec::holdout();
    t.metric = find_metric("ce");
    Rng rng = make_rng(derive_seed(77, s));
    const auto plan = make_kfold(data.n_rows(), 3, 1, {}, rng);
    const auto rep = nested_evaluate(t, data, plan, s);
    if (!rep.aggregate || !rep.inner_mean) return {false, "seed " + std::to_string(s) + " produced no estimate"};
    inner += *rep.inner_mean;
    outer += *rep.aggregate;
  }
  inner /= seeds;
  outer /= seeds;
  o.pass = inner < 0.45 && outer >= 0.45 && outer <= 0.55;
  o.detail = "mean inner best CE " + fmt(inner) + ", mean nested outer CE " + fmt(outer) + " (20 seeds)";
  return o;
}

double best_of(const Archive& a) { return incumbent(a).score; }

// 5
Outcome rs_vs_gs() {
  SyntheticObjective obj(SyntheticKind::low_effective_dim, 2);
  std::vector<double> rs, gs;
  for (std::uint64_t s = 0; s < 50; ++s) {
    rs.push_back(best_of(tune(obj, {.tuner = {"random", {}}, .termination = evals(9), .seed = s}).archive));
    gs.push_back(best_of(tune(obj, {.tuner = {"grid", {{"resolution", 3}}}, .termination = evals(9), .seed = s}).archive));
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
  };
  const double mr = median(rs), mg = median(gs);
  return {mr <= mg, "RS median best " + fmt(mr) + " vs GS median best " + fmt(mg) + " (50 seeds, 9 evals)"};
}

// 6
Outcome bo_vs_rs() {
  SyntheticObjective obj(SyntheticKind::branin, 2);
  int wins = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const double bo = best_of(tune(obj, {.tuner = {"bo", {}}, .termination = evals(30), .seed = s}).archive);
    const double rs = best_of(tune(obj, {.tuner = {"random", {}}, .termination = evals(30), .seed = s}).archive);
    wins += bo < rs;
  }
  return {wins >= 14, "BO beats RS on " + std::to_string(wins) + "/20 paired seeds"};
}

// 7
Outcome racing() {
  const RaceOptions opt{.t_first = 5, .t_each = 8, .test = RaceTest::t_test, .alpha = 0.05};
  const std::size_t folds = 12;
  int early = 0, together = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng = make_rng(seed);
    std::normal_distribution<double> noise(0, 1);
    std::vector<std::vector<double>> worse(2, std::vector<double>(folds)), same(2, std::vector<double>(folds));
    for (std::size_t f = 0; f < folds; ++f) {
      worse[0][f] = noise(rng);
      worse[1][f] = 5.0 + noise(rng);
      same[0][f] = noise(rng);
      same[1][f] = noise(rng);
    }
    const auto a = race_scores(2, folds, [&](std::size_t i, std::size_t f) { return worse[i][f]; }, opt);
    if (a.eliminated_at[1] > 0 && a.eliminated_at[1] < folds / 2) ++early;
    const auto b = race_scores(2, folds, [&](std::size_t i, std::size_t f) { return same[i][f]; }, opt);
    if (b.survivors.size() == 2) ++together;
  }
  return {early >= 95 && together >= 90, "5-sd config eliminated before fold 6 in " + std::to_string(early) +
                                             "/100 races; identical configs together in " + std::to_string(together) +
                                             "/100"};
}

// 8
Outcome metrics() {
  Rng rng = make_rng(8);
  int checked = 0, mismatched = 0, identity_failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 49;
    std::vector<double> y(n), s(n), lab(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = double(rng() % 2);
      s[i] = double(rng() % 9) / 8.0;
      lab[i] = double(rng() % 2);
    }
    if (std::count(y.begin(), y.end(), 1.0) == 0) y[0] = 1.0;
    if (std::count(y.begin(), y.end(), 0.0) == 0) y[n - 1] = 0.0;
    double pairs = 0.0, hits = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (y[i] == 1.0 && y[j] == 0.0) {
          pairs += 1.0;
          hits += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
        }
    const auto a = score("auc", y, PredictionMatrix::column(s));
    ++checked;
    if (!a || *a != hits / pairs) ++mismatched;
    const auto f = PredictionMatrix::column(lab);
    if (std::abs(*score("ce", y, f) + *score("acc", y, f) - 1.0) > 1e-12) ++identity_failures;
    const auto tpr = score("tpr", y, f), fnr = score("fnr", y, f);
    if (!tpr || !fnr || std::abs(*tpr + *fnr - 1.0) > 1e-12) ++identity_failures;
  }
  return {mismatched == 0 && identity_failures == 0, std::to_string(checked) + " AUC instances, " +
                                                         std::to_string(mismatched) + " differ from brute force; " +
                                                         std::to_string(identity_failures) + " identity failures"};
}

// 9
Outcome elastic_net() {
  Rng rng = make_rng(9);
  std::normal_distribution<double> z(0, 1);
  double ols_err = 0.0, lasso_err = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    const int n = 80, p = 5;
    std::vector<double> x(n * p), y(n);
    Eigen::MatrixXd A(n, p + 1);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
      A(i, 0) = 1.0;
      double yi = 0.7;
      for (int j = 0; j < p; ++j) {
        x[i * p + j] = z(rng) * (1.0 + j);
        A(i, j + 1) = x[i * p + j];
        yi += (j - 2.0) * x[i * p + j];
      }
      y[i] = b[i] = yi + z(rng);
    }
    const auto fit = fit_elastic_net_gaussian(x, n, p, y, 0.0, 0.0, {.max_iter = 200000, .tol = 1e-13});
    const Eigen::VectorXd beta = (A.transpose() * A).ldlt().solve(A.transpose() * b);
    ols_err = std::max(ols_err, std::abs(fit.intercept - beta[0]));
    for (int j = 0; j < p; ++j) ols_err = std::max(ols_err, std::abs(fit.theta[j] - beta[j + 1]));

    // orthonormal, centered design: X'X = n I
    Eigen::MatrixXd M(n, p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < p; ++j) M(i, j) = z(rng);
    M = M.rowwise() - M.colwise().mean();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
    const Eigen::MatrixXd X = Eigen::MatrixXd(qr.householderQ() * Eigen::MatrixXd::Identity(n, p)) * std::sqrt(double(n));
    std::vector<double> xo(n * p), yo(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) xo[i * p + j] = X(i, j);
      yo[i] = 1.5 * X(i, 0) - 0.4 * X(i, 1) + 0.1 * X(i, 3) + z(rng);
    }
    for (double lambda : {0.02, 0.2, 1.0}) {
      const auto lf = fit_elastic_net_gaussian(xo, n, p, yo, lambda, 1.0);
      for (int j = 0; j < p; ++j) {
        double c = 0.0;
        for (int i = 0; i < n; ++i) c += X(i, j) * yo[i];
        c /= n;
        const double st = std::copysign(std::max(std::abs(c) - lambda, 0.0), c);
        lasso_err = std::max(lasso_err, std::abs(lf.theta[j] - st));
      }
    }
  }
  return {ols_err <= 1e-6 && lasso_err <= 1e-6,
          "OLS max deviation " + fmt(ols_err, 3) + ", lasso max deviation " + fmt(lasso_err, 3)};
}

// 10
Outcome threshold() {
  Outcome o;
  const std::vector<double> y{0, 0, 1, 1}, s{0.1, 0.4, 0.6, 0.9};
  const auto r = tune_threshold(y, PredictionMatrix::column(s), find_metric("acc"));
  double correct = 0;
  for (std::size_t i = 0; i < 4; ++i) correct += (s[i] >= r.rule.threshold) == (y[i] == 1.0);
  const bool example = correct == 4.0 && r.achieved == 1.0;

  Rng rng = make_rng(10);
  int worse = 0, below_oracle = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + rng() % 60;
    std::vector<double> yy(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      yy[i] = double(i % 2);
      p[i] = std::clamp(0.25 * yy[i] + 0.75 * uniform01(rng), 0.0, 1.0);
    }
    const auto f = PredictionMatrix::binary_probabilities(p);
    const auto& acc = find_metric("acc");
    const auto t = tune_threshold(yy, f, acc);
    if (t.achieved < *score(acc, yy, f)) ++worse;
    // exhaustive oracle over every cut of the sorted scores
    double best = 0.0;
    std::vector<double> cuts = p;
    cuts.push_back(2.0);
    for (double c : cuts) {
      double k = 0;
      for (std::size_t i = 0; i < n; ++i) k += (p[i] >= c) == (yy[i] == 1.0);
      best = std::max(best, k / double(n));
    }
    if (t.achieved < best - 1e-12) ++below_oracle;
  }
  o.pass = example && worse == 0 && below_oracle == 0;
  o.detail = "worked example t=" + fmt(r.rule.threshold) + " acc=" + fmt(r.achieved) + "; " + std::to_string(worse) +
             "/100 worse than default, " + std::to_string(below_oracle) + "/100 below the exhaustive optimum";
  return o;
}

// 11
Outcome determinism() {
  const auto data = random_binary(80, 3, 11);
  TuningSetup t;
  t.learner = make_learner("knn");
  t.tuner = {"es", {{"mu", 3}, {"lambda", 4}}};
  t.termination = evals(10);
  t.inner = ResamplingSpec::cv(2);
  t.metric = find_metric("ce");
  Rng rng = make_rng(3);
  const auto outer = make_kfold(data.n_rows(), 3, 1, {}, rng);
  auto fingerprint = [&](const NestedReport& r) {
    std::string s = nested_report_to_json(r).dump();
    for (const auto& o : r.outer) s += archive_to_jsonl(o.archive);
    return s;
  };
  const std::string ref = fingerprint(nested_evaluate(t, data, outer, 21));
  int runs = 0, diffs = 0;
  for (auto level :
       {ParallelLevel::outer, ParallelLevel::batch, ParallelLevel::config, ParallelLevel::fold, ParallelLevel::combined})
    for (int w : {1, 4, 8}) {
      ++runs;
      if (fingerprint(nested_evaluate(t, data, outer, 21, {w, level})) != ref) ++diffs;
    }
  return {diffs == 0, std::to_string(runs) + " runs (5 levels x workers 1/4/8), " + std::to_string(diffs) + " differ"};
}

// 12
Outcome leakage(std::size_t checks_before) {
  const std::size_t n = leakage_checks() - checks_before;
  return {leakage_errors == 0 && n > 0,
          std::to_string(n) + " containment checks in this run, " + std::to_string(leakage_errors.load()) + " fired"};
}

}  // namespace

int main() {
  const std::size_t checks0 = leakage_checks();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"hyperband budget law", hyperband_budget},
      {"expected improvement vs Monte Carlo", ei_monte_carlo},
      {"GP interpolation and prior reversion", gp_sanity},
      {"overtuning and nested resampling", overtuning},
      {"random vs grid search, low effective dimension", rs_vs_gs},
      {"BO vs random search on branin", bo_vs_rs},
      {"racing soundness", racing},
      {"metric oracles", metrics},
      {"elastic-net oracles", elastic_net},
      {"threshold tuning", threshold},
      {"determinism across workers and levels", determinism},
      {"leakage guard", [checks0] { return leakage(checks0); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const LeakageError& e) {
      ++leakage_errors;
      o = {false, std::string("leakage: ") + e.what()};
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("[%s] %2zu %-48s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
