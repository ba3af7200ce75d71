// Serial references against the OpenMP kernels. Outputs are compared once
// before timing; a mismatch aborts the run.
#include <benchmark/benchmark.h>

#include <cstdlib>
#include <iostream>
#include <omp.h>

#include "hpo/data/bundled.hpp"
#include "hpo/data/metrics.hpp"
#include "hpo/learn/knn.hpp"
#include "hpo/objective/evaluator.hpp"
#include "hpo/tuners/gp.hpp"

using namespace hpo;

namespace {

const Dataset& knn_data() {
  static const Dataset d = smooth_classification(4000, 3);
  return d;
}

const KnnModel& knn_model() {
  static const ModelPtr m = [] {
    KnnLearner l;
    Config c({{"k", std::log(15.0)}, {"distance", 2.0}, {"kernel", std::string("optimal")}});
    return train_model(l, smooth_classification(2000, 1), c, 1);
  }();
  return dynamic_cast<const KnnModel&>(*m);
}

const GaussianProcess& gp() {
  static const GaussianProcess g = [] {
    Rng rng = make_rng(5);
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (int i = 0; i < 200; ++i) {
      const double a = uniform01(rng), b = uniform01(rng), c = uniform01(rng);
      x.push_back({a, b, c});
      y.push_back(std::sin(6 * a) + b * b - c);
    }
    return GaussianProcess::fit_with(x, y, {{0.3, 0.3, 0.3}, 1.0, 1e-3});
  }();
  return g;
}

std::vector<std::vector<double>> gp_queries() {
  Rng rng = make_rng(9);
  std::vector<std::vector<double>> q(20000, std::vector<double>(3));
  for (auto& v : q)
    for (auto& x : v) x = uniform01(rng);
  return q;
}

const ResampledObjective& knn_objective() {
  static const ResampledObjective obj = [] {
    const Dataset d = smooth_classification(600, 2);
    Rng rng = make_rng(1);
    auto plan = ResamplingSpec::cv(5).instantiate(d, rng);
    return ResampledObjective(std::make_shared<KnnLearner>(), d, plan, find_metric("ce"));
  }();
  return obj;
}

std::vector<Proposal> batch(std::size_t n) {
  Rng rng = make_rng(4);
  std::vector<Proposal> b;
  for (std::size_t i = 0; i < n; ++i) b.push_back({sample_uniform(knn_objective().space(), rng), std::nullopt, "bench"});
  return b;
}

Archive run_batch(int workers) {
  EvaluatorOptions o;
  o.seed = 3;
  o.policy = {workers, ParallelLevel::batch};
  Archive a;
  Evaluator(knn_objective(), o).run(a, batch(16));
  return a;
}

void check_agreement() {
  if (knn_model().predict(knn_data()).data() != knn_model().predict_serial(knn_data()).data()) {
    std::cerr << "knn predict differs from the serial reference\n";
    std::exit(1);
  }
  const auto q = gp_queries();
  const auto a = gp().predict_batch(q), b = gp().predict_batch_serial(q);
  for (std::size_t i = 0; i < q.size(); ++i)
    if (a[i].mean != b[i].mean || a[i].sd != b[i].sd) {
      std::cerr << "GP batch prediction differs from the serial reference\n";
      std::exit(1);
    }
  if (archive_to_jsonl(run_batch(1)) != archive_to_jsonl(run_batch(omp_get_max_threads()))) {
    std::cerr << "batch evaluation depends on the worker count\n";
    std::exit(1);
  }
}

void BM_knn_predict_serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(knn_model().predict_serial(knn_data()));
}
void BM_knn_predict_omp(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(knn_model().predict(knn_data()));
}
void BM_gp_predict_serial(benchmark::State& st) {
  const auto q = gp_queries();
  for (auto _ : st) benchmark::DoNotOptimize(gp().predict_batch_serial(q));
}
void BM_gp_predict_omp(benchmark::State& st) {
  const auto q = gp_queries();
  for (auto _ : st) benchmark::DoNotOptimize(gp().predict_batch(q));
}
void BM_batch_eval(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(run_batch(static_cast<int>(st.range(0))));
}

}  // namespace

BENCHMARK(BM_knn_predict_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_knn_predict_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gp_predict_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gp_predict_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_batch_eval)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  check_agreement();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
