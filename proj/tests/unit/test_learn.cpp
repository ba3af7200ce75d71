#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "hpo/core/errors.hpp"
#include "hpo/data/bundled.hpp"
#include "hpo/learn/cart.hpp"
#include "hpo/learn/elastic_net.hpp"
#include "hpo/learn/estimate.hpp"
#include "hpo/learn/featureless.hpp"
#include "hpo/learn/knn.hpp"
#include "hpo/learn/pipeline.hpp"
#include "hpo/learn/threshold.hpp"

using namespace hpo;

namespace {

Config knn_cfg(double k, const std::string& kernel = "rectangular", double p = 2.0) {
  return Config({{"k", std::log(k)}, {"kernel", kernel}, {"distance", p}});
}

std::vector<double> column_of(const PredictionMatrix& f, std::size_t k) {
  std::vector<double> v(f.rows());
  for (std::size_t i = 0; i < f.rows(); ++i) v[i] = f(i, k);
  return v;
}

// Standard normal quantile by bisection on the CDF written with erfc.
double qnorm_bisect(double p) {
  double lo = -40, hi = 40;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Dataset gaussian_design(std::size_t n, std::size_t p, std::uint64_t seed, std::vector<double> beta) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> z(0, 1);
  std::vector<Column> cols;
  std::vector<std::vector<double>> x(p, std::vector<double>(n));
  for (auto& c : x)
    for (auto& v : c) v = z(rng);
  std::vector<double> y(n, 0.5);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) y[i] += beta[j] * x[j][i];
    y[i] += 0.1 * z(rng);
  }
  for (std::size_t j = 0; j < p; ++j) cols.push_back(Column::numeric("x" + std::to_string(j), x[j]));
  return Dataset(std::move(cols), std::move(y), TaskType::regression);
}

}  // namespace

TEST_CASE("1-NN reproduces training labels") {
  auto d = separable_classification();
  KnnLearner knn;
  auto model = train_model(knn, d, knn_cfg(1, "optimal"), 0);
  auto labels = model->predict(d).labels();
  CHECK(std::equal(labels.begin(), labels.end(), d.target().begin()));
  CHECK(*score_model(*model, d, find_metric("ce")) == 0.0);
}

TEST_CASE("k-NN with rectangular kernel and k = n predicts the training majority or mean") {
  auto d = smooth_classification(40, 3);
  KnnLearner knn;
  auto model = knn.train(d, knn_cfg(40), 0);
  const auto counts = d.class_counts();
  auto f = model->predict(d);
  for (std::size_t i = 0; i < f.rows(); ++i) {
    CHECK(f(i, 0) == doctest::Approx(counts[0] / 40.0));
    CHECK(f(i, 1) == doctest::Approx(counts[1] / 40.0));
  }
  auto r = noisy_linear_regression();
  auto sub = r.subset(std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  const double mean = std::accumulate(sub.target().begin(), sub.target().end(), 0.0) / 10.0;
  auto rm = knn.train(sub, knn_cfg(10), 0)->predict(r);
  for (std::size_t i = 0; i < rm.rows(); ++i) CHECK(rm(i, 0) == doctest::Approx(mean));
}

TEST_CASE("k-NN rejects k larger than the training set") {
  auto d = separable_classification().subset(std::vector<std::size_t>{0, 1, 2});
  KnnLearner knn;
  CHECK_THROWS_AS(knn.train(d, knn_cfg(7), 0), FitError);
}

TEST_CASE("k-NN kernel weights") {
  std::vector<double> d{0.1, 0.5, 0.9};
  auto opt = knn_weights(KnnKernel::optimal, d, 2);
  // closed form for k = 3, two features: (1/3)(2 - (2i - 1)/3)
  CHECK(opt[0] == doctest::Approx(5.0 / 9));
  CHECK(opt[1] == doctest::Approx(1.0 / 3));
  CHECK(opt[2] == doctest::Approx(1.0 / 9));
  for (std::size_t k : {1u, 5u, 17u, 49u})
    for (std::size_t dim : {1u, 2u, 7u}) {
      auto w = knn_weights(KnnKernel::optimal, std::vector<double>(k, 0.5), dim);
      CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0));
    }
  auto g = knn_weights(KnnKernel::gaussian, d, 2);
  const double q = std::abs(qnorm_bisect(1.0 / 8.0));
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(g[i] == doctest::Approx(std::exp(-0.5 * d[i] * q * d[i] * q) / std::sqrt(2 * M_PI)).epsilon(1e-9));
  auto e = knn_weights(KnnKernel::epanechnikov, d, 2);
  CHECK(e[1] == doctest::Approx(0.75 * 0.75));
  auto inv = knn_weights(KnnKernel::inv, d, 2);
  CHECK(inv[0] == doctest::Approx(10.0));
  auto rank = knn_weights(KnnKernel::rank, d, 2);
  CHECK(rank == std::vector<double>{3, 2, 1});
}

TEST_CASE("parallel k-NN predict equals the serial reference") {
  auto d = smooth_classification(300, 5);
  auto q = smooth_classification(600, 6);
  for (const char* kernel : {"optimal", "gaussian", "rank"}) {
    KnnModel m(d, KnnLearner::params_from(KnnLearner().space().transform(knn_cfg(9, kernel, 1.5))));
    CHECK(m.predict(q) == m.predict_serial(q));
  }
}

TEST_CASE("elastic net recovers least squares") {
  auto d = gaussian_design(60, 4, 1, {1.0, -2.0, 0.5, 3.0});
  const auto x = d.numeric_matrix();
  std::vector<double> y(d.target().begin(), d.target().end());
  auto fit = fit_elastic_net_gaussian(x, 60, 4, y, 0.0, 0.0);
  CHECK(fit.converged);
  // oracle: normal equations with an intercept column
  Eigen::MatrixXd A(60, 5);
  Eigen::VectorXd b(60);
  for (int i = 0; i < 60; ++i) {
    A(i, 0) = 1.0;
    for (int j = 0; j < 4; ++j) A(i, j + 1) = x[static_cast<std::size_t>(i * 4 + j)];
    b[i] = y[static_cast<std::size_t>(i)];
  }
  Eigen::VectorXd beta = (A.transpose() * A).ldlt().solve(A.transpose() * b);
  CHECK(std::abs(fit.intercept - beta[0]) < 1e-6);
  for (int j = 0; j < 4; ++j) CHECK(std::abs(fit.theta[static_cast<std::size_t>(j)] - beta[j + 1]) < 1e-6);
}

TEST_CASE("lasso on an orthonormal design matches soft thresholding") {
  const int n = 40, p = 5;
  Rng rng = make_rng(2);
  std::normal_distribution<double> z(0, 1);
  Eigen::MatrixXd M(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) M(i, j) = z(rng);
  M = M.rowwise() - M.colwise().mean();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
  Eigen::MatrixXd X = Q * std::sqrt(static_cast<double>(n));  // X'X = n I, centered columns
  std::vector<double> x(static_cast<std::size_t>(n * p)), y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) x[static_cast<std::size_t>(i * p + j)] = X(i, j);
    y[static_cast<std::size_t>(i)] = 2.0 * X(i, 0) - 0.3 * X(i, 1) + 0.05 * X(i, 2) + z(rng);
  }
  for (double lambda : {0.01, 0.1, 0.5, 2.0}) {
    auto fit = fit_elastic_net_gaussian(x, n, p, y, lambda, 1.0);
    for (int j = 0; j < p; ++j) {
      double c = 0;
      for (int i = 0; i < n; ++i) c += X(i, j) * y[static_cast<std::size_t>(i)];
      c /= n;
      const double expected = c > lambda ? c - lambda : (c < -lambda ? c + lambda : 0.0);
      CHECK(std::abs(fit.theta[static_cast<std::size_t>(j)] - expected) < 1e-6);
    }
  }
}

TEST_CASE("huge regularization zeroes every slope") {
  auto d = gaussian_design(30, 3, 3, {1, 2, 3});
  std::vector<double> y(d.target().begin(), d.target().end());
  for (double alpha : {0.0, 0.5, 1.0}) {
    auto fit = fit_elastic_net_gaussian(d.numeric_matrix(), 30, 3, y, 1e12, alpha);
    for (double t : fit.theta) CHECK(std::abs(t) < 1e-8);
  }
}

TEST_CASE("zero-variance design and logistic fits") {
  std::vector<double> x(20, 3.0), y(20);
  for (int i = 0; i < 20; ++i) y[static_cast<std::size_t>(i)] = i;
  auto fit = fit_elastic_net_gaussian(x, 20, 1, y, 0.1, 0.5);
  CHECK(fit.theta[0] == 0.0);
  CHECK(fit.intercept == doctest::Approx(9.5));

  auto sep = separable_classification();
  ElasticNetLearner en;
  auto model = en.train(sep, Config({{"s", -6.0}, {"alpha", 0.5}}), 0);
  CHECK(*score_model(*model, sep, find_metric("ce")) < 0.05);
  auto f = model->predict(sep);
  CHECK_NOTHROW(f.check());

  // ridge-logistic stationarity: grad of the mean NLL + lambda * theta vanishes
  const auto xs = sep.numeric_matrix();
  std::vector<double> ys(sep.target().begin(), sep.target().end());
  const double lambda = 0.1;
  auto lf = fit_elastic_net_logistic(xs, 150, 2, ys, lambda, 0.0);
  std::vector<double> g(3, 0.0);
  for (std::size_t i = 0; i < 150; ++i) {
    const double eta = lf.intercept + lf.theta[0] * xs[i * 2] + lf.theta[1] * xs[i * 2 + 1];
    const double r = 1.0 / (1.0 + std::exp(-eta)) - ys[i];
    g[0] += r * xs[i * 2] / 150;
    g[1] += r * xs[i * 2 + 1] / 150;
    g[2] += r / 150;
  }
  CHECK(std::abs(g[0] + lambda * lf.theta[0]) < 1e-5);
  CHECK(std::abs(g[1] + lambda * lf.theta[1]) < 1e-5);
  CHECK(std::abs(g[2]) < 1e-5);

  Dataset three({Column::numeric("x", {1, 2, 3})}, {0, 1, 2}, TaskType::classification, {"a", "b", "c"});
  CHECK_THROWS_AS(en.train(three, Config{}, 0), CapabilityError);
}

TEST_CASE("CART splits respect cp and minbucket") {
  Rng rng = make_rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const bool cls = trial % 2 == 0;
    Dataset d = cls ? smooth_classification(120, static_cast<std::uint64_t>(trial)) : noisy_linear_regression(static_cast<std::uint64_t>(trial));
    CartParams p;
    p.minsplit = 2 + rng() % 20;
    p.minbucket = 1 + rng() % 8;
    p.cp = std::pow(10.0, -4.0 + 3.0 * uniform01(rng));
    CartModel m(d, p);
    const auto& nodes = m.nodes();
    for (const auto& nd : nodes) {
      if (nd.feature < 0) {
        CHECK(nd.n >= p.minbucket);
        continue;
      }
      const auto& l = nodes[static_cast<std::size_t>(nd.left)];
      const auto& r = nodes[static_cast<std::size_t>(nd.right)];
      CHECK(l.n + r.n == nd.n);
      CHECK(nd.n >= p.minsplit);
      CHECK(nd.impurity - l.impurity - r.impurity >= p.cp * m.root_impurity() - 1e-9);
    }
  }
}

TEST_CASE("CART fits separable data and a step function") {
  auto sep = separable_classification();
  CartLearner cart;
  auto m = cart.train(sep, Config({{"minsplit", 1.0}, {"minbucket", 0.0}, {"cp", -4.0}}), 0);
  CHECK(*score_model(*m, sep, find_metric("ce")) == 0.0);

  std::vector<double> x, y;
  for (int i = 0; i < 40; ++i) {
    x.push_back(i);
    y.push_back(i < 25 ? 1.0 : 4.0);
  }
  Dataset step({Column::numeric("x", x)}, y, TaskType::regression);
  CartModel tree(step, CartParams{2, 1, 0.01});
  REQUIRE(tree.nodes().size() == 3);
  CHECK(tree.nodes()[0].threshold == 24.0);
  auto f = tree.predict(step);
  for (std::size_t i = 0; i < 40; ++i) CHECK(f(i, 0) == y[i]);
}

TEST_CASE("featureless learners") {
  auto d = random_binary(100, 2, 1);
  RandomLabelLearner rl;
  auto m = rl.train(d, Config({{"dummy", 0.3}}), 42);
  auto big = random_binary(10000, 1, 2);
  auto labels = m->predict(big).labels();
  const double ones = std::accumulate(labels.begin(), labels.end(), 0.0);
  CHECK(std::abs(ones / 10000.0 - 0.5) < 0.05);
  CHECK(m->predict(big) == rl.train(d, Config({{"dummy", 0.9}}), 42)->predict(big));

  FeaturelessLearner fl;
  auto reg = noisy_linear_regression();
  auto fm = fl.train(reg, Config{}, 0)->predict(reg);
  const double mean = std::accumulate(reg.target().begin(), reg.target().end(), 0.0) / 150.0;
  CHECK(fm(0, 0) == doctest::Approx(mean));
}

TEST_CASE("impute adds indicator columns and reuses training fill values") {
  const double na = std::nan("");
  Dataset train({Column::numeric("a", {1, na, 3, 5}), Column::numeric("b", {1, 2, 3, 4}),
                 Column::categorical("c", {"u", "v"}, {0, na, 1, 1})},
                {0, 1, 0, 1}, TaskType::classification, {"n", "p"});
  ImputeOp imp;
  Rng rng = make_rng(0);
  auto res = imp.fit_transform(train, Config({{"method", std::string("mean")}, {"indicator", std::string("yes")}}), rng);
  CHECK(res.data.n_features() == 4);  // one indicator for the one numeric column with missing cells
  CHECK(res.data.column(3).name == "a.missing");
  CHECK(res.data.column(0).values[1] == 3.0);
  CHECK(res.data.column(2).levels.back() == ".MISSING");
  CHECK_FALSE(res.data.has_missing());

  Dataset shifted({Column::numeric("a", {na, 100}), Column::numeric("b", {na, 1}),
                   Column::categorical("c", {"u", "v"}, {na, 0})},
                  {}, TaskType::classification, {"n", "p"});
  auto t = res.fitted->transform(shifted);
  CHECK(t.column(0).values[0] == 3.0);
  CHECK(t.column(1).values[0] == 2.5);  // b had no missing training cells: filled, no indicator
  CHECK(t.n_features() == 4);

  auto med = imp.fit_transform(train, Config({{"method", std::string("median")}, {"indicator", std::string("no")}}), rng);
  CHECK(med.data.n_features() == 3);
  CHECK(med.data.column(0).values[1] == 3.0);
}

TEST_CASE("encode, standardize, filter, subsample") {
  Dataset d({Column::categorical("c", {"u", "v", "w"}, {0, 1, 2, 1}), Column::numeric("x", {1, 2, 3, 4})},
            {1, 2, 3, 4}, TaskType::regression);
  Rng rng = make_rng(0);
  EncodeOp enc;
  CHECK(enc.fit_transform(d, Config{}, rng).data.n_features() == 4);
  auto dummy = enc.fit_transform(d, Config({{"mode", std::string("dummy")}}), rng).data;
  CHECK(dummy.n_features() == 3);
  CHECK(dummy.column(0).name == "c.v");
  CHECK(dummy.column(0).values == std::vector<double>{0, 1, 0, 1});

  StandardizeOp st;
  auto s = st.fit_transform(d, Config{}, rng);
  const double sd = std::sqrt((2.25 + 0.25 + 0.25 + 2.25) / 3.0);
  CHECK(s.data.column(1).values[0] == doctest::Approx(-1.5 / sd));
  Dataset later({Column::categorical("c", {"u", "v", "w"}, {0}), Column::numeric("x", {12.5})}, {},
                TaskType::regression);
  CHECK(s.fitted->transform(later).column(1).values[0] == doctest::Approx(10.0 / sd));

  auto reg = noisy_linear_regression();
  FilterOp filt;
  auto kept = filt.fit_transform(reg, Config({{"frac", 0.34}}), rng).data;
  REQUIRE(kept.n_features() == 2);
  CHECK(kept.column(0).name == "x1");  // strongest coefficient
  CHECK(kept.column(1).name == "x2");

  SubsampleOp sub;
  auto sres = sub.fit_transform(reg, Config({{"frac", 0.5}}), rng);
  CHECK(sres.data.n_rows() == 75);
  CHECK(sres.fitted->transform(reg).n_rows() == 150);
}

TEST_CASE("pipeline is leak-free: equals the manual two-phase computation") {
  auto data = smooth_classification(120, 8);
  std::vector<std::size_t> tr(80), te(40);
  std::iota(tr.begin(), tr.end(), std::size_t{0});
  std::iota(te.begin(), te.end(), std::size_t{80});
  auto train = data.subset(tr), test = data.subset(te);
  // shift the held-out rows so that stats fitted on them would differ visibly
  std::vector<Column> cols = test.columns();
  for (auto& c : cols)
    for (auto& v : c.values) v = 3 * v + 5;
  test = test.with_columns(cols);

  auto pipe = make_learner("pipe:impute+standardize+knn");
  Config cfg({{"k", std::log(5.0)}, {"kernel", std::string("optimal")}, {"distance", 2.0}});
  auto model = train_model(*pipe, train, cfg, 1);
  auto got = model->predict(test);

  std::vector<Column> tc = train.columns(), sc = test.columns();
  for (std::size_t j = 0; j < tc.size(); ++j) {
    const auto& v = tc[j].values;
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    for (auto& x : tc[j].values) x = (x - m) / sd;
    for (auto& x : sc[j].values) x = (x - m) / sd;
  }
  KnnLearner knn;
  auto ref = knn.train(train.with_columns(tc), cfg, 0)->predict(test.with_columns(sc));
  REQUIRE(ref.rows() == got.rows());
  for (std::size_t i = 0; i < ref.rows(); ++i) CHECK(got(i, 1) == doctest::Approx(ref(i, 1)).epsilon(1e-12));
}

TEST_CASE("pipeline space and ids") {
  auto pipe = make_learner("pipe:impute+standardize+knn");
  CHECK(pipe->id() == "pipe:impute+standardize+knn");
  CHECK(pipe->space().find("impute.method") != nullptr);
  CHECK(pipe->space().find("k") != nullptr);
  CHECK(pipe->capabilities().missing);
  CHECK_THROWS_AS(make_learner("pipe:knn"), InvalidArgument);
  CHECK_THROWS_AS(make_learner("svm"), InvalidArgument);
}

TEST_CASE("branch routing activates only the chosen alternative") {
  auto br = make_learner("branch:elastic_net|knn");
  const auto& space = br->space();
  Config b({{"branch", std::string("knn")}, {"knn.k", std::log(3.0)}, {"knn.distance", 2.0},
            {"knn.kernel", std::string("rank")}});
  CHECK(is_valid(space, b));
  Config leak = b;
  leak.set("elastic_net.alpha", 0.5);
  auto v = validate(space, leak);
  REQUIRE(v.size() == 1);
  CHECK(v[0].message == "elastic_net.alpha inactive");

  Rng rng = make_rng(1);
  for (int i = 0; i < 200; ++i) {
    auto c = sample_uniform(space, rng);
    const std::string choice = c.level("branch");
    for (const auto& [name, _] : c.values())
      CHECK((name == "branch" || name.rfind(choice + ".", 0) == 0));
  }
  auto sep = separable_classification();
  auto m = train_model(*br, sep, b, 0);
  CHECK(*score_model(*m, sep, find_metric("ce")) < 0.05);

  Config bad({{"branch", std::string("cart")}});
  CHECK_THROWS_AS(br->train(sep, bad, 0), InvalidArgument);
}

TEST_CASE("every builtin learner trains and predicts on its own data") {
  Rng rng = make_rng(3);
  for (const auto& id : builtin_learner_ids()) {
    auto learner = make_learner(id);
    for (const auto& d : {separable_classification(), noisy_linear_regression()}) {
      const auto caps = learner->capabilities();
      if (d.task() == TaskType::regression && !caps.regression) continue;
      for (int i = 0; i < 10; ++i) {
        auto cfg = sample_uniform(learner->space(), rng);
        auto m = train_model(*learner, d, cfg, 1);
        auto f = m->predict(d);
        CHECK(f.rows() == d.n_rows());
        INFO(id, " ", cfg.str());
        CHECK_NOTHROW(f.check());
      }
    }
  }
}

TEST_CASE("threshold tuning") {
  std::vector<double> y{0, 0, 1, 1};
  auto s = PredictionMatrix::column({0.1, 0.4, 0.6, 0.9});
  auto r = tune_threshold(y, s, find_metric("acc"));
  CHECK(r.rule.threshold == doctest::Approx(0.5));
  CHECK(r.achieved == 1.0);

  auto flat = PredictionMatrix::column({0.3, 0.3, 0.3, 0.3});
  auto rf = tune_threshold(y, flat, find_metric("acc"));
  CHECK(rf.rule.threshold == 0.0);  // raw scores: default threshold 0
  CHECK(rf.achieved == rf.baseline);

  std::vector<double> one{1, 1};
  CHECK_THROWS_AS(tune_threshold(one, PredictionMatrix::column({0.1, 0.2}), find_metric("acc")), InvalidArgument);
  CHECK_THROWS_AS(tune_threshold(y, s, find_metric("brier")), InvalidArgument);

  // separated scores reach the optimum of monotone label metrics
  for (const char* m : {"acc", "ba", "f1", "ce"}) {
    auto res = tune_threshold(y, PredictionMatrix::binary_probabilities(std::vector<double>{0.01, 0.02, 0.03, 0.04}),
                              find_metric(m));
    CHECK(res.achieved == (std::string(m) == "ce" ? 0.0 : 1.0));
  }
}

TEST_CASE("threshold tuning never degrades the default") {
  Rng rng = make_rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + rng() % 40;
    std::vector<double> y(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<double>(i % 2);
      p[i] = std::clamp(0.3 * y[i] + 0.7 * uniform01(rng), 0.0, 1.0);
    }
    const auto f = PredictionMatrix::binary_probabilities(p);
    for (const char* m : {"acc", "ba", "ce", "f1"}) {
      const auto& metric = find_metric(m);
      auto r = tune_threshold(y, f, metric);
      const auto defaulted = score(metric, y, f);
      if (defaulted) CHECK(metric.to_loss(r.achieved) <= metric.to_loss(*defaulted) + 1e-12);
    }
  }
  // multiclass
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 60;
    PredictionMatrix f(n, 3, true);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<double>(i % 3);
      double a = uniform01(rng), b = uniform01(rng), c = uniform01(rng) + (y[i] == 2 ? 0.3 : 0.0);
      const double s = a + b + c;
      f(i, 0) = a / s;
      f(i, 1) = b / s;
      f(i, 2) = c / s;
    }
    auto r = tune_threshold(y, f, find_metric("acc"), {100, 2, 20, static_cast<std::uint64_t>(trial)});
    CHECK(r.achieved >= r.baseline);
    CHECK(r.rule.kind == ThresholdRule::Kind::weights);
    double sum = 0;
    for (double w : r.rule.weights) {
      CHECK(w > 0);
      sum += w;
    }
    CHECK(sum == doctest::Approx(1.0));
  }
}

TEST_CASE("estimate_ge") {
  auto d = random_binary(100, 2, 5);
  Rng rng = make_rng(6);
  auto plan = make_kfold(100, 10, 1, {}, rng);
  RandomLabelLearner rl;
  auto est = estimate_ge(rl, Config({{"dummy", 0.5}}), d, plan, find_metric("ce"), 77);
  REQUIRE(est.aggregate);
  CHECK(std::abs(*est.aggregate - 0.5) < 0.15);
  CHECK(est.per_split.size() == 10);

  // constant-mean regressor: MSE on the holdout equals the mean squared deviation from the train mean
  auto reg = noisy_linear_regression();
  auto hold = make_holdout(150, 2.0 / 3.0, {}, rng);
  FeaturelessLearner fl;
  auto e2 = estimate_ge(fl, Config{}, reg, hold, find_metric("mse"), 1);
  double mtrain = 0;
  for (auto i : hold.splits[0].train) mtrain += reg.target()[i];
  mtrain /= static_cast<double>(hold.splits[0].train.size());
  double mse = 0;
  for (auto i : hold.splits[0].test) mse += std::pow(reg.target()[i] - mtrain, 2);
  mse /= static_cast<double>(hold.splits[0].test.size());
  CHECK(*e2.aggregate == doctest::Approx(mse));

  // deliberate leak: test rows are part of the training rows
  auto sep = smooth_classification(60, 2);
  ResamplingPlan leak;
  leak.n = 60;
  Split s;
  for (std::size_t i = 0; i < 60; ++i) s.train.push_back(i);
  for (std::size_t i = 0; i < 20; ++i) s.test.push_back(i);
  leak.splits.push_back(s);
  KnnLearner knn;
  auto e3 = estimate_ge(knn, knn_cfg(1, "optimal"), sep, leak, find_metric("ce"), 1);
  CHECK(*e3.aggregate == 0.0);

  // failures carry the split index
  auto tiny = make_kfold(6, 3, 1, {}, rng);
  try {
    estimate_ge(knn, knn_cfg(7), sep.subset(std::vector<std::size_t>{0, 1, 2, 3, 4, 5}), tiny, find_metric("ce"), 1);
    FAIL("expected SplitError");
  } catch (const SplitError& e) {
    CHECK(e.split() == 0);
  }
}

TEST_CASE("estimate_ge is identical in parallel") {
  auto d = smooth_classification(120, 3);
  Rng rng = make_rng(1);
  auto plan = make_kfold(120, 5, 2, {}, rng);
  KnnLearner knn;
  ExecPolicy par{4, ParallelLevel::fold, nullptr};
  auto a = estimate_ge(knn, knn_cfg(5, "optimal"), d, plan, find_metric("ce"), 9);
  auto b = estimate_ge(knn, knn_cfg(5, "optimal"), d, plan, find_metric("ce"), 9, par);
  CHECK(a.per_split == b.per_split);
}

TEST_CASE("fidelity subsampling trains on floor(fraction * n_train) rows") {
  auto d = smooth_classification(100, 3);
  Split s;
  for (std::size_t i = 0; i < 80; ++i) s.train.push_back(i);
  for (std::size_t i = 80; i < 100; ++i) s.test.push_back(i);
  struct Probe : Learner {
    mutable std::size_t seen = 0;
    SearchSpace sp;
    std::string id() const override { return "probe"; }
    const SearchSpace& space() const override { return sp; }
    Capabilities capabilities() const override { return {}; }
    ModelPtr train(const Dataset& data, const Config& c, std::uint64_t seed) const override {
      seen = data.n_rows();
      return FeaturelessLearner().train(data, c, seed);
    }
  } probe;
  evaluate_split(probe, Config{}, d, s, find_metric("ce"), 1, 0.5);
  CHECK(probe.seen == 40);
  evaluate_split(probe, Config{}, d, s, find_metric("ce"), 1, 0.001);
  CHECK(probe.seen == 2);
}
