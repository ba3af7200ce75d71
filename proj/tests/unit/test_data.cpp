#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "hpo/core/errors.hpp"
#include "hpo/data/bundled.hpp"
#include "hpo/data/dataset.hpp"
#include "hpo/data/metrics.hpp"
#include "hpo/data/resampling.hpp"

using namespace hpo;

namespace {

// Pairwise AUC: each (pos, neg) pair scores 1 if the positive ranks higher, 0.5 on ties.
std::optional<double> brute_force_auc(const std::vector<double>& y, const std::vector<double>& s) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j)
      if (y[i] == 1 && y[j] == 0) {
        pairs += 1;
        wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
  if (pairs == 0) return std::nullopt;
  return wins / pairs;
}

std::set<std::size_t> as_set(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("holdout sizes") {
  Rng rng = make_rng(1);
  auto plan = make_holdout(9, 2.0 / 3.0, {}, rng);
  REQUIRE(plan.size() == 1);
  CHECK(plan.splits[0].train.size() == 6);
  CHECK(plan.splits[0].test.size() == 3);
  CHECK_NOTHROW(plan.check());
  CHECK_THROWS_AS(make_holdout(1, 0.5, {}, rng), InvalidArgument);
  CHECK_THROWS_AS(make_holdout(10, 1.0, {}, rng), InvalidArgument);
}

TEST_CASE("stratified holdout balances classes") {
  Rng rng = make_rng(2);
  std::vector<std::size_t> strata{1, 1, 0, 0};
  for (int rep = 0; rep < 20; ++rep) {
    auto plan = make_holdout(4, 0.5, strata, rng);
    const auto& s = plan.splits[0];
    for (const auto* side : {&s.train, &s.test}) {
      REQUIRE(side->size() == 2);
      CHECK(strata[(*side)[0]] != strata[(*side)[1]]);
    }
  }
  std::vector<std::size_t> lonely{0, 0, 0, 1};
  CHECK_THROWS_AS(make_holdout(4, 0.5, lonely, rng), InvalidArgument);
}

TEST_CASE("k-fold partitions") {
  Rng rng = make_rng(3);
  auto plan = make_kfold(6, 3, 1, {}, rng);
  REQUIRE(plan.size() == 3);
  for (const auto& s : plan.splits) {
    CHECK(s.test.size() == 2);
    CHECK(s.train.size() == 4);
  }
  plan = make_kfold(6, 3, 2, {}, rng);
  REQUIRE(plan.size() == 6);
  for (int rep = 0; rep < 2; ++rep) {
    std::set<std::size_t> all;
    for (int f = 0; f < 3; ++f)
      for (auto r : plan.splits[static_cast<std::size_t>(rep * 3 + f)].test) all.insert(r);
    CHECK(all.size() == 6);
  }
  plan = make_kfold(5, 3, 1, {}, rng);
  std::vector<std::size_t> sizes;
  for (const auto& s : plan.splits) sizes.push_back(s.test.size());
  CHECK(sizes == std::vector<std::size_t>{2, 2, 1});
  CHECK_THROWS_AS(make_kfold(3, 4, 1, {}, rng), InvalidArgument);
  CHECK_THROWS_AS(make_kfold(3, 1, 1, {}, rng), InvalidArgument);
}

TEST_CASE("k-fold properties over random shapes") {
  Rng rng = make_rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 60;
    const std::size_t k = 2 + rng() % (n - 1);
    const std::size_t reps = 1 + rng() % 3;
    const bool strat = trial % 2 == 0;
    std::vector<std::size_t> strata;
    if (strat)
      for (std::size_t i = 0; i < n; ++i) strata.push_back(rng() % 3);
    auto plan = make_kfold(n, k, reps, strata, rng);
    REQUIRE(plan.size() == k * reps);
    CHECK_NOTHROW(plan.check());
    for (std::size_t rep = 0; rep < reps; ++rep) {
      std::vector<int> hits(n, 0);
      std::size_t lo = n, hi = 0;
      for (std::size_t f = 0; f < k; ++f) {
        const auto& s = plan.splits[rep * k + f];
        CHECK(s.train.size() + s.test.size() == n);
        for (auto r : s.test) ++hits[r];
        lo = std::min(lo, s.test.size());
        hi = std::max(hi, s.test.size());
        if (strat) {
          // per-class count within +-1 of the proportional share
          for (std::size_t c = 0; c < 3; ++c) {
            double total = 0, in_fold = 0;
            for (std::size_t i = 0; i < n; ++i) total += strata[i] == c;
            for (auto r : s.test) in_fold += strata[r] == c;
            CHECK(std::abs(in_fold - total / static_cast<double>(k)) <= 1.0);
          }
        }
      }
      CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
      CHECK(hi - lo <= 1);
    }
  }
}

TEST_CASE("proportional allocation") {
  std::vector<std::size_t> sizes{5, 3, 2};
  auto a = proportional_allocation(sizes, 6);
  CHECK(std::accumulate(a.begin(), a.end(), std::size_t{0}) == 6);
  CHECK(a == std::vector<std::size_t>{3, 2, 1});
}

TEST_CASE("metric examples") {
  std::vector<double> y{1, 0, 1};
  auto f = PredictionMatrix::column({1, 1, 1});
  CHECK(*score("acc", y, f) == doctest::Approx(2.0 / 3.0));

  std::vector<double> yc{0, 1, 2, 1};
  auto onehot = PredictionMatrix::one_hot(yc, 3);
  CHECK(*score("brier", yc, onehot) == 0.0);
  CHECK(*score("logloss", yc, onehot) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(*score("log-loss", yc, onehot) == doctest::Approx(0.0).epsilon(1e-12));

  std::vector<double> ya{1, 0, 1, 0};
  auto sa = PredictionMatrix::column({0.8, 0.8, 0.3, 0.1});
  CHECK(*score("auc", ya, sa) == doctest::Approx(*brute_force_auc(ya, {0.8, 0.8, 0.3, 0.1})));
  CHECK(*score("auc", ya, sa) == doctest::Approx(0.625));

  std::vector<double> yr{1, 2, 3, 6};
  auto mean = PredictionMatrix::column({3, 3, 3, 3});
  CHECK(*score("r2", yr, mean) == doctest::Approx(0.0));
  CHECK(*score("rsq", yr, mean) == doctest::Approx(0.0));
  CHECK(*score("mse", yr, mean) == doctest::Approx((4 + 1 + 0 + 9) / 4.0));
  CHECK(*score("mae", yr, mean) == doctest::Approx((2 + 1 + 0 + 3) / 4.0));
}

TEST_CASE("undefined metrics signal instead of returning zero") {
  std::vector<double> y{0, 0, 0};
  auto f = PredictionMatrix::column({0, 0, 0});
  CHECK_FALSE(score("tpr", y, f).has_value());
  CHECK_FALSE(score("fnr", y, f).has_value());
  CHECK_FALSE(score("ppv", y, f).has_value());
  CHECK_FALSE(score("auc", y, f).has_value());
  CHECK(*score("tnr", y, f) == 1.0);
  std::vector<double> flat{2, 2};
  CHECK_FALSE(score("r2", flat, PredictionMatrix::column({1, 2})).has_value());
}

TEST_CASE("confusion metrics match hand counts") {
  std::vector<double> y{1, 1, 1, 0, 0, 0, 0};
  auto f = PredictionMatrix::column({1, 1, 0, 1, 0, 0, 0});
  // TP=2 FN=1 FP=1 TN=3
  CHECK(*score("tpr", y, f) == doctest::Approx(2.0 / 3));
  CHECK(*score("fpr", y, f) == doctest::Approx(1.0 / 4));
  CHECK(*score("ppv", y, f) == doctest::Approx(2.0 / 3));
  CHECK(*score("npv", y, f) == doctest::Approx(3.0 / 4));
  CHECK(*score("f1", y, f) == doctest::Approx(2.0 * (2.0 / 3) * (2.0 / 3) / (4.0 / 3)));
  CHECK(*score("ba", y, f) == doctest::Approx(0.5 * (2.0 / 3 + 3.0 / 4)));
  std::vector<double> cost{0, 1, 5, 0};
  CHECK(*score("cost", y, f, {cost}) == doctest::Approx(1 * 1 + 5 * 1));
  CHECK_THROWS_AS(score("cost", y, f), InvalidArgument);
}

TEST_CASE("probability metrics follow the one-hot sum formula") {
  std::vector<double> y{0, 1};
  PredictionMatrix f(2, 2, {0.7, 0.3, 0.4, 0.6}, true);
  CHECK(*score("brier", y, f) == doctest::Approx((0.09 + 0.09 + 0.16 + 0.16) / 2));
  CHECK(*score("logloss", y, f) == doctest::Approx(-(std::log(0.7) + std::log(0.6)) / 2));
  PredictionMatrix zero(1, 2, {1.0, 0.0}, true);
  std::vector<double> one{1};
  CHECK(*score("logloss", one, zero) == doctest::Approx(-std::log(1e-15)));
  CHECK_THROWS_AS(score("brier", y, PredictionMatrix::column({0.1, 0.2})), InvalidArgument);
}

TEST_CASE("metric identities and oracle equivalence on fuzzed inputs") {
  Rng rng = make_rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 50;
    std::vector<double> y(n), s(n), lab(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = static_cast<double>(rng() % 2);
      s[i] = static_cast<double>(rng() % 7) / 6.0;  // coarse grid forces ties
      lab[i] = static_cast<double>(rng() % 2);
    }
    auto a = score("auc", y, PredictionMatrix::column(s));
    auto b = brute_force_auc(y, s);
    REQUIRE(a.has_value() == b.has_value());
    if (a) CHECK(*a == doctest::Approx(*b).epsilon(1e-12));

    auto f = PredictionMatrix::column(lab);
    CHECK(*score("ce", y, f) + *score("acc", y, f) == doctest::Approx(1.0));
    auto tpr = score("tpr", y, f), fnr = score("fnr", y, f);
    if (tpr) CHECK(*tpr + *fnr == doctest::Approx(1.0));
    auto fpr = score("fpr", y, f), tnr = score("tnr", y, f);
    if (fpr) CHECK(*fpr + *tnr == doctest::Approx(1.0));

    // simultaneous permutation leaves every metric unchanged
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> yp(n), sp(n);
    for (std::size_t i = 0; i < n; ++i) {
      yp[i] = y[perm[i]];
      sp[i] = s[perm[i]];
    }
    auto ap = score("auc", yp, PredictionMatrix::column(sp));
    CHECK(ap.has_value() == a.has_value());
    if (a) CHECK(*ap == doctest::Approx(*a).epsilon(1e-12));
    auto probs = PredictionMatrix::binary_probabilities(s);
    auto probs_p = PredictionMatrix::binary_probabilities(sp);
    CHECK(*score("brier", y, probs) == doctest::Approx(*score("brier", yp, probs_p)));
  }
}

TEST_CASE("metric catalogue") {
  std::set<std::string> ids;
  for (const auto& m : metric_catalogue()) ids.insert(m.id);
  CHECK(ids.size() == metric_catalogue().size());
  CHECK(find_metric("acc").direction == Direction::maximize);
  CHECK(find_metric("ce").to_loss(0.3) == 0.3);
  CHECK(find_metric("auc").to_loss(0.8) == -0.8);
  CHECK_THROWS_AS(find_metric("nope"), InvalidArgument);
}

TEST_CASE("threshold rules") {
  PredictionMatrix f(3, 3, {0.5, 0.3, 0.2, 0.1, 0.45, 0.45, 0.3, 0.3, 0.4}, true);
  CHECK(f.labels() == std::vector<double>{0, 1, 2});
  auto w = ThresholdRule::multiclass({1.0, 1.0, 0.5});
  CHECK(w.apply(f) == std::vector<double>{0, 2, 2});
  CHECK_THROWS_AS(ThresholdRule::multiclass({1.0, 0.0}), InvalidArgument);
  auto s = PredictionMatrix::column({0.2, 0.5, 0.7});
  CHECK(ThresholdRule::binary(0.5).apply(s) == std::vector<double>{0, 1, 1});
}

TEST_CASE("dataset invariants and CSV round-trip") {
  CHECK_THROWS_AS(Dataset({Column::numeric("a", {1, 2}), Column::numeric("a", {1, 2})}, {}, TaskType::regression),
                  InvalidArgument);
  CHECK_THROWS_AS(Dataset({Column::numeric("a", {1, 2})}, {1.0, NAN}, TaskType::regression), InvalidArgument);

  const double na = std::numeric_limits<double>::quiet_NaN();
  Dataset d({Column::numeric("x", {0.1, -2.5, na, 1e-300}),
             Column::categorical("color", {"red", "green, dark"}, {0, 1, na, 0})},
            {1, 0, 1, 1}, TaskType::classification, {"no", "yes"}, "label");
  std::stringstream ss;
  write_csv(ss, d);
  auto back = read_csv(ss, "label");
  CHECK(back == d);
  CHECK(back.task() == TaskType::classification);
  CHECK(back.column(0).has_missing());
  CHECK(back.column(1).type == ColumnType::categorical);

  Rng rng = make_rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    auto r = noisy_linear_regression(static_cast<std::uint64_t>(trial));
    std::stringstream s2;
    write_csv(s2, r);
    CHECK(read_csv(s2, "y") == r);
  }

  std::stringstream bad("a,b\n1,2\n3\n");
  CHECK_THROWS_AS(read_csv(bad, "b"), InvalidArgument);
}

TEST_CASE("bundled datasets") {
  auto sep = separable_classification();
  CHECK(sep.n_rows() == 150);
  CHECK(sep.n_features() == 2);
  CHECK(sep == separable_classification());
  auto reg = noisy_linear_regression();
  CHECK(reg.n_rows() == 150);
  CHECK(reg.n_features() == 3);
  auto rb = random_binary(100, 3, 4);
  auto counts = rb.class_counts();
  CHECK(counts[0] == 50);
  CHECK(counts[1] == 50);
  CHECK_THROWS_AS(bundled("nope"), InvalidArgument);
}

TEST_CASE("subset and numeric matrix") {
  auto reg = noisy_linear_regression();
  std::vector<std::size_t> rows{3, 1};
  auto s = reg.subset(rows);
  CHECK(s.n_rows() == 2);
  CHECK(s.target()[0] == reg.target()[3]);
  auto x = s.numeric_matrix();
  CHECK(x.size() == 6);
  CHECK(x[3] == reg.column(0).values[1]);
  Dataset cat({Column::categorical("c", {"a", "b"}, {0, 1})}, {1, 2}, TaskType::regression);
  CHECK_THROWS_AS(cat.numeric_matrix(), CapabilityError);
}
