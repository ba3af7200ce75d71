#include "hpo/learn/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "hpo/core/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hpo {

std::string_view to_string(KnnKernel k) {
  switch (k) {
    case KnnKernel::rectangular: return "rectangular";
    case KnnKernel::optimal: return "optimal";
    case KnnKernel::epanechnikov: return "epanechnikov";
    case KnnKernel::gaussian: return "gaussian";
    case KnnKernel::inv: return "inv";
    case KnnKernel::rank: return "rank";
  }
  return "?";
}

KnnKernel parse_knn_kernel(std::string_view s) {
  for (auto k : {KnnKernel::rectangular, KnnKernel::optimal, KnnKernel::epanechnikov, KnnKernel::gaussian,
                 KnnKernel::inv, KnnKernel::rank})
    if (to_string(k) == s) return k;
  throw InvalidArgument("unknown knn kernel '" + std::string(s) + "'");
}

std::vector<double> knn_weights(KnnKernel kernel, const std::vector<double>& d, std::size_t features) {
  const std::size_t k = d.size();
  std::vector<double> w(k);
  const double kd = static_cast<double>(k);
  switch (kernel) {
    case KnnKernel::rectangular:
      std::fill(w.begin(), w.end(), 0.5);
      break;
    case KnnKernel::epanechnikov:
      for (std::size_t i = 0; i < k; ++i) w[i] = 0.75 * (1.0 - d[i] * d[i]);
      break;
    case KnnKernel::gaussian: {
      boost::math::normal_distribution<double> std_normal;
      const double q = std::abs(boost::math::quantile(std_normal, 1.0 / (2.0 * (kd + 1.0))));
      for (std::size_t i = 0; i < k; ++i) w[i] = boost::math::pdf(std_normal, d[i] * q);
      break;
    }
    case KnnKernel::inv:
      for (std::size_t i = 0; i < k; ++i) w[i] = 1.0 / d[i];
      break;
    case KnnKernel::rank: {
      // rank of each distance among the k, ties share the average rank
      std::vector<std::size_t> idx(k);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
      for (std::size_t i = 0; i < k;) {
        std::size_t j = i;
        while (j + 1 < k && d[idx[j + 1]] == d[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) w[idx[t]] = (kd + 1.0) - r;
        i = j + 1;
      }
      break;
    }
    case KnnKernel::optimal: {
      // Samworth's asymptotically optimal rank weights
      const double dim = static_cast<double>(std::max<std::size_t>(features, 1));
      const double e = 1.0 + 2.0 / dim;
      for (std::size_t i = 0; i < k; ++i) {
        const double r = static_cast<double>(i + 1);
        w[i] = (1.0 / kd) *
               (1.0 + dim / 2.0 - dim / (2.0 * std::pow(kd, 2.0 / dim)) * (std::pow(r, e) - std::pow(r - 1.0, e)));
      }
      break;
    }
  }
  return w;
}

KnnModel::KnnModel(const Dataset& train, KnnParams params)
    : params_(params), n_(train.n_rows()), p_(train.n_features()), x_(train.numeric_matrix()) {
  if (params_.k < 1) throw FitError("knn: k must be >= 1");
  if (params_.k > n_)
    throw FitError("knn: k = " + std::to_string(params_.k) + " exceeds " + std::to_string(n_) + " training rows");
  if (!(params_.p > 0)) throw FitError("knn: distance power must be positive");
  y_.assign(train.target().begin(), train.target().end());
  if (train.task() == TaskType::classification) classes_ = train.n_classes();
}

void KnnModel::predict_row(const double* q, PredictionMatrix& out, std::size_t row) const {
  const std::size_t k = params_.k;
  const std::size_t m = std::min(k + 1, n_);
  std::vector<std::pair<double, std::size_t>> dist(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const double* xi = x_.data() + i * p_;
    double s = 0.0;
    if (params_.p == 2.0) {
      for (std::size_t j = 0; j < p_; ++j) s += (xi[j] - q[j]) * (xi[j] - q[j]);
      s = std::sqrt(s);
    } else {
      for (std::size_t j = 0; j < p_; ++j) s += std::pow(std::abs(xi[j] - q[j]), params_.p);
      s = std::pow(s, 1.0 / params_.p);
    }
    dist[i] = {s, i};
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(m), dist.end());

  double scale = dist[m - 1].first;
  if (scale < 1e-6) scale = 1e-6;
  std::vector<double> d(k);
  for (std::size_t i = 0; i < k; ++i) d[i] = std::clamp(dist[i].first / scale, 1e-6, 1.0 - 1e-6);
  const auto w = knn_weights(params_.kernel, d, p_);

  if (classes_ == 0) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      num += w[i] * y_[dist[i].second];
      den += w[i];
    }
    out(row, 0) = num / den;
    return;
  }
  std::vector<double> mass(classes_, 0.0);
  for (std::size_t i = 0; i < k; ++i) mass[static_cast<std::size_t>(y_[dist[i].second])] += std::max(w[i], 0.0);
  double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  if (total <= 0.0) {
    // every weight vanished: fall back to an unweighted vote
    std::fill(mass.begin(), mass.end(), 0.0);
    for (std::size_t i = 0; i < k; ++i) mass[static_cast<std::size_t>(y_[dist[i].second])] += 1.0;
    total = static_cast<double>(k);
  }
  for (std::size_t c = 0; c < classes_; ++c) out(row, c) = mass[c] / total;
}

PredictionMatrix KnnModel::predict_serial(const Dataset& features) const {
  if (features.n_features() != p_) throw InvalidArgument("knn: feature count differs from training data");
  const auto q = features.numeric_matrix();
  const std::size_t m = features.n_rows();
  PredictionMatrix out(m, classes_ == 0 ? 1 : classes_, classes_ != 0);
  for (std::size_t r = 0; r < m; ++r) predict_row(q.data() + r * p_, out, r);
  return out;
}

PredictionMatrix KnnModel::predict(const Dataset& features) const {
  if (features.n_features() != p_) throw InvalidArgument("knn: feature count differs from training data");
  const auto q = features.numeric_matrix();
  const long m = static_cast<long>(features.n_rows());
  PredictionMatrix out(features.n_rows(), classes_ == 0 ? 1 : classes_, classes_ != 0);
  bool nested = false;
#ifdef _OPENMP
  nested = omp_in_parallel();
#endif
#pragma omp parallel for schedule(static) if (!nested && m >= 256)
  for (long r = 0; r < m; ++r)
    predict_row(q.data() + static_cast<std::size_t>(r) * p_, out, static_cast<std::size_t>(r));
  return out;
}

KnnLearner::KnnLearner()
    : space_({ParamSpec::real("k", std::log(1.0), std::log(50.0), Trafo::exp_floor),
              ParamSpec::real("distance", 1.0, 5.0),
              ParamSpec::categorical("kernel", {"rectangular", "optimal", "epanechnikov", "gaussian", "inv", "rank"})}) {}

KnnParams KnnLearner::params_from(const TransformedConfig& t) {
  KnnParams p;
  p.k = static_cast<std::size_t>(std::max(1.0, t.number_or("k", 7.0)));
  p.p = t.number_or("distance", 2.0);
  p.kernel = parse_knn_kernel(t.level_or("kernel", "optimal"));
  return p;
}

ModelPtr KnnLearner::train(const Dataset& data, const Config& cfg, std::uint64_t) const {
  return std::make_shared<KnnModel>(data, params_from(space_.transform(cfg)));
}

}  // namespace hpo
