#include "hpo/learn/cart.hpp"

#include <algorithm>
#include <cmath>

#include "hpo/core/errors.hpp"

namespace hpo {

CartModel::CartModel(const Dataset& train, const CartParams& params)
    : params_(params), p_(train.n_features()) {
  if (train.n_rows() == 0) throw FitError("cart: empty training data");
  if (train.task() == TaskType::classification) classes_ = train.n_classes();
  const auto x = train.numeric_matrix();
  const std::vector<double> y(train.target().begin(), train.target().end());
  std::vector<std::size_t> rows(train.n_rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  min_gain_ = params_.cp * impurity(y, rows);
  grow(x, y, rows, 0);
}

double CartModel::impurity(const std::vector<double>& y, const std::vector<std::size_t>& rows) const {
  const double n = static_cast<double>(rows.size());
  if (rows.empty()) return 0.0;
  if (classes_ > 0) {
    std::vector<double> c(classes_, 0.0);
    for (auto r : rows) c[static_cast<std::size_t>(y[r])] += 1.0;
    double sq = 0.0;
    for (double v : c) sq += v * v;
    return n - sq / n;
  }
  double mean = 0.0;
  for (auto r : rows) mean += y[r];
  mean /= n;
  double sse = 0.0;
  for (auto r : rows) sse += (y[r] - mean) * (y[r] - mean);
  return sse;
}

CartModel::Node CartModel::make_leaf(const std::vector<double>& y, const std::vector<std::size_t>& rows) const {
  Node leaf;
  leaf.n = rows.size();
  leaf.impurity = impurity(y, rows);
  const double n = static_cast<double>(rows.size());
  if (classes_ > 0) {
    leaf.value.assign(classes_, 0.0);
    for (auto r : rows) leaf.value[static_cast<std::size_t>(y[r])] += 1.0;
    for (auto& v : leaf.value) v /= n;
  } else {
    double mean = 0.0;
    for (auto r : rows) mean += y[r];
    leaf.value = {mean / n};
  }
  return leaf;
}

int CartModel::grow(const std::vector<double>& x, const std::vector<double>& y, std::vector<std::size_t>& rows,
                    std::size_t depth) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(make_leaf(y, rows));
  const std::size_t n = rows.size();
  const std::size_t bucket = std::max<std::size_t>(params_.minbucket, 1);
  if (n < params_.minsplit || n < 2 * bucket || depth >= params_.max_depth || nodes_[id].impurity <= 0.0) return id;

  const double parent = nodes_[static_cast<std::size_t>(id)].impurity;
  double best_gain = 0.0;
  int best_feature = -1;
  double best_cut = 0.0;
  std::vector<std::size_t> order = rows;
  for (std::size_t j = 0; j < p_; ++j) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a * p_ + j] < x[b * p_ + j]; });
    // running sufficient statistics for the left child
    std::vector<double> lc(classes_, 0.0), rc(classes_, 0.0);
    double ls = 0, lss = 0, rs = 0, rss = 0;
    for (auto r : order) {
      if (classes_ > 0) rc[static_cast<std::size_t>(y[r])] += 1.0;
      rs += y[r];
      rss += y[r] * y[r];
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto r = order[i];
      if (classes_ > 0) {
        lc[static_cast<std::size_t>(y[r])] += 1.0;
        rc[static_cast<std::size_t>(y[r])] -= 1.0;
      }
      ls += y[r];
      lss += y[r] * y[r];
      rs -= y[r];
      rss -= y[r] * y[r];
      const double v = x[r * p_ + j], next = x[order[i + 1] * p_ + j];
      if (v == next) continue;
      const std::size_t nl = i + 1, nr = n - nl;
      if (nl < bucket || nr < bucket) continue;
      const double dl = static_cast<double>(nl), dr = static_cast<double>(nr);
      double child;
      if (classes_ > 0) {
        double sl = 0, sr = 0;
        for (std::size_t c = 0; c < classes_; ++c) {
          sl += lc[c] * lc[c];
          sr += rc[c] * rc[c];
        }
        child = (dl - sl / dl) + (dr - sr / dr);
      } else {
        child = std::max(0.0, lss - ls * ls / dl) + std::max(0.0, rss - rs * rs / dr);
      }
      const double gain = parent - child;
      if (gain > best_gain + 1e-12 * std::max(1.0, parent)) {
        best_gain = gain;
        best_feature = static_cast<int>(j);
        best_cut = v;
      }
    }
  }
  if (best_feature < 0 || best_gain < min_gain_ || best_gain <= 0.0) return id;

  std::vector<std::size_t> left, right;
  for (auto r : rows) (x[r * p_ + static_cast<std::size_t>(best_feature)] <= best_cut ? left : right).push_back(r);
  nodes_[static_cast<std::size_t>(id)].feature = best_feature;
  nodes_[static_cast<std::size_t>(id)].threshold = best_cut;
  const int l = grow(x, y, left, depth + 1);
  const int r = grow(x, y, right, depth + 1);
  nodes_[static_cast<std::size_t>(id)].left = l;
  nodes_[static_cast<std::size_t>(id)].right = r;
  return id;
}

std::size_t CartModel::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.feature < 0; }));
}

PredictionMatrix CartModel::predict(const Dataset& features) const {
  if (features.n_features() != p_) throw InvalidArgument("cart: feature count differs from training data");
  const auto x = features.numeric_matrix();
  const std::size_t m = features.n_rows();
  PredictionMatrix out(m, classes_ > 0 ? classes_ : 1, classes_ > 0);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t at = 0;
    while (nodes_[at].feature >= 0) {
      const auto& nd = nodes_[at];
      at = static_cast<std::size_t>(x[i * p_ + static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right);
    }
    for (std::size_t k = 0; k < out.cols(); ++k) out(i, k) = nodes_[at].value[k];
  }
  return out;
}

CartLearner::CartLearner()
    : space_({ParamSpec::integer("minsplit", 1, 7, Trafo::pow2), ParamSpec::integer("minbucket", 0, 6, Trafo::pow2),
              ParamSpec::real("cp", -4, -1, Trafo::pow10)}) {}

ModelPtr CartLearner::train(const Dataset& data, const Config& cfg, std::uint64_t) const {
  const auto t = space_.transform(cfg);
  CartParams p;
  p.minsplit = static_cast<std::size_t>(std::llround(t.number_or("minsplit", 20.0)));
  p.minbucket = static_cast<std::size_t>(std::llround(t.number_or("minbucket", std::round(static_cast<double>(p.minsplit) / 3.0))));
  p.cp = t.number_or("cp", 0.01);
  return std::make_shared<CartModel>(data, p);
}

}  // namespace hpo
