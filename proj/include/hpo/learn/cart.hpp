#pragma once

#include <vector>

#include "hpo/learn/learner.hpp"

namespace hpo {

struct CartParams {
  std::size_t minsplit = 20;
  std::size_t minbucket = 7;
  double cp = 0.01;
  std::size_t max_depth = 30;
};

/// Greedy binary tree with axis-aligned cuts x <= v at observed values.
class CartModel : public Model {
 public:
  struct Node {
    int feature = -1;  // -1 for a leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    std::size_t n = 0;
    double impurity = 0.0;  // n * gini or SSE
    std::vector<double> value;  // class proportions or {mean}
  };

  CartModel(const Dataset& train, const CartParams& params);
  PredictionMatrix predict(const Dataset& features) const override;

  const std::vector<Node>& nodes() const { return nodes_; }
  double root_impurity() const { return nodes_.front().impurity; }
  std::size_t leaf_count() const;

 private:
  int grow(const std::vector<double>& x, const std::vector<double>& y, std::vector<std::size_t>& rows,
           std::size_t depth);
  Node make_leaf(const std::vector<double>& y, const std::vector<std::size_t>& rows) const;
  double impurity(const std::vector<double>& y, const std::vector<std::size_t>& rows) const;

  CartParams params_;
  std::size_t p_ = 0;
  std::size_t classes_ = 0;
  double min_gain_ = 0.0;
  std::vector<Node> nodes_;
};

/// Preset: minsplit integer [1, 7] with 2^x (default 20), minbucket integer [0, 6]
/// with 2^x (default round(minsplit / 3)), cp real [-4, -1] with 10^x (default 0.01).
class CartLearner : public Learner {
 public:
  CartLearner();
  std::string id() const override { return "cart"; }
  const SearchSpace& space() const override { return space_; }
  Capabilities capabilities() const override { return {true, true, false, false, true}; }
  ModelPtr train(const Dataset& data, const Config& cfg, std::uint64_t seed) const override;

 private:
  SearchSpace space_;
};

}  // namespace hpo
