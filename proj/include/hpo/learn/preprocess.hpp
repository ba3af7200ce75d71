#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hpo/core/rng.hpp"
#include "hpo/data/dataset.hpp"
#include "hpo/space/search_space.hpp"

namespace hpo {

/// State learned from training data, applied unchanged to new data.
class FittedOp {
 public:
  virtual ~FittedOp() = default;
  virtual Dataset transform(const Dataset& data) const = 0;
};

using FittedOpPtr = std::shared_ptr<const FittedOp>;

struct OpResult {
  FittedOpPtr fitted;
  Dataset data;  // the transformed training data
};

class PreprocOp {
 public:
  virtual ~PreprocOp() = default;
  virtual std::string id() const = 0;
  virtual const SearchSpace& space() const = 0;
  /// `cfg` holds this op's parameters without the pipeline prefix.
  virtual OpResult fit_transform(const Dataset& train, const Config& cfg, Rng& rng) const = 0;
  virtual bool removes_missing() const { return false; }
  virtual bool removes_categorical() const { return false; }
};

using PreprocOpPtr = std::shared_ptr<const PreprocOp>;

/// Numeric: mean / median / constant 0 fill, plus an optional "<name>.missing"
/// 0/1 column for each numeric column that had missing training cells.
/// Categorical: missing cells become the level ".MISSING" (mode if unseen in training).
/// Space: method {mean, median, constant} (default mean), indicator {no, yes} (default yes).
class ImputeOp : public PreprocOp {
 public:
  ImputeOp();
  std::string id() const override { return "impute"; }
  const SearchSpace& space() const override { return space_; }
  OpResult fit_transform(const Dataset& train, const Config& cfg, Rng& rng) const override;
  bool removes_missing() const override { return true; }

 private:
  SearchSpace space_;
};

/// One-hot encoding, "<name>.<level>" columns. Space: mode {one_hot, dummy}; dummy drops
/// the first level (k - 1 columns). Missing cells encode as all zeros.
class EncodeOp : public PreprocOp {
 public:
  EncodeOp();
  std::string id() const override { return "encode"; }
  const SearchSpace& space() const override { return space_; }
  OpResult fit_transform(const Dataset& train, const Config& cfg, Rng& rng) const override;
  bool removes_categorical() const override { return true; }

 private:
  SearchSpace space_;
};

/// Centers and scales numeric columns with training mean and sd (sd 0 leaves scale 1).
class StandardizeOp : public PreprocOp {
 public:
  std::string id() const override { return "standardize"; }
  const SearchSpace& space() const override { return space_; }
  OpResult fit_transform(const Dataset& train, const Config& cfg, Rng& rng) const override;

 private:
  SearchSpace space_;
};

/// Keeps the ceil(frac * p) numeric columns with the largest absolute Pearson
/// correlation to the target (ties to the earlier column); categoricals always kept.
/// Space: frac real [0.1, 1] (default 0.5).
class FilterOp : public PreprocOp {
 public:
  FilterOp();
  std::string id() const override { return "filter"; }
  const SearchSpace& space() const override { return space_; }
  OpResult fit_transform(const Dataset& train, const Config& cfg, Rng& rng) const override;

 private:
  SearchSpace space_;
};

/// Trains on floor(frac * n) rows (at least 2) drawn without replacement,
/// stratified for classification. Prediction data passes through untouched.
/// Space: frac real [0.1, 1] (default 1).
class SubsampleOp : public PreprocOp {
 public:
  SubsampleOp();
  std::string id() const override { return "subsample"; }
  const SearchSpace& space() const override { return space_; }
  OpResult fit_transform(const Dataset& train, const Config& cfg, Rng& rng) const override;

 private:
  SearchSpace space_;
};

/// Pearson correlation over rows where both values are present; 0 if undefined.
double pearson(const std::vector<double>& a, std::span<const double> b);

PreprocOpPtr make_op(const std::string& id);

}  // namespace hpo
