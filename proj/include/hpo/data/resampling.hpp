#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hpo/core/rng.hpp"

namespace hpo {

class Dataset;

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Ordered train/test splits over rows 0..n-1.
struct ResamplingPlan {
  std::vector<Split> splits;
  std::size_t n = 0;
  std::size_t folds = 1;    // splits per repetition
  std::size_t repeats = 1;

  std::size_t size() const { return splits.size(); }
  /// Mean training-set size; reported as metadata only.
  double reference_train_size() const;
  /// Throws InvalidArgument if a split overlaps or indexes past n.
  void check() const;
};

/// `strata` is empty (no stratification) or one class code per row.
/// Stratified holdout errors on classes with fewer than 2 members.
ResamplingPlan make_holdout(std::size_t n, double train_fraction, std::span<const std::size_t> strata, Rng& rng);
ResamplingPlan make_kfold(std::size_t n, std::size_t k, std::size_t repeats, std::span<const std::size_t> strata,
                          Rng& rng);

/// Allocates `total` items across groups of the given sizes proportionally using
/// largest remainders (ties to the lower group index); every share is within 1 of exact.
std::vector<std::size_t> proportional_allocation(std::span<const std::size_t> group_sizes, std::size_t total);

/// Draws `m` of `rows` without replacement, stratified by `strata` (indexed by row id) if given.
std::vector<std::size_t> subsample_rows(std::span<const std::size_t> rows, std::size_t m,
                                        std::span<const std::size_t> strata, Rng& rng);

/// Declarative resampling description, instantiated against a concrete dataset.
struct ResamplingSpec {
  enum class Kind { holdout, cv };
  Kind kind = Kind::cv;
  std::size_t folds = 3;
  std::size_t repeats = 1;
  double train_fraction = 2.0 / 3.0;
  bool stratify = false;

  static ResamplingSpec holdout(double fraction = 2.0 / 3.0, bool stratify = false);
  static ResamplingSpec cv(std::size_t folds, std::size_t repeats = 1, bool stratify = false);

  std::size_t split_count() const { return kind == Kind::holdout ? 1 : folds * repeats; }
  ResamplingPlan instantiate(const Dataset& data, Rng& rng) const;
  std::string str() const;
};

}  // namespace hpo
