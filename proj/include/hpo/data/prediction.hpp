#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hpo {

/// m x g prediction scores, row-major. Regression and binary-score mode use g = 1
/// (for binary scores the column is the positive-class score). With `probabilities`
/// set, every row is a distribution over the g classes.
class PredictionMatrix {
 public:
  PredictionMatrix() = default;
  PredictionMatrix(std::size_t rows, std::size_t cols, bool probabilities = false)
      : rows_(rows), cols_(cols), probabilities_(probabilities), data_(rows * cols, 0.0) {}
  PredictionMatrix(std::size_t rows, std::size_t cols, std::vector<double> data, bool probabilities);

  static PredictionMatrix column(std::vector<double> values);
  /// Binary probabilities from positive-class probabilities: columns (1-p, p).
  static PredictionMatrix binary_probabilities(std::span<const double> positive);
  static PredictionMatrix one_hot(std::span<const double> labels, std::size_t classes);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool probabilities() const { return probabilities_; }

  double operator()(std::size_t i, std::size_t k) const { return data_[i * cols_ + k]; }
  double& operator()(std::size_t i, std::size_t k) { return data_[i * cols_ + k]; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  const std::vector<double>& data() const { return data_; }

  /// Column 0 for g = 1, else the class-1 column.
  std::vector<double> positive_scores() const;
  /// argmax per row, ties to the lowest class index; g = 1 thresholds at 0.5.
  std::vector<double> labels() const;

  PredictionMatrix select_rows(std::span<const std::size_t> rows) const;

  /// Throws InvalidArgument if the probability flag is set and a row is not a distribution.
  void check() const;

  bool operator==(const PredictionMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  bool probabilities_ = false;
  std::vector<double> data_;
};

/// Score-to-label rule. Binary: predict class 1 iff positive score >= t.
/// Multiclass: argmax_k p_k / w_k, ties to the lowest index.
struct ThresholdRule {
  enum class Kind { binary, weights };
  Kind kind = Kind::binary;
  double threshold = 0.5;
  std::vector<double> weights;

  static ThresholdRule binary(double t) { return {Kind::binary, t, {}}; }
  static ThresholdRule multiclass(std::vector<double> w);

  std::vector<double> apply(const PredictionMatrix& f) const;
};

}  // namespace hpo
