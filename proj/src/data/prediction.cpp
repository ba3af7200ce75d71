#include "hpo/data/prediction.hpp"

#include <cmath>

#include "hpo/core/errors.hpp"

namespace hpo {

PredictionMatrix::PredictionMatrix(std::size_t rows, std::size_t cols, std::vector<double> data, bool probabilities)
    : rows_(rows), cols_(cols), probabilities_(probabilities), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) throw InvalidArgument("prediction data size differs from rows x cols");
}

PredictionMatrix PredictionMatrix::column(std::vector<double> values) {
  const std::size_t n = values.size();
  return PredictionMatrix(n, 1, std::move(values), false);
}

PredictionMatrix PredictionMatrix::binary_probabilities(std::span<const double> positive) {
  PredictionMatrix f(positive.size(), 2, true);
  for (std::size_t i = 0; i < positive.size(); ++i) {
    f(i, 0) = 1.0 - positive[i];
    f(i, 1) = positive[i];
  }
  return f;
}

PredictionMatrix PredictionMatrix::one_hot(std::span<const double> labels, std::size_t classes) {
  PredictionMatrix f(labels.size(), classes, true);
  for (std::size_t i = 0; i < labels.size(); ++i) f(i, static_cast<std::size_t>(labels[i])) = 1.0;
  return f;
}

std::vector<double> PredictionMatrix::positive_scores() const {
  const std::size_t k = cols_ == 1 ? 0 : 1;
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, k);
  return out;
}

std::vector<double> PredictionMatrix::labels() const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    if (cols_ == 1) {
      out[i] = (*this)(i, 0) >= 0.5 ? 1.0 : 0.0;
      continue;
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < cols_; ++k)
      if ((*this)(i, k) > (*this)(i, best)) best = k;
    out[i] = static_cast<double>(best);
  }
  return out;
}

PredictionMatrix PredictionMatrix::select_rows(std::span<const std::size_t> rows) const {
  PredictionMatrix out(rows.size(), cols_, probabilities_);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < cols_; ++k) out(i, k) = (*this)(rows[i], k);
  return out;
}

void PredictionMatrix::check() const {
  if (!probabilities_) return;
  for (std::size_t i = 0; i < rows_; ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < cols_; ++k) {
      const double p = (*this)(i, k);
      if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("probability outside [0, 1] in row " + std::to_string(i));
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("probability row " + std::to_string(i) + " does not sum to 1");
  }
}

ThresholdRule ThresholdRule::multiclass(std::vector<double> w) {
  for (double x : w)
    if (!(x > 0.0)) throw InvalidArgument("threshold weights must be strictly positive");
  return {Kind::weights, 0.5, std::move(w)};
}

std::vector<double> ThresholdRule::apply(const PredictionMatrix& f) const {
  std::vector<double> out(f.rows());
  if (kind == Kind::binary) {
    const auto s = f.positive_scores();
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] >= threshold ? 1.0 : 0.0;
    return out;
  }
  if (weights.size() != f.cols()) throw InvalidArgument("threshold weights do not match class count");
  for (std::size_t i = 0; i < f.rows(); ++i) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < f.cols(); ++k)
      if (f(i, k) / weights[k] > f(i, best) / weights[best]) best = k;
    out[i] = static_cast<double>(best);
  }
  return out;
}

}  // namespace hpo
