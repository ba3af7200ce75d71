#include "hpo/learn/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "hpo/core/errors.hpp"
#include "hpo/core/rng.hpp"

namespace hpo {

namespace {

bool is_binary(const PredictionMatrix& f) { return f.cols() <= 2; }

/// Larger is better on the internal scale; undefined ranks below everything.
double utility(const Metric& m, std::optional<double> v) {
  if (!v) return -std::numeric_limits<double>::infinity();
  return m.direction == Direction::maximize ? *v : -*v;
}

}  // namespace

ThresholdRule default_threshold_rule(const PredictionMatrix& f) {
  if (is_binary(f)) return ThresholdRule::binary(f.probabilities() ? 0.5 : 0.0);
  return ThresholdRule::multiclass(std::vector<double>(f.cols(), 1.0 / static_cast<double>(f.cols())));
}

ThresholdResult tune_threshold(std::span<const double> y, const PredictionMatrix& f, const Metric& metric,
                               const ThresholdOptions& opt, const ScoreContext& ctx) {
  if (metric.input != MetricInput::labels || metric.regression)
    throw InvalidArgument("threshold tuning needs a label-based classification metric");
  if (y.size() != f.rows()) throw InvalidArgument("threshold tuning: label and score lengths differ");
  if (std::set<double>(y.begin(), y.end()).size() < 2) throw InvalidArgument("threshold tuning needs two classes in y");

  auto eval = [&](const ThresholdRule& rule) {
    ScoreContext c = ctx;
    c.rule = &rule;
    return score(metric, y, f, c);
  };

  ThresholdResult res;
  res.rule = default_threshold_rule(f);
  const auto base = eval(res.rule);
  res.baseline = base.value_or(std::numeric_limits<double>::quiet_NaN());
  res.achieved = res.baseline;
  double best = utility(metric, base);

  if (is_binary(f)) {
    auto s = f.positive_scores();
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    if (s.size() < 2) return res;
    std::vector<double> cand{-std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i + 1 < s.size(); ++i) cand.push_back(0.5 * (s[i] + s[i + 1]));
    cand.push_back(std::numeric_limits<double>::infinity());
    double cbest = -std::numeric_limits<double>::infinity();
    for (double t : cand) {
      const auto rule = ThresholdRule::binary(t);
      const auto v = eval(rule);
      const double u = utility(metric, v);
      if (u > cbest) {
        cbest = u;
        res.rule = rule;
        res.achieved = *v;
      }
    }
    return res;
  }

  const std::size_t g = f.cols();
  Rng rng = make_rng(opt.seed);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  auto consider = [&](std::vector<double> w) {
    double sum = 0;
    for (auto& x : w) {
      x = std::max(x, 1e-12);
      sum += x;
    }
    for (auto& x : w) x /= sum;
    const auto rule = ThresholdRule::multiclass(w);
    const auto v = eval(rule);
    const double u = utility(metric, v);
    if (u > best) {
      best = u;
      res.rule = rule;
      res.achieved = *v;
      return true;
    }
    return false;
  };
  for (std::size_t d = 0; d < opt.draws; ++d) {
    std::vector<double> w(g);
    for (auto& x : w) x = gamma(rng);
    consider(std::move(w));
  }
  for (std::size_t pass = 0; pass < opt.refine_passes; ++pass)
    for (std::size_t k = 0; k < g; ++k)
      for (std::size_t i = 1; i < opt.line_points; ++i) {
        auto w = res.rule.weights;
        w[k] = static_cast<double>(i) / static_cast<double>(opt.line_points) * 2.0 * w[k] + 1e-12;
        consider(std::move(w));
      }
  return res;
}

}  // namespace hpo
