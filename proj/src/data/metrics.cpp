#include "hpo/data/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hpo/core/errors.hpp"

namespace hpo {

std::string_view to_string(Direction d) { return d == Direction::minimize ? "min" : "max"; }

const std::vector<Metric>& metric_catalogue() {
  using D = Direction;
  using I = MetricInput;
  static const std::vector<Metric> catalogue = {
      {"mse", D::minimize, I::scores, true},         {"mae", D::minimize, I::scores, true},
      {"r2", D::maximize, I::scores, true},          {"acc", D::maximize, I::labels, false},
      {"ba", D::maximize, I::labels, false},         {"ce", D::minimize, I::labels, false},
      {"tpr", D::maximize, I::labels, false},        {"fpr", D::minimize, I::labels, false},
      {"tnr", D::maximize, I::labels, false},        {"fnr", D::minimize, I::labels, false},
      {"ppv", D::maximize, I::labels, false},        {"npv", D::maximize, I::labels, false},
      {"f1", D::maximize, I::labels, false},         {"cost", D::minimize, I::labels, false},
      {"brier", D::minimize, I::probabilities, false}, {"logloss", D::minimize, I::probabilities, false},
      {"auc", D::maximize, I::scores, false},
  };
  return catalogue;
}

const Metric& find_metric(std::string_view id) {
  if (id == "log-loss") id = "logloss";
  if (id == "rsq") id = "r2";
  for (const auto& m : metric_catalogue())
    if (m.id == id) return m;
  throw InvalidArgument("unknown metric '" + std::string(id) + "'");
}

Confusion confusion(std::span<const double> y, std::span<const double> yhat) {
  Confusion c;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const bool pos = y[i] == 1.0;
    const bool pred = yhat[i] == 1.0;
    if (pos && pred) c.tp += 1;
    else if (pos) c.fn += 1;
    else if (pred) c.fp += 1;
    else c.tn += 1;
  }
  return c;
}

std::optional<double> auc(std::span<const double> y, std::span<const double> scores) {
  const std::size_t n = y.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) rank[idx[t]] = mid;
    i = j + 1;
  }
  double n_pos = 0, rank_sum = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (y[i] == 1.0) {
      n_pos += 1;
      rank_sum += rank[i];
    }
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;
  return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg);
}

namespace {

std::optional<double> ratio(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den;
}

double class_probability(const PredictionMatrix& f, std::size_t i, std::size_t k) {
  if (f.cols() == 1) return k == 1 ? f(i, 0) : 1.0 - f(i, 0);
  return f(i, k);
}

}  // namespace

std::optional<double> score(const Metric& metric, std::span<const double> y, const PredictionMatrix& f,
                            const ScoreContext& ctx) {
  if (y.size() != f.rows()) throw InvalidArgument("metric '" + metric.id + "': label and prediction lengths differ");
  const std::size_t n = y.size();
  if (n == 0) return std::nullopt;
  const double dn = static_cast<double>(n);
  const std::string& id = metric.id;

  if (metric.regression) {
    double sse = 0, sae = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - f(i, 0);
      sse += r * r;
      sae += std::abs(r);
    }
    if (id == "mse") return sse / dn;
    if (id == "mae") return sae / dn;
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / dn;
    double sst = 0;
    for (double v : y) sst += (v - mean) * (v - mean);
    if (sst == 0.0) return std::nullopt;
    return 1.0 - sse / sst;
  }

  std::size_t g = ctx.n_classes;
  if (g == 0) {
    g = std::max<std::size_t>(f.cols(), 2);
    for (double v : y) g = std::max(g, static_cast<std::size_t>(v) + 1);
  }

  if (metric.input == MetricInput::probabilities) {
    if (!f.probabilities()) throw InvalidArgument("metric '" + id + "' needs probability predictions");
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto truth = static_cast<std::size_t>(y[i]);
      if (id == "brier") {
        for (std::size_t k = 0; k < g; ++k) {
          const double d = class_probability(f, i, k) - (k == truth ? 1.0 : 0.0);
          total += d * d;
        }
      } else {
        const double p = std::clamp(class_probability(f, i, truth), 1e-15, 1.0 - 1e-15);
        total -= std::log(p);
      }
    }
    return total / dn;
  }

  if (id == "auc") {
    if (g > 2) throw CapabilityError("auc is defined for binary tasks only");
    const auto s = f.positive_scores();
    return auc(y, s);
  }

  const std::vector<double> yhat = ctx.rule ? ctx.rule->apply(f) : f.labels();
  if (id == "acc" || id == "ce") {
    double hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += (y[i] == yhat[i]) ? 1.0 : 0.0;
    return id == "acc" ? hits / dn : (dn - hits) / dn;
  }
  if (id == "ba") {
    std::vector<double> count(g, 0), hit(g, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(y[i]);
      count[k] += 1;
      if (yhat[i] == y[i]) hit[k] += 1;
    }
    double sum = 0, present = 0;
    for (std::size_t k = 0; k < g; ++k)
      if (count[k] > 0) {
        sum += hit[k] / count[k];
        present += 1;
      }
    return sum / present;
  }
  if (id == "cost") {
    if (ctx.cost.size() != g * g) throw InvalidArgument("cost metric needs a " + std::to_string(g) + "x" +
                                                        std::to_string(g) + " cost matrix");
    double total = 0;
    for (std::size_t i = 0; i < n; ++i)
      total += ctx.cost[static_cast<std::size_t>(y[i]) * g + static_cast<std::size_t>(yhat[i])];
    return total;
  }

  if (g > 2) throw CapabilityError("metric '" + id + "' is defined for binary tasks only");
  const Confusion c = confusion(y, yhat);
  if (id == "tpr") return ratio(c.tp, c.tp + c.fn);
  if (id == "fpr") return ratio(c.fp, c.tn + c.fp);
  if (id == "tnr") return ratio(c.tn, c.tn + c.fp);
  if (id == "fnr") return ratio(c.fn, c.tp + c.fn);
  if (id == "ppv") return ratio(c.tp, c.tp + c.fp);
  if (id == "npv") return ratio(c.tn, c.fn + c.tn);
  if (id == "f1") return ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
  throw InvalidArgument("unhandled metric '" + id + "'");
}

std::optional<double> score(std::string_view metric, std::span<const double> y, const PredictionMatrix& f,
                            const ScoreContext& ctx) {
  return score(find_metric(metric), y, f, ctx);
}

}  // namespace hpo
