#include "hpo/objective/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "hpo/core/errors.hpp"
#include "hpo/learn/estimate.hpp"

namespace hpo {

double Objective::full_fidelity() const {
  const auto f = fidelity();
  return f ? f->upper : 1.0;
}

void Objective::check_fidelity(double fidelity) const {
  const auto f = this->fidelity().value_or(FidelitySpec{});
  if (!(fidelity >= f.lower && fidelity <= f.upper))
    throw InvalidArgument("fidelity " + std::to_string(fidelity) + " outside [" + std::to_string(f.lower) + ", " +
                          std::to_string(f.upper) + "]");
}

Evaluation aggregate_folds(std::vector<std::optional<double>> per_split, const std::string& error) {
  Evaluation ev;
  ev.per_split = std::move(per_split);
  if (!error.empty()) {
    ev.failed = true;
    ev.error = error;
    return ev;
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& s : ev.per_split)
    if (s) {
      sum += *s;
      ++n;
    }
  if (n == 0) {
    ev.failed = true;
    ev.error = "metric undefined on every split";
    return ev;
  }
  ev.score = sum / static_cast<double>(n);
  return ev;
}

Evaluation evaluate(const Objective& obj, const Config& cfg, double fidelity, std::uint64_t eval_seed,
                    const ExecPolicy& policy) {
  const std::size_t k = obj.n_folds();
  std::vector<std::optional<double>> per(k);
  std::vector<std::string> errors(k);
  run_level(policy, ParallelLevel::fold, k, [&](std::size_t f) {
    try {
      per[f] = obj.evaluate_fold(cfg, fidelity, f, eval_seed);
    } catch (const std::exception& e) {
      errors[f] = "split " + std::to_string(f) + ": " + e.what();
    }
  });
  std::string error;
  for (const auto& e : errors)
    if (!e.empty()) {
      error = e;
      break;
    }
  return aggregate_folds(std::move(per), error);
}

// ---------------------------------------------------------------------------

std::string_view to_string(SyntheticKind k) {
  switch (k) {
    case SyntheticKind::sphere: return "sphere";
    case SyntheticKind::branin: return "branin";
    case SyntheticKind::low_effective_dim: return "low_effective_dim";
  }
  return "?";
}

SyntheticKind parse_synthetic_kind(std::string_view s) {
  for (auto k : {SyntheticKind::sphere, SyntheticKind::branin, SyntheticKind::low_effective_dim})
    if (to_string(k) == s) return k;
  throw InvalidArgument("unknown synthetic function '" + std::string(s) + "'");
}

SyntheticObjective::SyntheticObjective(SyntheticKind kind, std::size_t dim, double noise_sd, std::size_t folds,
                                       std::optional<FidelitySpec> fid)
    : kind_(kind), dim_(dim), noise_sd_(noise_sd), folds_(folds), fid_(fid) {
  if (folds_ == 0) throw InvalidArgument("synthetic objective needs at least one fold");
  if (noise_sd_ < 0) throw InvalidArgument("noise sd must be non-negative");
  std::vector<ParamSpec> specs;
  switch (kind_) {
    case SyntheticKind::branin:
      if (dim_ != 2) throw InvalidArgument("branin is two-dimensional");
      specs = {ParamSpec::real("x1", -5.0, 10.0), ParamSpec::real("x2", 0.0, 15.0)};
      break;
    case SyntheticKind::sphere:
    case SyntheticKind::low_effective_dim: {
      if (dim_ == 0) throw InvalidArgument("synthetic objective needs dimension >= 1");
      const double lo = kind_ == SyntheticKind::sphere ? -5.0 : 0.0;
      const double hi = kind_ == SyntheticKind::sphere ? 5.0 : 1.0;
      for (std::size_t i = 0; i < dim_; ++i) specs.push_back(ParamSpec::real("x" + std::to_string(i + 1), lo, hi));
      break;
    }
  }
  space_ = SearchSpace(std::move(specs));
}

double SyntheticObjective::value(const std::vector<double>& x) const {
  switch (kind_) {
    case SyntheticKind::sphere: {
      double s = 0.0;
      for (double v : x) s += v * v;
      return s;
    }
    case SyntheticKind::branin: {
      constexpr double pi = std::numbers::pi;
      const double b = 5.1 / (4.0 * pi * pi), c = 5.0 / pi, t = 1.0 / (8.0 * pi);
      const double u = x[1] - b * x[0] * x[0] + c * x[0] - 6.0;
      return u * u + 10.0 * (1.0 - t) * std::cos(x[0]) + 10.0;
    }
    case SyntheticKind::low_effective_dim:
      return (x[0] - 0.3) * (x[0] - 0.3);
  }
  return 0.0;
}

double SyntheticObjective::value(const Config& cfg) const {
  std::vector<double> x(dim_);
  for (std::size_t i = 0; i < dim_; ++i) x[i] = cfg.number(space_.specs()[i].name);
  return value(x);
}

std::optional<double> SyntheticObjective::evaluate_fold(const Config& cfg, double fidelity, std::size_t fold,
                                                        std::uint64_t eval_seed) const {
  if (fold >= folds_) throw InvalidArgument("fold index out of range");
  double v = value(cfg);
  if (noise_sd_ > 0.0) {
    const double frac = fidelity / full_fidelity();
    Rng rng = make_rng(derive_seed(eval_seed, fold));
    v += std::normal_distribution<double>(0.0, noise_sd_ / std::sqrt(frac))(rng);
  }
  return v;
}

double SyntheticObjective::reference_optimum() const {
  const auto& specs = space_.specs();
  std::vector<std::vector<double>> starts;
  if (dim_ <= 4) {
    const auto r = static_cast<std::size_t>(std::max(3.0, std::floor(std::pow(40000.0, 1.0 / static_cast<double>(dim_)))));
    std::vector<std::size_t> idx(dim_, 0);
    while (true) {
      std::vector<double> x(dim_);
      for (std::size_t i = 0; i < dim_; ++i)
        x[i] = specs[i].lower + (specs[i].upper - specs[i].lower) * static_cast<double>(idx[i]) / static_cast<double>(r - 1);
      starts.push_back(std::move(x));
      std::size_t i = 0;
      while (i < dim_ && ++idx[i] == r) idx[i++] = 0;
      if (i == dim_) break;
    }
  } else {
    Rng rng = make_rng(0);
    for (int s = 0; s < 20000; ++s) {
      std::vector<double> x(dim_);
      for (std::size_t i = 0; i < dim_; ++i) x[i] = specs[i].lower + (specs[i].upper - specs[i].lower) * uniform01(rng);
      starts.push_back(std::move(x));
    }
  }
  std::vector<double> vals(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) vals[i] = value(starts[i]);
  std::vector<std::size_t> order(starts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t top = std::min<std::size_t>(10, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                    [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });

  double best = vals[order[0]];
  for (std::size_t t = 0; t < top; ++t) {
    auto x = starts[order[t]];
    double fx = vals[order[t]];
    std::vector<double> step(dim_);
    for (std::size_t i = 0; i < dim_; ++i) step[i] = 0.05 * (specs[i].upper - specs[i].lower);
    for (int it = 0; it < 100000; ++it) {
      bool moved = false;
      for (std::size_t i = 0; i < dim_; ++i)
        for (double sgn : {1.0, -1.0}) {
          auto y = x;
          y[i] = std::clamp(y[i] + sgn * step[i], specs[i].lower, specs[i].upper);
          const double fy = value(y);
          if (fy < fx) {
            x = std::move(y);
            fx = fy;
            moved = true;
          }
        }
      if (!moved) {
        bool done = true;
        for (std::size_t i = 0; i < dim_; ++i) {
          step[i] *= 0.5;
          if (step[i] > 1e-13 * (specs[i].upper - specs[i].lower)) done = false;
        }
        if (done) break;
      }
    }
    best = std::min(best, fx);
  }
  return best;
}

// ---------------------------------------------------------------------------

ResampledObjective::ResampledObjective(LearnerPtr learner, Dataset data, ResamplingPlan plan, Metric metric,
                                       std::optional<SearchSpace> space, std::optional<FidelitySpec> fid,
                                       std::vector<double> cost)
    : learner_(std::move(learner)),
      data_(std::move(data)),
      plan_(std::move(plan)),
      metric_(std::move(metric)),
      fid_(fid),
      cost_(std::move(cost)) {
  if (!learner_) throw InvalidArgument("objective needs a learner");
  if (plan_.n != data_.n_rows()) throw InvalidArgument("resampling plan does not match the dataset size");
  if (plan_.size() == 0) throw InvalidArgument("resampling plan has no splits");
  if (metric_.regression != (data_.task() == TaskType::regression))
    throw InvalidArgument("metric '" + metric_.id + "' does not fit the task type");
  if (fid_ && !(fid_->lower > 0 && fid_->lower <= fid_->upper)) throw InvalidArgument("invalid fidelity bounds");
  space_ = space ? std::move(*space) : learner_->space();
  for (const auto& s : space_.specs())
    if (!learner_->space().find(s.name))
      throw InvalidArgument("parameter '" + s.name + "' is not a hyperparameter of " + learner_->id());
}

ScoreContext ResampledObjective::context() const {
  ScoreContext ctx;
  ctx.cost = cost_;
  return ctx;
}

std::optional<double> ResampledObjective::evaluate_fold(const Config& cfg, double fidelity, std::size_t fold,
                                                        std::uint64_t eval_seed) const {
  if (fold >= plan_.size()) throw InvalidArgument("fold index out of range");
  const double frac = fidelity / full_fidelity();
  const auto raw = evaluate_split(*learner_, cfg, data_, plan_.splits[fold], metric_, derive_seed(eval_seed, fold),
                                  std::min(frac, 1.0), context());
  if (!raw) return std::nullopt;
  return metric_.to_loss(*raw);
}

}  // namespace hpo
