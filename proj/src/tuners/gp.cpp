#include "hpo/tuners/gp.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "hpo/core/errors.hpp"
#include "hpo/core/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hpo {

namespace {

constexpr double kJitterStart = 1e-8;
constexpr double kJitterMax = 1e-4;

Eigen::MatrixXd gram(const Eigen::MatrixXd& x, const GpHyper& h) {
  const auto n = x.rows();
  Eigen::MatrixXd k(n, n);
  const double s2 = h.signal_sd * h.signal_sd;
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = s2;
    for (Eigen::Index j = 0; j < i; ++j) {
      double r = 0.0;
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const double u = (x(i, c) - x(j, c)) / h.lengthscales[static_cast<std::size_t>(c)];
        r += u * u;
      }
      k(i, j) = k(j, i) = s2 * std::exp(-0.5 * r);
    }
  }
  return k;
}

/// Cholesky of K + (noise^2 + jitter) I with jitter escalation; nullopt if still indefinite.
std::optional<std::pair<Eigen::LLT<Eigen::MatrixXd>, double>> factorize(const Eigen::MatrixXd& k, double noise_sd) {
  const auto n = k.rows();
  for (double jitter = kJitterStart; jitter <= kJitterMax * 1.0000001; jitter *= 10.0) {
    Eigen::MatrixXd m = k;
    m.diagonal().array() += noise_sd * noise_sd + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() == Eigen::Success) {
      bool ok = true;
      const Eigen::MatrixXd& l = llt.matrixLLT();
      for (Eigen::Index i = 0; i < n && ok; ++i) ok = std::isfinite(l(i, i)) && l(i, i) > 0.0;
      if (ok) return std::make_pair(std::move(llt), jitter);
    }
  }
  return std::nullopt;
}

struct Canonical {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

Canonical canonical(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidArgument("gp: input and target counts differ");
  if (x.size() < 2) throw InvalidArgument("gp: need at least two training points");
  const std::size_t d = x.front().size();
  for (const auto& r : x)
    if (r.size() != d) throw InvalidArgument("gp: inconsistent input dimension");
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });
  Canonical c{Eigen::MatrixXd(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(d)),
              Eigen::VectorXd(static_cast<Eigen::Index>(x.size()))};
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) c.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x[order[i]][j];
    c.y[static_cast<Eigen::Index>(i)] = y[order[i]];
  }
  return c;
}

}  // namespace

double GaussianProcess::negative_lml(const Eigen::MatrixXd& x, const Eigen::VectorXd& z, const GpHyper& h) {
  auto f = factorize(gram(x, h), h.noise_sd);
  if (!f) return std::numeric_limits<double>::infinity();
  const auto& llt = f->first;
  const Eigen::VectorXd alpha = llt.solve(z);
  const Eigen::MatrixXd& l = llt.matrixLLT();
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) logdet += std::log(l(i, i));
  return 0.5 * z.dot(alpha) + logdet + 0.5 * static_cast<double>(z.size()) * std::log(2.0 * std::numbers::pi);
}

GaussianProcess GaussianProcess::fit_with(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                                          const GpHyper& hyper) {
  auto c = canonical(x, y);
  if (hyper.lengthscales.size() != static_cast<std::size_t>(c.x.cols()))
    throw InvalidArgument("gp: one lengthscale per input dimension required");
  GaussianProcess gp;
  gp.y_mean_ = c.y.mean();
  const double var = (c.y.array() - gp.y_mean_).square().sum() / static_cast<double>(c.y.size());
  gp.y_sd_ = var > 0.0 ? std::sqrt(var) : 1.0;
  const Eigen::VectorXd z = (c.y.array() - gp.y_mean_) / gp.y_sd_;
  auto f = factorize(gram(c.x, hyper), hyper.noise_sd);
  if (!f) throw FitError("gp: kernel matrix not positive definite after jitter escalation");
  gp.x_ = std::move(c.x);
  gp.llt_ = std::move(f->first);
  gp.jitter_ = f->second;
  gp.hyper_ = hyper;
  gp.alpha_ = gp.llt_.solve(z);
  const Eigen::MatrixXd& l = gp.llt_.matrixLLT();
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) logdet += std::log(l(i, i));
  gp.lml_ = -(0.5 * z.dot(gp.alpha_) + logdet + 0.5 * static_cast<double>(z.size()) * std::log(2.0 * std::numbers::pi));
  return gp;
}

GaussianProcess GaussianProcess::fit(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                                     const GpOptions& opt) {
  auto c = canonical(x, y);
  const auto d = static_cast<std::size_t>(c.x.cols());
  const double mean = c.y.mean();
  const double var = (c.y.array() - mean).square().sum() / static_cast<double>(c.y.size());
  const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
  const Eigen::VectorXd z = (c.y.array() - mean) / sd;

  const bool fit_noise = !opt.fixed_noise_sd.has_value();
  const std::size_t np = d + 1 + (fit_noise ? 1 : 0);
  std::vector<double> lo(np), hi(np);
  for (std::size_t i = 0; i < d; ++i) {
    lo[i] = std::log(opt.length_lower);
    hi[i] = std::log(opt.length_upper);
  }
  lo[d] = std::log(opt.signal_lower);
  hi[d] = std::log(opt.signal_upper);
  if (fit_noise) {
    lo[d + 1] = std::log(opt.noise_lower);
    hi[d + 1] = std::log(opt.noise_upper);
  }
  auto unpack = [&](const std::vector<double>& t) {
    GpHyper h;
    h.lengthscales.resize(d);
    for (std::size_t i = 0; i < d; ++i) h.lengthscales[i] = std::exp(t[i]);
    h.signal_sd = std::exp(t[d]);
    h.noise_sd = fit_noise ? std::exp(t[d + 1]) : *opt.fixed_noise_sd;
    return h;
  };
  auto objective = [&](const std::vector<double>& t) { return negative_lml(c.x, z, unpack(t)); };

  Rng rng = make_rng(opt.seed);
  std::vector<double> best_t;
  double best_f = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, opt.restarts); ++r) {
    std::vector<double> t0(np);
    if (r == 0) {
      for (std::size_t i = 0; i < d; ++i) t0[i] = std::log(0.3);
      t0[d] = 0.0;
      if (fit_noise) t0[d + 1] = std::log(1e-2);
    } else {
      for (std::size_t i = 0; i < np; ++i) t0[i] = lo[i] + (hi[i] - lo[i]) * uniform01(rng);
    }
    auto res = nelder_mead(objective, t0, lo, hi, 0.1, opt.max_iter, 1e-10);
    if (res.f < best_f) {
      best_f = res.f;
      best_t = res.x;
    }
  }
  if (!std::isfinite(best_f)) throw FitError("gp: no restart produced a positive definite kernel matrix");
  return fit_with(x, y, unpack(best_t));
}

GpPrediction GaussianProcess::predict(const std::vector<double>& q) const {
  if (q.size() != dim()) throw InvalidArgument("gp: query dimension mismatch");
  const auto n = x_.rows();
  Eigen::VectorXd ks(n);
  const double s2 = hyper_.signal_sd * hyper_.signal_sd;
  for (Eigen::Index i = 0; i < n; ++i) {
    double r = 0.0;
    for (Eigen::Index c = 0; c < x_.cols(); ++c) {
      const double u = (x_(i, c) - q[static_cast<std::size_t>(c)]) / hyper_.lengthscales[static_cast<std::size_t>(c)];
      r += u * u;
    }
    ks[i] = s2 * std::exp(-0.5 * r);
  }
  const double mz = ks.dot(alpha_);
  const Eigen::VectorXd v = llt_.matrixL().solve(ks);
  const double var = std::max(0.0, s2 - v.squaredNorm());
  return {y_mean_ + y_sd_ * mz, y_sd_ * std::sqrt(var)};
}

std::vector<GpPrediction> GaussianProcess::predict_batch_serial(const std::vector<std::vector<double>>& xs) const {
  std::vector<GpPrediction> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = predict(xs[i]);
  return out;
}

std::vector<GpPrediction> GaussianProcess::predict_batch(const std::vector<std::vector<double>>& xs) const {
  std::vector<GpPrediction> out(xs.size());
  const long m = static_cast<long>(xs.size());
  bool nested = false;
#ifdef _OPENMP
  nested = omp_in_parallel();
#endif
#pragma omp parallel for schedule(static) if (!nested && m >= 512)
  for (long i = 0; i < m; ++i) out[static_cast<std::size_t>(i)] = predict(xs[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace hpo
