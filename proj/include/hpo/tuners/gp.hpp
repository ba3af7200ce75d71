#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hpo {

/// Kernel hyperparameters on the standardized-target scale.
struct GpHyper {
  std::vector<double> lengthscales;
  double signal_sd = 1.0;
  double noise_sd = 1e-3;
};

struct GpOptions {
  int restarts = 10;
  int max_iter = 400;  // Nelder-Mead iterations per restart
  std::uint64_t seed = 0;
  /// Fixes the noise sd instead of estimating it (0 = interpolation up to jitter).
  std::optional<double> fixed_noise_sd;
  double length_lower = 1e-2, length_upper = 10.0;
  double signal_lower = 1e-3, signal_upper = 10.0;
  double noise_lower = 1e-6, noise_upper = 1.0;
};

struct GpPrediction {
  double mean = 0.0;
  double sd = 0.0;  // latent (noise-free) posterior sd
};

/// Gaussian-process regression with an anisotropic squared-exponential kernel.
/// Training points are stored in a canonical (sorted) order, so permuting the
/// inputs does not change the fit.
class GaussianProcess {
 public:
  /// Maximizes the log marginal likelihood over log-scale hyperparameters with
  /// Nelder-Mead restarts. Throws FitError if no restart yields a usable factorization.
  static GaussianProcess fit(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                             const GpOptions& opt = {});
  /// Fit with fixed hyperparameters. Throws FitError if the Gram matrix stays
  /// indefinite after jitter escalation to 1e-4.
  static GaussianProcess fit_with(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                                  const GpHyper& hyper);

  GpPrediction predict(const std::vector<double>& x) const;
  std::vector<GpPrediction> predict_batch(const std::vector<std::vector<double>>& xs) const;
  std::vector<GpPrediction> predict_batch_serial(const std::vector<std::vector<double>>& xs) const;

  const GpHyper& hyper() const { return hyper_; }
  double jitter() const { return jitter_; }
  double log_marginal_likelihood() const { return lml_; }
  std::size_t size() const { return static_cast<std::size_t>(x_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(x_.cols()); }
  double y_mean() const { return y_mean_; }
  double y_sd() const { return y_sd_; }

  /// Negative log marginal likelihood on standardized targets, +inf when the
  /// factorization fails.
  static double negative_lml(const Eigen::MatrixXd& x, const Eigen::VectorXd& z, const GpHyper& h);

 private:
  Eigen::MatrixXd x_;
  Eigen::VectorXd alpha_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  GpHyper hyper_;
  double jitter_ = 0.0;
  double lml_ = 0.0;
  double y_mean_ = 0.0, y_sd_ = 1.0;
};

/// Generic bounded Nelder-Mead minimizer (points are clamped into the box).
struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
};
template <class F>
NelderMeadResult nelder_mead(F&& f, std::vector<double> x0, const std::vector<double>& lower,
                             const std::vector<double>& upper, double step, int max_iter, double tol = 1e-10);

}  // namespace hpo

#include "hpo/tuners/nelder_mead_impl.hpp"
