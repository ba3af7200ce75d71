#include "hpo/learn/elastic_net.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "hpo/core/errors.hpp"

namespace hpo {

namespace {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double soft(double v, double t) { return v > t ? v - t : (v < -t ? v + t : 0.0); }

double largest_eigenvalue(const Eigen::MatrixXd& gram) {
  if (gram.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues().maxCoeff());
}

/// FISTA with gradient-based adaptive restart. `grad(z, g)` fills the smooth-part
/// gradient; the prox is applied to the first `penalized` coordinates only.
template <class Grad>
LinearFit fista(std::size_t dim, std::size_t penalized, double lip, double lambda, double alpha, Grad&& grad,
                const ProxGradOptions& opt) {
  LinearFit out;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  if (lip <= 0.0) {
    out.theta.assign(dim, 0.0);
    out.converged = true;
    return out;
  }
  const double step = 1.0 / lip;
  const double l1 = step * lambda * alpha;
  const double shrink = 1.0 + step * lambda * (1.0 - alpha);
  Eigen::VectorXd z = theta, g(theta.size()), next(theta.size());
  double t = 1.0;
  for (std::size_t it = 1; it <= opt.max_iter; ++it) {
    grad(z, g);
    next = z - step * g;
    for (std::size_t j = 0; j < penalized; ++j) {
      const auto i = static_cast<Eigen::Index>(j);
      next[i] = soft(next[i], l1) / shrink;
    }
    const double change = (next - theta).cwiseAbs().maxCoeff();
    const bool restart = (z - next).dot(next - theta) > 0.0;
    const double t_next = restart ? 1.0 : 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = restart ? next : Eigen::VectorXd(next + ((t - 1.0) / t_next) * (next - theta));
    theta = next;
    t = t_next;
    out.iterations = it;
    if (change < opt.tol) {
      out.converged = true;
      break;
    }
  }
  out.theta.assign(theta.data(), theta.data() + theta.size());
  return out;
}

}  // namespace

LinearFit fit_elastic_net_gaussian(const std::vector<double>& x, std::size_t n, std::size_t p,
                                   const std::vector<double>& y, double lambda, double alpha,
                                   const ProxGradOptions& opt) {
  if (n == 0 || x.size() != n * p || y.size() != n) throw InvalidArgument("elastic net: inconsistent design size");
  if (lambda < 0 || alpha < 0 || alpha > 1) throw FitError("elastic net: lambda must be >= 0 and alpha in [0, 1]");
  const auto N = static_cast<Eigen::Index>(n), P = static_cast<Eigen::Index>(p);
  Eigen::Map<const Mat> X(x.data(), N, P);
  Eigen::Map<const Eigen::VectorXd> Y(y.data(), N);
  const Eigen::RowVectorXd xbar = X.colwise().mean();
  const double ybar = Y.mean();
  const Mat Xc = X.rowwise() - xbar;
  const Eigen::VectorXd yc = Y.array() - ybar;
  const double dn = static_cast<double>(n);
  const Eigen::MatrixXd gram = (Xc.transpose() * Xc) / dn;
  const Eigen::VectorXd xty = (Xc.transpose() * yc) / dn;
  auto grad = [&](const Eigen::VectorXd& z, Eigen::VectorXd& g) { g.noalias() = gram * z - xty; };
  LinearFit fit = fista(p, p, largest_eigenvalue(gram), lambda, alpha, grad, opt);
  double b = ybar;
  for (std::size_t j = 0; j < p; ++j) b -= xbar[static_cast<Eigen::Index>(j)] * fit.theta[j];
  fit.intercept = b;
  return fit;
}

LinearFit fit_elastic_net_logistic(const std::vector<double>& x, std::size_t n, std::size_t p,
                                   const std::vector<double>& y, double lambda, double alpha,
                                   const ProxGradOptions& opt) {
  if (n == 0 || x.size() != n * p || y.size() != n) throw InvalidArgument("elastic net: inconsistent design size");
  if (lambda < 0 || alpha < 0 || alpha > 1) throw FitError("elastic net: lambda must be >= 0 and alpha in [0, 1]");
  const auto N = static_cast<Eigen::Index>(n), P = static_cast<Eigen::Index>(p);
  Mat Xa(N, P + 1);
  Xa.leftCols(P) = Eigen::Map<const Mat>(x.data(), N, P);
  Xa.col(P).setOnes();
  Eigen::Map<const Eigen::VectorXd> Y(y.data(), N);
  const double dn = static_cast<double>(n);
  const double lip = largest_eigenvalue((Xa.transpose() * Xa) / dn) / 4.0;
  Eigen::VectorXd mu(N);
  auto grad = [&](const Eigen::VectorXd& z, Eigen::VectorXd& g) {
    mu.noalias() = Xa * z;
    for (Eigen::Index i = 0; i < N; ++i) mu[i] = 1.0 / (1.0 + std::exp(-mu[i])) - Y[i];
    g.noalias() = (Xa.transpose() * mu) / dn;
  };
  LinearFit fit = fista(p + 1, p, lip, lambda, alpha, grad, opt);
  fit.intercept = fit.theta.back();
  fit.theta.pop_back();
  return fit;
}

PredictionMatrix ElasticNetModel::predict(const Dataset& features) const {
  const std::size_t p = fit_.theta.size();
  if (features.n_features() != p) throw InvalidArgument("elastic net: feature count differs from training data");
  const auto x = features.numeric_matrix();
  const std::size_t m = features.n_rows();
  std::vector<double> eta(m, fit_.intercept);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < p; ++j) eta[i] += x[i * p + j] * fit_.theta[j];
  if (!logistic_) return PredictionMatrix::column(std::move(eta));
  for (auto& e : eta) e = 1.0 / (1.0 + std::exp(-e));
  return PredictionMatrix::binary_probabilities(eta);
}

ElasticNetLearner::ElasticNetLearner()
    : space_({ParamSpec::real("s", -12.0, 12.0, Trafo::pow2), ParamSpec::real("alpha", 0.0, 1.0)}) {}

ModelPtr ElasticNetLearner::train(const Dataset& data, const Config& cfg, std::uint64_t) const {
  const auto t = space_.transform(cfg);
  const double lambda = t.number_or("s", 1.0);
  const double alpha = t.number_or("alpha", 1.0);
  const auto x = data.numeric_matrix();
  std::vector<double> y(data.target().begin(), data.target().end());
  if (data.task() == TaskType::classification) {
    if (data.n_classes() != 2) throw CapabilityError("elastic net supports binary classification only");
    return std::make_shared<ElasticNetModel>(
        fit_elastic_net_logistic(x, data.n_rows(), data.n_features(), y, lambda, alpha), true);
  }
  return std::make_shared<ElasticNetModel>(
      fit_elastic_net_gaussian(x, data.n_rows(), data.n_features(), y, lambda, alpha), false);
}

}  // namespace hpo
