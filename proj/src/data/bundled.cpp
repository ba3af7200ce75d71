#include "hpo/data/bundled.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hpo/core/errors.hpp"
#include "hpo/core/rng.hpp"

namespace hpo {

namespace {

const std::vector<std::string> kBinaryLabels = {"neg", "pos"};

}  // namespace

Dataset separable_classification(std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> x1, x2, y;
  while (x1.size() < 150) {
    const double a = u(rng), b = u(rng);
    if (std::abs(a + b) < 1.0) continue;
    x1.push_back(a);
    x2.push_back(b);
    y.push_back(a + b > 0 ? 1.0 : 0.0);
  }
  return Dataset({Column::numeric("x1", std::move(x1)), Column::numeric("x2", std::move(x2))}, std::move(y),
                 TaskType::classification, kBinaryLabels, "class");
}

Dataset noisy_linear_regression(std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.3);
  std::vector<double> x1, x2, x3, y;
  for (int i = 0; i < 150; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng);
    x1.push_back(a);
    x2.push_back(b);
    x3.push_back(c);
    y.push_back(1.0 + 2.0 * a - b + 0.5 * c + noise(rng));
  }
  return Dataset({Column::numeric("x1", std::move(x1)), Column::numeric("x2", std::move(x2)),
                  Column::numeric("x3", std::move(x3))},
                 std::move(y), TaskType::regression, {}, "y");
}

Dataset random_binary(std::size_t n, std::size_t p, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("random_binary needs n >= 2");
  Rng rng = make_rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<Column> cols;
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<double> v(n);
    for (auto& x : v) x = z(rng);
    cols.push_back(Column::numeric("x" + std::to_string(j + 1), std::move(v)));
  }
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = i < n / 2 ? 0.0 : 1.0;
  std::shuffle(y.begin(), y.end(), rng);
  return Dataset(std::move(cols), std::move(y), TaskType::classification, kBinaryLabels, "class");
}

Dataset smooth_classification(std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.2);
  std::vector<double> x1(n), x2(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x1[i] = u(rng);
    x2[i] = u(rng);
    y[i] = std::sin(std::numbers::pi * x1[i]) + x2[i] + noise(rng) > 0 ? 1.0 : 0.0;
  }
  return Dataset({Column::numeric("x1", std::move(x1)), Column::numeric("x2", std::move(x2))}, std::move(y),
                 TaskType::classification, kBinaryLabels, "class");
}

std::vector<std::string> bundled_names() {
  return {"separable_classification", "noisy_linear_regression", "random_binary", "smooth_classification"};
}

Dataset bundled(const std::string& name, std::uint64_t seed) {
  if (name == "separable_classification") return separable_classification(seed);
  if (name == "noisy_linear_regression") return noisy_linear_regression(seed);
  if (name == "random_binary") return random_binary(100, 5, seed);
  if (name == "smooth_classification") return smooth_classification(200, seed);
  throw InvalidArgument("unknown bundled dataset '" + name + "'");
}

}  // namespace hpo
