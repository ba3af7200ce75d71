#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hpo/data/dataset.hpp"

namespace hpo {

// Small generated datasets. Every generator is a pure function of its arguments.

/// 150 rows, features x1, x2; classes "neg"/"pos" split by x1 + x2 with a margin of 1.
Dataset separable_classification(std::uint64_t seed = 1);
/// 150 rows, features x1..x3 ~ U(-1, 1); y = 1 + 2 x1 - x2 + 0.5 x3 + N(0, 0.3^2).
Dataset noisy_linear_regression(std::uint64_t seed = 1);
/// n rows of p standard-normal features and a balanced binary label independent of them.
Dataset random_binary(std::size_t n, std::size_t p, std::uint64_t seed);
/// n rows, x1, x2 ~ U(-1, 1); class "pos" iff sin(pi x1) + x2 + N(0, 0.2^2) > 0.
Dataset smooth_classification(std::size_t n, std::uint64_t seed);

std::vector<std::string> bundled_names();
/// Looks up a bundled dataset by name; throws InvalidArgument for unknown names.
Dataset bundled(const std::string& name, std::uint64_t seed = 1);

}  // namespace hpo
