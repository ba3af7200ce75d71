#include "hpo/data/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hpo/core/errors.hpp"
#include "hpo/data/dataset.hpp"

namespace hpo {

double ResamplingPlan::reference_train_size() const {
  if (splits.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : splits) total += static_cast<double>(s.train.size());
  return total / static_cast<double>(splits.size());
}

void ResamplingPlan::check() const {
  for (std::size_t i = 0; i < splits.size(); ++i) {
    std::vector<char> seen(n, 0);
    for (std::size_t r : splits[i].train) {
      if (r >= n) throw InvalidArgument("split " + std::to_string(i) + " indexes past n");
      seen[r] = 1;
    }
    for (std::size_t r : splits[i].test) {
      if (r >= n) throw InvalidArgument("split " + std::to_string(i) + " indexes past n");
      if (seen[r]) throw InvalidArgument("split " + std::to_string(i) + " has overlapping train and test");
    }
  }
}

std::vector<std::size_t> proportional_allocation(std::span<const std::size_t> group_sizes, std::size_t total) {
  const std::size_t n = std::accumulate(group_sizes.begin(), group_sizes.end(), std::size_t{0});
  std::vector<std::size_t> out(group_sizes.size(), 0);
  if (n == 0) return out;
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t g = 0; g < group_sizes.size(); ++g) {
    const double exact = static_cast<double>(total) * static_cast<double>(group_sizes[g]) / static_cast<double>(n);
    out[g] = static_cast<std::size_t>(std::floor(exact));
    assigned += out[g];
    remainders.push_back({exact - std::floor(exact), g});
  }
  std::stable_sort(remainders.begin(), remainders.end(), [](auto& a, auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < total && i < remainders.size(); ++i) {
    const std::size_t g = remainders[i].second;
    if (out[g] < group_sizes[g]) {
      ++out[g];
      ++assigned;
    }
  }
  return out;
}

namespace {

std::vector<std::size_t> iota_vec(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

/// Row ids grouped by class, each group shuffled.
std::vector<std::vector<std::size_t>> shuffled_groups(std::span<const std::size_t> rows,
                                                      std::span<const std::size_t> strata, Rng& rng) {
  std::size_t g = 0;
  for (std::size_t r : rows) g = std::max(g, strata[r] + 1);
  std::vector<std::vector<std::size_t>> groups(g);
  for (std::size_t r : rows) groups[strata[r]].push_back(r);
  for (auto& grp : groups) std::shuffle(grp.begin(), grp.end(), rng);
  return groups;
}

}  // namespace

ResamplingPlan make_holdout(std::size_t n, double train_fraction, std::span<const std::size_t> strata, Rng& rng) {
  if (n < 2) throw InvalidArgument("holdout needs n >= 2");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InvalidArgument("train fraction must lie in (0, 1)");
  if (!strata.empty() && strata.size() != n) throw InvalidArgument("strata length differs from n");
  const auto m = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n))),
                                         1, n - 1);
  Split split;
  if (strata.empty()) {
    auto perm = iota_vec(n);
    std::shuffle(perm.begin(), perm.end(), rng);
    split.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(m));
    split.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(m), perm.end());
  } else {
    const auto rows = iota_vec(n);
    auto groups = shuffled_groups(rows, strata, rng);
    std::vector<std::size_t> sizes;
    for (const auto& grp : groups) {
      if (grp.size() == 1) throw InvalidArgument("stratified holdout: a class has fewer than 2 members");
      sizes.push_back(grp.size());
    }
    const auto alloc = proportional_allocation(sizes, m);
    for (std::size_t c = 0; c < groups.size(); ++c) {
      split.train.insert(split.train.end(), groups[c].begin(), groups[c].begin() + static_cast<std::ptrdiff_t>(alloc[c]));
      split.test.insert(split.test.end(), groups[c].begin() + static_cast<std::ptrdiff_t>(alloc[c]), groups[c].end());
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  ResamplingPlan plan;
  plan.n = n;
  plan.splits.push_back(std::move(split));
  return plan;
}

ResamplingPlan make_kfold(std::size_t n, std::size_t k, std::size_t repeats, std::span<const std::size_t> strata,
                          Rng& rng) {
  if (k < 2) throw InvalidArgument("k-fold needs k >= 2");
  if (k > n) throw InvalidArgument("k-fold needs k <= n");
  if (repeats < 1) throw InvalidArgument("k-fold needs repeats >= 1");
  if (!strata.empty() && strata.size() != n) throw InvalidArgument("strata length differs from n");
  ResamplingPlan plan;
  plan.n = n;
  plan.folds = k;
  plan.repeats = repeats;
  const auto rows = iota_vec(n);
  for (std::size_t rep = 0; rep < repeats; ++rep) {
    // Position i of the (class-grouped) shuffled order goes to fold i mod k.
    std::vector<std::size_t> order;
    if (strata.empty()) {
      order = rows;
      std::shuffle(order.begin(), order.end(), rng);
    } else {
      for (auto& grp : shuffled_groups(rows, strata, rng)) order.insert(order.end(), grp.begin(), grp.end());
    }
    std::vector<std::size_t> fold_of(n);
    for (std::size_t i = 0; i < n; ++i) fold_of[order[i]] = i % k;
    for (std::size_t f = 0; f < k; ++f) {
      Split s;
      for (std::size_t r = 0; r < n; ++r) (fold_of[r] == f ? s.test : s.train).push_back(r);
      plan.splits.push_back(std::move(s));
    }
  }
  return plan;
}

std::vector<std::size_t> subsample_rows(std::span<const std::size_t> rows, std::size_t m,
                                        std::span<const std::size_t> strata, Rng& rng) {
  m = std::min(m, rows.size());
  std::vector<std::size_t> out;
  if (strata.empty()) {
    std::vector<std::size_t> perm(rows.begin(), rows.end());
    std::shuffle(perm.begin(), perm.end(), rng);
    out.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(m));
  } else {
    auto groups = shuffled_groups(rows, strata, rng);
    std::vector<std::size_t> sizes;
    for (const auto& g : groups) sizes.push_back(g.size());
    const auto alloc = proportional_allocation(sizes, m);
    for (std::size_t c = 0; c < groups.size(); ++c)
      out.insert(out.end(), groups[c].begin(), groups[c].begin() + static_cast<std::ptrdiff_t>(alloc[c]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

ResamplingSpec ResamplingSpec::holdout(double fraction, bool stratify) {
  ResamplingSpec s;
  s.kind = Kind::holdout;
  s.train_fraction = fraction;
  s.stratify = stratify;
  s.folds = 1;
  return s;
}

ResamplingSpec ResamplingSpec::cv(std::size_t folds, std::size_t repeats, bool stratify) {
  ResamplingSpec s;
  s.kind = Kind::cv;
  s.folds = folds;
  s.repeats = repeats;
  s.stratify = stratify;
  return s;
}

ResamplingPlan ResamplingSpec::instantiate(const Dataset& data, Rng& rng) const {
  std::vector<std::size_t> strata;
  if (stratify && data.task() == TaskType::classification) strata = data.class_codes();
  if (kind == Kind::holdout) return make_holdout(data.n_rows(), train_fraction, strata, rng);
  return make_kfold(data.n_rows(), folds, repeats, strata, rng);
}

std::string ResamplingSpec::str() const {
  if (kind == Kind::holdout) return "holdout(" + std::to_string(train_fraction) + ")";
  return std::to_string(repeats) + "x" + std::to_string(folds) + "-fold CV";
}

}  // namespace hpo
