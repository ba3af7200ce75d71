#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hpo/objective/archive.hpp"
#include "hpo/objective/evaluator.hpp"

namespace hpo {

enum class RaceTest { t_test, friedman };

std::string_view to_string(RaceTest t);
std::optional<RaceTest> parse_race_test(std::string_view s);

struct RaceOptions {
  std::size_t t_first = 5;  // folds before the first test
  std::size_t t_each = 1;   // folds between tests
  RaceTest test = RaceTest::t_test;
  double alpha = 0.05;
  std::size_t n_min = 1;  // stop once this many or fewer survive
  std::optional<std::size_t> max_evals;  // fold evaluations
};

struct RaceResult {
  /// Positions of surviving configs, best mean first.
  std::vector<std::size_t> survivors;
  /// All positions: survivors, then eliminated configs (later elimination first).
  std::vector<std::size_t> ranking;
  /// scores[i][f], empty optional where config i never ran fold f.
  std::vector<std::vector<std::optional<double>>> scores;
  /// Number of folds at which config i was eliminated; 0 if it survived.
  std::vector<std::size_t> eliminated_at;
  std::vector<bool> failed;
  std::vector<std::string> errors;
  /// Archive index of each config (race on an evaluator only).
  std::vector<std::size_t> indices;
  std::size_t folds_run = 0;
  std::size_t evaluations = 0;
};

/// Loss of config i on fold f; nullopt or an exception marks the config failed.
using FoldScorer = std::function<std::optional<double>(std::size_t config, std::size_t fold)>;

/// Races n configs over n_folds folds. Fold evaluations within a block run as one
/// parallel job set (config, fold or combined level).
RaceResult race_scores(std::size_t n_configs, std::size_t n_folds, const FoldScorer& score, const RaceOptions& opt,
                       const ExecPolicy& policy = {});

/// Races configs on the evaluator's objective, one fold per resampling split.
/// Archive indices are reserved for all configs before the race and the entries
/// are appended afterwards in config order with the folds each config ran.
RaceResult race(const Evaluator& evaluator, Archive& archive, const std::vector<Config>& configs,
                const RaceOptions& opt, const std::string& tag = "race");

/// Paired t-test of b against a on shared folds; two-sided p value.
/// Returns nullopt with fewer than 2 pairs.
struct PairedT {
  double mean_diff = 0.0;  // mean of b - a
  double sd = 0.0;
  double p = 1.0;
};
std::optional<PairedT> paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

/// Friedman statistic over b blocks (rows) and k treatments (columns) with average ranks.
struct FriedmanResult {
  double statistic = 0.0;
  double p = 1.0;
  std::vector<double> rank_sums;
  double critical_difference = 0.0;  // Conover post-hoc at the given alpha
};
FriedmanResult friedman_test(const std::vector<std::vector<double>>& blocks, double alpha);

/// Rank-based parent probabilities for N elites, rank 1 first.
std::vector<double> parent_probabilities(std::size_t n_elite);

/// Default number of races, floor(2 + log2 dim).
std::size_t default_race_count(std::size_t dim);

/// Truncated normal on [lo, hi] by rejection; falls back to uniform after 1000 misses.
double truncated_normal(Rng& rng, double mean, double sd, double lo, double hi);

struct IraceOptions {
  std::size_t n_races = 0;  // 0 = default_race_count
  RaceOptions race{.t_first = 5, .t_each = 1, .test = RaceTest::t_test, .alpha = 0.05, .n_min = 2, .max_evals = {}};
  double sd_decay = 0.7;
  double categorical_shift = 0.3;
  bool elitist = true;
};

struct IraceResult {
  std::size_t best_index = 0;  // archive index of the final race's best
  std::size_t races = 0;
  std::size_t fold_evaluations = 0;
  std::vector<std::size_t> population_sizes;
};

/// Iterated racing with a budget in fold evaluations, split evenly over the races.
IraceResult irace_run(const Evaluator& evaluator, Archive& archive, std::size_t budget, std::uint64_t seed,
                      const IraceOptions& opt = {}, const std::vector<Config>& warm = {});

}  // namespace hpo
