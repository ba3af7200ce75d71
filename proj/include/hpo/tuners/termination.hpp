#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "hpo/objective/archive.hpp"

namespace hpo {

struct Stagnation {
  std::size_t window = 10;
  double delta = 0.0;
};

/// Any-trigger stop rules. At least one of the hard budgets (max_evals,
/// max_fidelity, max_wall) must be set.
struct Termination {
  std::optional<std::size_t> max_evals;
  std::optional<double> max_fidelity;
  std::optional<double> max_wall;  // seconds
  std::optional<double> target;    // stop once the incumbent score is <= target
  std::optional<Stagnation> stagnation;
  std::optional<double> ei_threshold;

  /// Throws InvalidArgument without a hard budget or with nonsensical values.
  void check() const;
};

struct StopVerdict {
  bool stop = false;
  std::string reason;  // max_evals, max_fidelity, max_wall, target, stagnation, ei_threshold
};

/// `max_ei` is the tuner's last probed maximum EI, when it has one.
StopVerdict should_stop(const Termination& t, const Archive& archive, double elapsed_seconds,
                        std::optional<double> max_ei = std::nullopt);

/// Number of entries after the last one that improved the best score by more than delta.
std::size_t entries_since_improvement(const Archive& archive, double delta);

}  // namespace hpo
