#include "hpo/tuners/termination.hpp"

#include <cmath>

#include "hpo/core/errors.hpp"

namespace hpo {

void Termination::check() const {
  if (!max_evals && !max_fidelity && !max_wall)
    throw InvalidArgument("termination needs a hard budget (max_evals, max_fidelity or max_wall)");
  if (max_evals && *max_evals == 0) throw InvalidArgument("max_evals must be positive");
  if (max_fidelity && !(*max_fidelity > 0)) throw InvalidArgument("max_fidelity must be positive");
  if (max_wall && !(*max_wall > 0)) throw InvalidArgument("max_wall must be positive");
  if (stagnation && stagnation->window == 0) throw InvalidArgument("stagnation window must be positive");
  if (stagnation && stagnation->delta < 0) throw InvalidArgument("stagnation delta must be non-negative");
  if (ei_threshold && !(*ei_threshold >= 0)) throw InvalidArgument("ei_threshold must be non-negative");
}

std::size_t entries_since_improvement(const Archive& archive, double delta) {
  std::optional<double> best;
  std::size_t since = 0;
  for (const auto& e : archive.entries()) {
    if (!e.failed && (!best || e.score < *best - delta)) {
      best = e.score;
      since = 0;
    } else {
      ++since;
    }
  }
  return since;
}

StopVerdict should_stop(const Termination& t, const Archive& archive, double elapsed_seconds,
                        std::optional<double> max_ei) {
  if (t.max_evals && archive.size() >= *t.max_evals) return {true, "max_evals"};
  if (t.max_fidelity && archive.total_fidelity() >= *t.max_fidelity) return {true, "max_fidelity"};
  if (t.max_wall && elapsed_seconds >= *t.max_wall) return {true, "max_wall"};
  if (t.target) {
    for (const auto& e : archive.entries())
      if (!e.failed && e.score <= *t.target) return {true, "target"};
  }
  if (t.stagnation && !archive.empty() && entries_since_improvement(archive, t.stagnation->delta) >= t.stagnation->window)
    return {true, "stagnation"};
  if (t.ei_threshold && max_ei && *max_ei < *t.ei_threshold) return {true, "ei_threshold"};
  return {};
}

}  // namespace hpo
