#include "hpo/core/parallel.hpp"

namespace hpo {

std::string_view to_string(ParallelLevel level) {
  switch (level) {
    case ParallelLevel::outer: return "outer";
    case ParallelLevel::batch: return "batch";
    case ParallelLevel::config: return "config";
    case ParallelLevel::fold: return "fold";
    case ParallelLevel::combined: return "combined";
  }
  return "config";
}

std::optional<ParallelLevel> parse_parallel_level(std::string_view s) {
  if (s == "outer") return ParallelLevel::outer;
  if (s == "batch") return ParallelLevel::batch;
  if (s == "config") return ParallelLevel::config;
  if (s == "fold") return ParallelLevel::fold;
  if (s == "combined") return ParallelLevel::combined;
  return std::nullopt;
}

}  // namespace hpo
