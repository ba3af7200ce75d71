#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "hpo/objective/archive.hpp"
#include "hpo/objective/evaluator.hpp"
#include "hpo/tuners/termination.hpp"
#include "hpo/tuners/tuner.hpp"

namespace hpo {

/// Tuner kind plus its constants, e.g. {"kind": "es", "mu": 10}.
struct TunerSpec {
  std::string kind = "random";
  nlohmann::json params = nlohmann::json::object();
};

TunerSpec tuner_spec_from_json(const nlohmann::json& j);
nlohmann::json tuner_spec_to_json(const TunerSpec& spec);

/// Builds any propose/observe tuner (not racing, which drives evaluation itself).
/// Unknown kinds or constants throw ConfigError.
TunerPtr make_tuner(const TunerSpec& spec, const Objective& objective, std::uint64_t seed);
/// Checks kind and constants for any tuner, racing included, without running anything.
void validate_tuner_spec(const TunerSpec& spec, const Objective& objective);

struct TuningResult {
  std::size_t best_index = 0;
  std::string stop_reason;
  double seconds = 0.0;
  std::size_t iterations = 0;
};

/// Alternates propose / evaluate / observe until a termination criterion fires or
/// the tuner finishes ("exhausted"). Batches are trimmed to the remaining budget.
TuningResult run_tuning(Tuner& tuner, const Evaluator& evaluator, Archive& archive, const Termination& termination);

struct TuneOptions {
  TunerSpec tuner;
  Termination termination;
  std::uint64_t seed = 0;
  ExecPolicy policy{};
  std::optional<double> failure_penalty;
  /// Optional prior run on a compatible space.
  const Archive* warm_archive = nullptr;
  const SearchSpace* warm_space = nullptr;
};

struct TuneOutcome {
  Archive archive;
  TuningResult result;
  std::vector<std::string> events;
};

/// Full tuning run. Tuner stream derive_seed(seed, 1), evaluation stream derive_seed(seed, 2).
TuneOutcome tune(const Objective& objective, const TuneOptions& opt);

}  // namespace hpo
