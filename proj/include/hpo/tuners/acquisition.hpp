#pragma once

#include <string_view>

#include "hpo/core/rng.hpp"

namespace hpo {

enum class AcquisitionKind { ei, lcb };

std::string_view to_string(AcquisitionKind k);
AcquisitionKind parse_acquisition(std::string_view s);

/// E[max(c_min - C, 0)] for C ~ N(mean, sd^2); sd = 0 gives max(c_min - mean, 0).
double expected_improvement(double mean, double sd, double c_min);

/// Utility to maximize: -(mean - kappa * sd).
inline double lcb_utility(double mean, double sd, double kappa) { return -(mean - kappa * sd); }

/// kappa ~ Exp(1), one draw per proposal slot.
double draw_qlcb_kappa(Rng& rng);

}  // namespace hpo
