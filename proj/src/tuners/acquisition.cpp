#include "hpo/tuners/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "hpo/core/errors.hpp"

namespace hpo {

std::string_view to_string(AcquisitionKind k) { return k == AcquisitionKind::ei ? "ei" : "lcb"; }

AcquisitionKind parse_acquisition(std::string_view s) {
  if (s == "ei") return AcquisitionKind::ei;
  if (s == "lcb") return AcquisitionKind::lcb;
  throw InvalidArgument("unknown acquisition function '" + std::string(s) + "'");
}

double expected_improvement(double mean, double sd, double c_min) {
  if (sd < 0.0) throw InvalidArgument("posterior sd must be non-negative");
  const double d = c_min - mean;
  if (sd == 0.0) return std::max(d, 0.0);
  const boost::math::normal_distribution<double> n01;
  const double z = d / sd;
  return d * boost::math::cdf(n01, z) + sd * boost::math::pdf(n01, z);
}

double draw_qlcb_kappa(Rng& rng) { return std::exponential_distribution<double>(1.0)(rng); }

}  // namespace hpo
