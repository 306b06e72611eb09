#include "skewflow/stats.hpp"

namespace skewflow {

std::string classify(bool drift_present, const ScalingFit& fit, const ClassificationBands& b) {
  if (!(fit.stderr_exponent < b.max_stderr)) return "inconclusive";
  const double h = fit.exponent;
  const std::string prefix = drift_present ? "drift+" : "";
  if (h > b.ballistic_above) return "ballistic";
  if (h < b.bounded_below) return drift_present ? "ballistic" : "bounded";
  if (h >= b.diffusive_lo && h <= b.diffusive_hi) return prefix + "diffusive";
  if (h >= b.super_lo && h <= b.super_hi) return prefix + "superdiffusive";
  return "inconclusive";
}

}  // namespace skewflow
