#include "skewflow/pm_map.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace skewflow {

PMParams::PMParams(double gamma, HalfBranch branch_at_half)
    : gamma_(gamma), branch_(branch_at_half), two_pow_gamma_(0.0) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::domain_error("gamma out of range [0,1): " + std::to_string(gamma));
  }
  two_pow_gamma_ = std::pow(2.0, gamma);
}

double pm_step(double x, const PMParams& params) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("pm_step: x outside [0,1]: " + std::to_string(x));
  }
  if (x == 0.5) {
    return params.branch_at_half() == HalfBranch::left ? 1.0 : 0.0;
  }
  if (x > 0.5) {
    return 2.0 * x - 1.0;
  }
  return x * (1.0 + params.two_pow_gamma() * std::pow(x, params.gamma()));
}

std::vector<double> pm_orbit(double x0, std::int64_t n, const PMParams& params) {
  if (n < 0) {
    throw std::invalid_argument("pm_orbit: negative length");
  }
  if (!(x0 >= 0.0 && x0 <= 1.0)) {
    throw std::domain_error("pm_orbit: x0 outside [0,1]: " + std::to_string(x0));
  }
  std::vector<double> orbit;
  orbit.reserve(static_cast<std::size_t>(n) + 1);
  orbit.push_back(x0);
  double x = x0;
  for (std::int64_t k = 0; k < n; ++k) {
    x = pm_step(x, params);
    orbit.push_back(x);
  }
  return orbit;
}

}  // namespace skewflow
