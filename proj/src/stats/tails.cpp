#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "skewflow/stats.hpp"

namespace skewflow {

std::string_view to_string(TailSign s) noexcept {
  switch (s) {
    case TailSign::negative: return "negative";
    case TailSign::symmetric: return "symmetric";
    case TailSign::positive: return "positive";
  }
  return "?";
}

TailFit hill_estimator(std::span<const double> values, std::size_t k) {
  const std::size_t n = values.size();
  if (n < 1000) {
    throw std::invalid_argument("hill_estimator: needs at least 1000 values, got " + std::to_string(n));
  }
  if (k < 20 || k > n / 10) {
    throw std::invalid_argument("hill_estimator: k = " + std::to_string(k) + " outside [20, n/10]");
  }
  std::vector<double> v(values.begin(), values.end());
  auto by_magnitude = [](double a, double b) { return std::abs(a) > std::abs(b); };
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end(), by_magnitude);

  TailFit fit;
  fit.n = n;
  fit.k_used = k;
  fit.threshold = std::abs(v[k]);
  if (!(fit.threshold > 0.0)) {
    throw std::domain_error("hill_estimator: tail threshold is zero (ties at 0)");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sum += std::log(std::abs(v[i]) / fit.threshold);
    if (v[i] > 0.0) {
      ++fit.n_positive;
    } else {
      ++fit.n_negative;
    }
  }
  if (!(sum > 0.0)) throw std::domain_error("hill_estimator: all tail values tie with the threshold");
  fit.alpha_hill = static_cast<double>(k) / sum;

  const double diff = static_cast<double>(fit.n_positive) - static_cast<double>(fit.n_negative);
  const double band = 2.0 * std::sqrt(static_cast<double>(k));
  fit.asymmetry_sign = diff > band ? TailSign::positive
                       : diff < -band ? TailSign::negative
                                      : TailSign::symmetric;
  return fit;
}

HillSweep hill_sweep(std::span<const double> values, std::span<const double> fractions) {
  static constexpr double kDefault[] = {0.001, 0.005, 0.01, 0.05};
  if (fractions.empty()) fractions = kDefault;
  const std::size_t n = values.size();
  HillSweep sweep;
  for (double f : fractions) {
    const auto k = static_cast<std::size_t>(std::llround(f * static_cast<double>(n)));
    if (k < 20 || k > n / 10) continue;
    sweep.fractions.push_back(f);
    sweep.fits.push_back(hill_estimator(values, k));
  }
  const auto k1 = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(0.01 * static_cast<double>(n))), 20, n / 10);
  sweep.verdict = hill_estimator(values, k1);
  sweep.heavy_tailed = sweep.verdict.alpha_hill <= 2.0;
  for (const auto& f : sweep.fits) sweep.heavy_tailed = sweep.heavy_tailed || f.alpha_hill <= 2.0;
  return sweep;
}

std::vector<double> block_increments(const PathSet& paths, std::int64_t block_length,
                                     std::size_t component) {
  if (component >= paths.dim) throw std::invalid_argument("block_increments: component out of range");
  if (paths.n_samples() < 2) throw std::invalid_argument("block_increments: need at least 2 samples");
  const std::int64_t spacing = paths.steps[1] - paths.steps[0];
  if (block_length <= 0 || block_length % spacing != 0) {
    throw std::invalid_argument("block_increments: block length " + std::to_string(block_length) +
                                " is not a multiple of the sample spacing " + std::to_string(spacing));
  }
  const auto m = static_cast<std::size_t>(block_length / spacing);
  std::vector<double> out;
  for (std::size_t i = 0; i < paths.n_paths; ++i) {
    for (std::size_t s = 0; s + m < paths.n_samples(); s += m) {
      out.push_back(paths.at(i, s + m, component) - paths.at(i, s, component));
    }
  }
  return out;
}

}  // namespace skewflow
