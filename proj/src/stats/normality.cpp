#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "skewflow/stats.hpp"

namespace skewflow {

double NormalityTest::max_ks() const noexcept {
  double m = 0.0;
  for (double k : ks) m = std::max(m, k);
  return m;
}

double ks_distance_normal(std::vector<double> sample) {
  const std::size_t n = sample.size();
  if (n < 2) throw std::invalid_argument("ks_distance_normal: needs at least 2 values");
  double mean = 0.0;
  for (double v : sample) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : sample) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw std::domain_error("ks_distance_normal: zero variance");
  std::sort(sample.begin(), sample.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = sample[i] / sd;
    const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
    d = std::max({d, static_cast<double>(i + 1) / static_cast<double>(n) - cdf,
                  cdf - static_cast<double>(i) / static_cast<double>(n)});
  }
  return d;
}

NormalityTest clt_normality(const PathSet& paths, std::int64_t step) {
  if (paths.n_paths < 300) {
    throw std::invalid_argument("clt_normality: needs at least 300 paths, got " +
                                std::to_string(paths.n_paths));
  }
  const auto it = std::lower_bound(paths.steps.begin(), paths.steps.end(), step);
  if (it == paths.steps.end() || *it != step || step <= 0) {
    throw std::invalid_argument("clt_normality: step " + std::to_string(step) + " is not recorded");
  }
  const auto s = static_cast<std::size_t>(it - paths.steps.begin());
  NormalityTest out;
  out.step = step;
  out.n = paths.n_paths;
  const double scale = 1.0 / std::sqrt(static_cast<double>(step));
  for (std::size_t k = 0; k < paths.dim; ++k) {
    std::vector<double> z(paths.n_paths);
    for (std::size_t i = 0; i < paths.n_paths; ++i) z[i] = paths.at(i, s, k) * scale;
    out.ks.push_back(ks_distance_normal(std::move(z)));
  }
  return out;
}

}  // namespace skewflow
