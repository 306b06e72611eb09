#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "skewflow/stats.hpp"

namespace skewflow {

LaminarStats laminar_segments(std::span<const double> orbit, double x_c) {
  if (!(x_c > 0.0 && x_c < 0.5)) {
    throw std::invalid_argument("laminar_segments: x_c must lie in (0, 1/2)");
  }
  LaminarStats out;
  out.x_c = x_c;
  std::int64_t run = 0;
  for (double x : orbit) {
    if (x < x_c) {
      ++run;
    } else if (run > 0) {
      out.segment_lengths.push_back(run);
      run = 0;
    }
  }
  if (run > 0) out.segment_lengths.push_back(run);

  out.tail_index = std::numeric_limits<double>::quiet_NaN();
  const std::size_t n = out.segment_lengths.size();
  if (n >= 1000) {
    std::vector<double> lengths(out.segment_lengths.begin(), out.segment_lengths.end());
    const std::size_t k = std::max<std::size_t>(20, n / 100);
    out.tail_index = hill_estimator(lengths, k).alpha_hill;
    out.k_used = k;
  }
  return out;
}

std::vector<LoopExcursion> laminar_loop_excursions(const TrajectoryRecord& record, double x_c,
                                                   std::int64_t min_length) {
  if (record.x.size() != record.size()) {
    throw std::invalid_argument("laminar_loop_excursions: record has no x channel");
  }
  if (record.size() >= 2 && record.steps[1] - record.steps[0] != 1) {
    throw std::invalid_argument("laminar_loop_excursions: record stride must be 1");
  }
  const std::size_t d = record.dim;
  std::vector<LoopExcursion> out;
  std::size_t j = 0;
  const std::size_t n = record.size();
  while (j < n) {
    if (!(record.x[j] < x_c)) {
      ++j;
      continue;
    }
    const std::size_t start = j;
    while (j < n && record.x[j] < x_c) ++j;
    // Increments from steps start..j-1 are laminar; p(j) includes the last one.
    const std::size_t stop = j < n ? j : n - 1;
    LoopExcursion e;
    e.start = record.steps[start];
    e.length = static_cast<std::int64_t>(j - start);
    const auto p0 = record.position(start);
    for (std::size_t s = start; s <= stop; ++s) {
      const auto p = record.position(s);
      double r2 = 0.0;
      for (std::size_t k = 0; k < d; ++k) r2 += (p[k] - p0[k]) * (p[k] - p0[k]);
      e.max_radius = std::max(e.max_radius, std::sqrt(r2));
    }
    if (e.length >= min_length) out.push_back(e);
  }
  return out;
}

double discrete_loop_bound(double sup_v, double variation_v, double c0) {
  if (!(std::abs(c0) > 0.0)) throw std::domain_error("discrete_loop_bound: c0 must be nonzero");
  return (sup_v + variation_v) / std::abs(std::sin(0.5 * c0));
}

}  // namespace skewflow
