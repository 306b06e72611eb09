#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "skewflow/stats.hpp"

namespace skewflow {

double DriftEstimate::norm() const noexcept {
  double s = 0.0;
  for (double v : c) s += v * v;
  return std::sqrt(s);
}

double DriftEstimate::norm_stderr() const noexcept {
  double s = 0.0;
  for (double v : stderr_c) s += v * v;
  return std::sqrt(s);
}

bool DriftEstimate::significant() const noexcept { return norm() > 3.0 * norm_stderr(); }

DriftEstimate estimate_drift(const EnsembleResult& ensemble, bool exclude_flagged) {
  const std::size_t d = ensemble.config.dim;
  DriftEstimate out;
  out.c.assign(d, 0.0);
  out.stderr_c.assign(d, 0.0);
  std::vector<double> sum_sq(d, 0.0);
  for (const auto& r : ensemble.records) {
    if (r.size() == 0) continue;
    if (exclude_flagged && r.hit_exact_zero) {
      ++out.n_excluded;
      continue;
    }
    const std::int64_t n = r.steps.back();
    if (out.n_used == 0) out.n_final = n;
    if (n != out.n_final) throw std::invalid_argument("estimate_drift: records end at different steps");
    const auto p = r.position(r.size() - 1);
    for (std::size_t k = 0; k < d; ++k) {
      const double v = p[k] / static_cast<double>(n);
      out.c[k] += v;
      sum_sq[k] += v * v;
    }
    ++out.n_used;
  }
  if (out.n_used == 0) throw std::invalid_argument("estimate_drift: no usable trajectories");
  if (out.n_final < 1000) {
    throw std::invalid_argument("estimate_drift: needs at least 1000 recorded steps, got " +
                                std::to_string(out.n_final));
  }
  const double m = static_cast<double>(out.n_used);
  for (std::size_t k = 0; k < d; ++k) {
    out.c[k] /= m;
    if (out.n_used < 2) {
      out.stderr_c[k] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double var = std::max(0.0, (sum_sq[k] - m * out.c[k] * out.c[k]) / (m - 1.0));
    out.stderr_c[k] = std::sqrt(var / m);
  }
  return out;
}

std::vector<double> effective_drift(const DriftEstimate& drift, GroupType group) {
  if (drift_vanishes_by_symmetry(group) && !drift.significant()) {
    return std::vector<double>(drift.c.size(), 0.0);
  }
  return drift.c;
}

TrajectoryRecord detrend(const TrajectoryRecord& record, std::span<const double> c) {
  if (c.size() != record.dim) {
    throw std::invalid_argument("detrend: drift has " + std::to_string(c.size()) +
                                " components, path has " + std::to_string(record.dim));
  }
  TrajectoryRecord out = record;
  for (std::size_t s = 0; s < record.size(); ++s) {
    const double n = static_cast<double>(record.steps[s]);
    for (std::size_t k = 0; k < record.dim; ++k) out.p[s * record.dim + k] -= c[k] * n;
  }
  return out;
}

std::string_view to_string(Channel ch) noexcept {
  switch (ch) {
    case Channel::full: return "full";
    case Channel::component: return "component";
    case Channel::axis: return "axis";
    case Channel::transverse: return "transverse";
  }
  return "?";
}

PathSet extract_paths(const EnsembleResult& ensemble, std::span<const double> c, Channel channel,
                      std::size_t component, bool exclude_flagged) {
  const std::size_t d = ensemble.config.dim;
  if (c.size() != d) throw std::invalid_argument("extract_paths: drift dimension mismatch");
  if (channel == Channel::component && component >= d) {
    throw std::invalid_argument("extract_paths: component " + std::to_string(component) +
                                " out of range");
  }
  const bool needs_axis = channel == Channel::axis || channel == Channel::transverse;
  if (needs_axis && !ensemble.config.record_axis) {
    throw std::invalid_argument("extract_paths: run has no axis channel (record_axis = false)");
  }

  PathSet out;
  out.dim = channel == Channel::component ? 1 : d;
  for (const auto& r : ensemble.records) {
    if (exclude_flagged && r.hit_exact_zero) continue;
    if (out.n_paths == 0) out.steps = r.steps;
    ++out.n_paths;
    for (std::size_t s = 0; s < r.size(); ++s) {
      const double n = static_cast<double>(r.steps[s]);
      const auto p = r.position(s);
      switch (channel) {
        case Channel::full:
          for (std::size_t k = 0; k < d; ++k) out.values.push_back(p[k] - c[k] * n);
          break;
        case Channel::component:
          out.values.push_back(p[component] - c[component] * n);
          break;
        case Channel::axis: {
          const auto q = r.axis_part(s);
          out.values.insert(out.values.end(), q.begin(), q.end());
          break;
        }
        case Channel::transverse: {
          const auto q = r.axis_part(s);
          for (std::size_t k = 0; k < d; ++k) out.values.push_back(p[k] - c[k] * n - q[k]);
          break;
        }
      }
    }
  }
  return out;
}

PathSet rotate_paths(const PathSet& paths, std::span<const double> rotation) {
  const std::size_t d = paths.dim;
  if (rotation.size() != d * d) throw std::invalid_argument("rotate_paths: matrix size mismatch");
  PathSet out = paths;
  for (std::size_t i = 0; i < paths.n_paths; ++i) {
    for (std::size_t s = 0; s < paths.n_samples(); ++s) {
      for (std::size_t r = 0; r < d; ++r) {
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) acc += rotation[r * d + k] * paths.at(i, s, k);
        out.at(i, s, r) = acc;
      }
    }
  }
  return out;
}

}  // namespace skewflow
