#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "skewflow/config.hpp"

namespace skewflow {

/// Sampled path of one trajectory. Samples are taken at steps
/// 0, stride, 2 stride, ... and stored row-major.
struct TrajectoryRecord {
  std::int64_t index = 0;
  std::uint64_t seed = 0;
  double x0 = 0.0;
  std::size_t dim = 0;
  std::vector<std::int64_t> steps;
  /// steps.size() * dim values of p.
  std::vector<double> p;
  /// Shape coordinate at each sample, empty unless record_x.
  std::vector<double> x;
  /// E(3) axis channel (steps.size() * 3), empty unless record_axis.
  std::vector<double> axis;
  /// The orbit reached the absorbing point x = 0 in floating point.
  bool hit_exact_zero = false;
  /// E(3): max |A^T A - I| of the final rotation; 0 for other groups.
  double rotation_error = 0.0;

  std::size_t size() const noexcept { return steps.size(); }
  std::span<const double> position(std::size_t k) const noexcept {
    return {p.data() + k * dim, dim};
  }
  std::span<const double> axis_part(std::size_t k) const noexcept {
    return {axis.data() + k * 3, 3};
  }

  friend bool operator==(const TrajectoryRecord&, const TrajectoryRecord&) = default;
};

struct EnsembleResult {
  SimulationConfig config;
  std::vector<TrajectoryRecord> records;
  /// Backend that ran the trajectories ("avx512", "avx2", "scalar", "reference").
  std::string kernel;
  double wall_seconds = 0.0;
  std::int64_t total_steps = 0;
};

struct RunOptions {
  /// 0 selects std::thread::hardware_concurrency().
  unsigned workers = 0;
};

/// A single trajectory: samples x0 from derive_seed(base_seed, index), runs
/// burn_in shape-only steps, then n_steps of the configured skew product
/// from p = 0 and identity rotation.
TrajectoryRecord run_trajectory(const SimulationConfig& config, std::int64_t index);

/// All n_traj trajectories in index order. The output is a function of the
/// config alone: any worker count gives bit-identical records. Throws
/// std::runtime_error listing the failing indices if any trajectory fails.
EnsembleResult run_ensemble(const SimulationConfig& config, const RunOptions& options = {});

/// Closed-form position at continuous time t for the regular groups with the
/// shape frozen at x. Throws std::invalid_argument for other groups.
std::vector<double> regular_position(const SimulationConfig& config, double x, double t);

/// Name of the backend `choice` resolves to on this machine.
std::string resolve_kernel_name(KernelChoice choice);

}  // namespace skewflow
