#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "skewflow/observables.hpp"
#include "skewflow/pm_map.hpp"

namespace skewflow {

enum class GroupType { aniso, e2, e3, regular_even, regular_odd };

/// Which implementation advances the trajectories. The vector backends and
/// the portable scalar backend evaluate the same operation sequence and
/// produce bit-identical ensembles; `reference` iterates the plain steppers
/// (libm pow/sin/cos) and agrees with them only to rounding.
enum class KernelChoice { automatic, avx512, avx2, scalar, reference };

std::string_view to_string(GroupType g) noexcept;
std::string_view to_string(KernelChoice k) noexcept;
std::optional<GroupType> parse_group(std::string_view s) noexcept;
std::optional<KernelChoice> parse_kernel(std::string_view s) noexcept;

struct SimulationConfig {
  GroupType group = GroupType::aniso;
  std::size_t dim = 1;
  PMParams params{0.7};
  ObservableSpec spec;
  std::int64_t n_steps = 1'000'000;
  std::int64_t n_traj = 1000;
  std::int64_t burn_in = 10'000;
  std::int64_t record_stride = 1000;
  std::uint64_t base_seed = 1;
  /// Also record the shape coordinate x at each sample.
  bool record_x = false;
  /// E(3) only: also record the part of p accumulated along the current
  /// lab-frame rotation axis A_j omega(x_j) / |omega(x_j)|.
  bool record_axis = false;
  KernelChoice kernel = KernelChoice::automatic;

  friend bool operator==(const SimulationConfig&, const SimulationConfig&) = default;
};

/// Observables used when a config does not set them.
///
///   aniso:        phi(x) = (1 + x) in every component
///   e2:           v(x) = 1 + x (real), h = 1 rad/step
///   e3:           v(x) = (1 + x) e_1, omega(x) = n + 2x m with
///                 n = (1,1,1)/sqrt 3 and m = (1,-1,0)/sqrt 2
///   regular_even: v(x) = (1 + x) on the real part of each block, rates 1
///   regular_odd:  v(x) = (1 + x)(1, 1, 0, ...), rates 1
ObservableSpec default_observables(GroupType group, std::size_t dim);

/// Checks the invariants (positive counts, dimension matching the group,
/// observable sizes). Throws std::invalid_argument with a message naming
/// the offending field.
void validate(const SimulationConfig& config);

/// Number of samples per trajectory: floor(n_steps / record_stride) + 1.
std::int64_t samples_per_trajectory(const SimulationConfig& config) noexcept;

/// Chaotically driven Euclidean groups, where rotation averaging forces the
/// drift to zero.
bool drift_vanishes_by_symmetry(GroupType g) noexcept;

}  // namespace skewflow
