#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "skewflow/pm_map.hpp"

namespace skewflow {

/// Instruction-set backends for the trajectory kernels. All of them run the
/// same operation sequence per lane and give bit-identical results.
enum class Backend { scalar, avx2, avx512 };

std::string_view to_string(Backend b) noexcept;

/// True when the backend is compiled in and the CPU supports it.
bool backend_available(Backend b) noexcept;
std::vector<Backend> available_backends();
/// Widest available backend.
Backend best_backend() noexcept;
/// Trajectories advanced together by one kernel call.
int batch_lanes(Backend b) noexcept;

enum class VectorFunction { log, exp, pm_step, sin, cos, reduce_angle };

/// Elementwise evaluation of the kernels' internal math on `in`, for
/// accuracy and cross-backend tests. `params` is used by pm_step only.
/// Throws std::invalid_argument if the backend is unavailable.
std::vector<double> evaluate(Backend b, VectorFunction fn, std::span<const double> in,
                             const PMParams& params = PMParams{0.0});

}  // namespace skewflow
