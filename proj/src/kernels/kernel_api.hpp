#pragma once

// Backend-neutral description of a batch of trajectories. Plain data only:
// the ISA translation units must not instantiate standard containers inside
// their target regions, so the caller owns all storage.

#include <cstddef>
#include <cstdint>

namespace skewflow {
class DoublingOrbit;
}

namespace skewflow::kernels {

enum class PlanGroup { aniso, e2, e3 };

struct KernelPlan {
  PlanGroup group = PlanGroup::aniso;
  std::size_t dim = 1;
  double gamma = 0.0;
  double two_pow_gamma = 1.0;
  bool branch_left = false;
  /// gamma == 0: shape orbit comes from DoublingOrbit instead of the map.
  bool exact_doubling = false;
  /// Translation field a + b x: phi for aniso, body-frame v otherwise.
  const double* field_a = nullptr;
  const double* field_b = nullptr;
  /// Rotation generator a + b x: 1 component for e2, 3 for e3.
  const double* rot_a = nullptr;
  const double* rot_b = nullptr;
  std::int64_t n_steps = 0;
  std::int64_t burn_in = 0;
  std::int64_t stride = 1;
  std::int64_t renorm_interval = 1000;
  bool record_x = false;
  bool record_axis = false;
};

struct LaneIO {
  double x0 = 0.0;
  /// Required when plan.exact_doubling; positioned at x0.
  DoublingOrbit* orbit = nullptr;
  /// samples * dim values.
  double* p = nullptr;
  /// samples values when plan.record_x.
  double* x = nullptr;
  /// samples * 3 values when plan.record_axis.
  double* axis = nullptr;
  bool hit_exact_zero = false;
  /// E(3): max |A^T A - I| of the final rotation.
  double rotation_error = 0.0;
};

/// Runs up to batch_lanes() lanes; `count` may be smaller (the kernel pads
/// internally with copies of the last lane and discards their output).
using BatchFn = void (*)(const KernelPlan& plan, LaneIO* lanes, int count);

/// Elementwise kernels for testing the vector math.
enum class MathFn { log, exp, pm_step, sin, cos, reduce_angle };
using MathFnImpl = void (*)(MathFn fn, const double* in, double* out, std::size_t n, double gamma,
                            double two_pow_gamma, bool branch_left);

struct BackendTable {
  const char* name;
  int batch_lanes;
  BatchFn run_batch;
  MathFnImpl eval;
};

const BackendTable& scalar_backend() noexcept;
const BackendTable& avx2_backend() noexcept;
const BackendTable& avx512_backend() noexcept;

}  // namespace skewflow::kernels
