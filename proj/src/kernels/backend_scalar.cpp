// Portable one-lane backend. Same operation sequence as the vector
// backends, so its output is the bitwise reference for them.

#include <cstddef>
#include <cstdint>

#include "kernel_api.hpp"
#include "skewflow/seeding.hpp"
#include "vec_scalar.hpp"
#include "vmath.hpp"
#include "batch_kernel.hpp"

namespace skewflow::kernels {
namespace {

constexpr int kUnroll = 4;

void scalar_batch(const KernelPlan& plan, LaneIO* lanes, int count) {
  run_batch<scalar_isa::Vec, kUnroll>(plan, lanes, count);
}

void scalar_eval(MathFn fn, const double* in, double* out, std::size_t n, double gamma,
                 double two_pow_gamma, bool branch_left) {
  eval_math<scalar_isa::Vec>(fn, in, out, n, gamma, two_pow_gamma, branch_left);
}

}  // namespace

const BackendTable& scalar_backend() noexcept {
  static const BackendTable table{"scalar", scalar_isa::Vec::kLanes * kUnroll, scalar_batch,
                                  scalar_eval};
  return table;
}

}  // namespace skewflow::kernels
