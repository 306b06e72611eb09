#include <cstddef>
#include <cstdint>

#include "kernel_api.hpp"
#include "skewflow/seeding.hpp"
#include "target_region.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

SKEWFLOW_TARGET_BEGIN("avx512f,avx512dq")

#include "vec_avx512.hpp"
#include "vmath.hpp"
#include "batch_kernel.hpp"

namespace skewflow::kernels {
namespace {

constexpr int kUnroll = 4;

void avx512_batch(const KernelPlan& plan, LaneIO* lanes, int count) {
  run_batch<avx512_isa::Vec, kUnroll>(plan, lanes, count);
}

void avx512_eval(MathFn fn, const double* in, double* out, std::size_t n, double gamma,
                 double two_pow_gamma, bool branch_left) {
  eval_math<avx512_isa::Vec>(fn, in, out, n, gamma, two_pow_gamma, branch_left);
}

}  // namespace
}  // namespace skewflow::kernels

SKEWFLOW_TARGET_END

namespace skewflow::kernels {

const BackendTable& avx512_backend() noexcept {
  static const BackendTable table{"avx512", avx512_isa::Vec::kLanes * kUnroll, avx512_batch, avx512_eval};
  return table;
}

}  // namespace skewflow::kernels

#else

namespace skewflow::kernels {

const BackendTable& avx512_backend() noexcept {
  static const BackendTable table{"avx512", 0, nullptr, nullptr};
  return table;
}

}  // namespace skewflow::kernels

#endif
