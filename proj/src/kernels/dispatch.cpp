#include <stdexcept>
#include <string>

#include "dispatch.hpp"
#include "skewflow/simd.hpp"

namespace skewflow {

std::string_view to_string(Backend b) noexcept {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::avx512: return "avx512";
  }
  return "?";
}

bool backend_available(Backend b) noexcept {
  switch (b) {
    case Backend::scalar:
      return true;
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
    case Backend::avx2:
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    case Backend::avx512:
      return __builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx512dq");
#else
    default:
      return false;
#endif
  }
  return false;
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::scalar, Backend::avx2, Backend::avx512}) {
    if (backend_available(b)) out.push_back(b);
  }
  return out;
}

Backend best_backend() noexcept {
  if (backend_available(Backend::avx512)) return Backend::avx512;
  if (backend_available(Backend::avx2)) return Backend::avx2;
  return Backend::scalar;
}

int batch_lanes(Backend b) noexcept { return kernels::backend_table(b).batch_lanes; }

std::vector<double> evaluate(Backend b, VectorFunction fn, std::span<const double> in,
                             const PMParams& params) {
  if (!backend_available(b)) {
    throw std::invalid_argument("backend " + std::string(to_string(b)) + " is not available");
  }
  std::vector<double> out(in.size());
  if (in.empty()) return out;
  kernels::backend_table(b).eval(static_cast<kernels::MathFn>(fn), in.data(), out.data(),
                                 in.size(), params.gamma(), params.two_pow_gamma(),
                                 params.branch_at_half() == HalfBranch::left);
  return out;
}

namespace kernels {

const BackendTable& backend_table(Backend b) noexcept {
  switch (b) {
    case Backend::avx2: return avx2_backend();
    case Backend::avx512: return avx512_backend();
    case Backend::scalar: break;
  }
  return scalar_backend();
}

}  // namespace kernels
}  // namespace skewflow
