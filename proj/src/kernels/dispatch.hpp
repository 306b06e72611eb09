#pragma once

#include "kernel_api.hpp"
#include "skewflow/simd.hpp"

namespace skewflow::kernels {

const BackendTable& backend_table(Backend b) noexcept;

}  // namespace skewflow::kernels
