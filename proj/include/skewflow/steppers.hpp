#pragma once

#include <optional>
#include <vector>

#include "skewflow/observables.hpp"
#include "skewflow/pm_map.hpp"
#include "skewflow/rotation.hpp"

namespace skewflow {

/// Shape coordinate, optional rotation, and translation of a skew product.
struct SkewProductState {
  double x = 0.0;
  std::optional<RotationState> rot;
  std::vector<double> p;

  friend bool operator==(const SkewProductState&, const SkewProductState&) = default;
};

// All steppers use the current x and the current rotation for the
// translation increment, then advance the rotation, then advance x, so that
// after n steps from p = 0 and identity rotation
//
//   anisotropic:  p(n) = sum_{j<n} phi(x_j)
//   E(2):         p(n) = sum_{j<n} e^{i theta_j} v(x_j),  theta_j = sum_{k<j} h(x_k)
//   E(3):         p(n) = sum_{j<n} A_j v(x_j),  A_{j+1} = A_j exp(omega(x_j))
//
// They throw std::invalid_argument on a dimension or rotation-type mismatch.

SkewProductState step_anisotropic(const SkewProductState& state, const PMParams& params,
                                  const ObservableSpec& spec);

SkewProductState step_e2(const SkewProductState& state, const PMParams& params,
                         const ObservableSpec& spec);

/// Re-orthonormalizes the rotation when its orthogonality error exceeds 1e-10.
SkewProductState step_e3(const SkewProductState& state, const PMParams& params,
                         const ObservableSpec& spec);

}  // namespace skewflow
