#pragma once

#include <array>
#include <variant>

namespace skewflow {

using Vec3 = std::array<double, 3>;
/// Row-major 3x3 matrix.
using Mat3 = std::array<double, 9>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

Mat3 identity3() noexcept;
Mat3 multiply(const Mat3& a, const Mat3& b) noexcept;
Vec3 apply(const Mat3& m, const Vec3& v) noexcept;
Mat3 transpose(const Mat3& m) noexcept;
double determinant(const Mat3& m) noexcept;
/// max_ij |(R^T R - I)_ij|
double orthogonality_error(const Mat3& r) noexcept;

/// Rotation by angle |omega| about omega / |omega| (Rodrigues). Identity for
/// |omega| < 1e-30.
Mat3 so3_exp(const Vec3& omega) noexcept;

/// Nearest rotation matrix to a slightly drifted one, by Bjorck iteration
/// R <- R (3I - R^T R) / 2 until the orthogonality error is below 1e-15.
/// Throws std::domain_error for a near-zero column, an input with
/// orthogonality error >= 1e-3, or det R <= 0.
Mat3 renormalize_rotation(const Mat3& r);

/// Reduces an angle into [0, 2 pi).
double reduce_angle(double theta) noexcept;

struct SO2 {
  double theta = 0.0;
  friend bool operator==(const SO2&, const SO2&) = default;
};

struct SO3 {
  Mat3 r = identity3();
  friend bool operator==(const SO3&, const SO3&) = default;
};

using RotationState = std::variant<SO2, SO3>;

}  // namespace skewflow
