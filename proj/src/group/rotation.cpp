#include "skewflow/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace skewflow {

Mat3 identity3() noexcept { return {1, 0, 0, 0, 1, 0, 0, 0, 1}; }

Mat3 multiply(const Mat3& a, const Mat3& b) noexcept {
  Mat3 c{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      c[3 * i + j] = a[3 * i] * b[j] + a[3 * i + 1] * b[3 + j] + a[3 * i + 2] * b[6 + j];
    }
  }
  return c;
}

Vec3 apply(const Mat3& m, const Vec3& v) noexcept {
  return {m[0] * v[0] + m[1] * v[1] + m[2] * v[2], m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
          m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
}

Mat3 transpose(const Mat3& m) noexcept {
  return {m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]};
}

double determinant(const Mat3& m) noexcept {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

double orthogonality_error(const Mat3& r) noexcept {
  const Mat3 g = multiply(transpose(r), r);
  const Mat3 id = identity3();
  double err = 0.0;
  for (int k = 0; k < 9; ++k) err = std::max(err, std::abs(g[k] - id[k]));
  return err;
}

Mat3 so3_exp(const Vec3& omega) noexcept {
  const double theta2 = omega[0] * omega[0] + omega[1] * omega[1] + omega[2] * omega[2];
  const double theta = std::sqrt(theta2);
  if (theta < 1e-30) return identity3();
  // exp([w]x) = I + (sin t / t) [w]x + ((1 - cos t) / t^2) [w]x^2, with the
  // half-angle forms sin t = 2 s c and 1 - cos t = 2 s^2 for accuracy.
  const double s = std::sin(0.5 * theta);
  const double c = std::cos(0.5 * theta);
  const double a = 2.0 * s * c / theta;
  const double b = 2.0 * s * s / theta2;
  const double wx = omega[0], wy = omega[1], wz = omega[2];
  return {1.0 + b * (wx * wx - theta2), -a * wz + b * wx * wy,          a * wy + b * wx * wz,
          a * wz + b * wy * wx,          1.0 + b * (wy * wy - theta2), -a * wx + b * wy * wz,
          -a * wy + b * wz * wx,         a * wx + b * wz * wy,          1.0 + b * (wz * wz - theta2)};
}

Mat3 renormalize_rotation(const Mat3& r) {
  for (int j = 0; j < 3; ++j) {
    const double n2 = r[j] * r[j] + r[3 + j] * r[3 + j] + r[6 + j] * r[6 + j];
    if (n2 < 1e-12) throw std::domain_error("renormalize_rotation: near-zero column");
  }
  if (!(orthogonality_error(r) < 1e-3)) {
    throw std::domain_error("renormalize_rotation: input too far from orthogonal");
  }
  if (!(determinant(r) > 0.0)) {
    throw std::domain_error("renormalize_rotation: determinant is not positive");
  }
  Mat3 q = r;
  for (int it = 0; it < 8 && orthogonality_error(q) > 1e-15; ++it) {
    const Mat3 g = multiply(transpose(q), q);
    Mat3 corr{};
    for (int k = 0; k < 9; ++k) corr[k] = -0.5 * g[k];
    corr[0] += 1.5;
    corr[4] += 1.5;
    corr[8] += 1.5;
    q = multiply(q, corr);
  }
  return q;
}

double reduce_angle(double theta) noexcept {
  double t = theta - kTwoPi * std::floor(theta * (1.0 / kTwoPi));
  if (t >= kTwoPi) t -= kTwoPi;
  if (t < 0.0) t += kTwoPi;
  return t;
}

}  // namespace skewflow
