#pragma once

// Elementary functions written once against the Vec interface shared by the
// ISA wrappers (vec_scalar.hpp, vec_avx2.hpp, vec_avx512.hpp). Every backend
// therefore executes the same sequence of correctly rounded operations.

namespace skewflow::kernels {

namespace consts {
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;  // 0x3FE62E42FEE00000
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;  // 0x3DEA39EF35793C76
inline constexpr double kLog2e = 1.44269504088896338700e+00;
inline constexpr double kSqrt2 = 1.41421356237309504880e+00;
inline constexpr double kTwoOverPi = 6.36619772367581382433e-01;
inline constexpr double kPio2_1 = 1.57079632673412561417e+00;  // first 33 bits of pi/2
inline constexpr double kPio2_2 = 6.07710050630396597660e-11;  // next 33 bits
inline constexpr double kPio2_3 = 2.02226624871116645580e-21;  // pi/2 - kPio2_1 - kPio2_2
inline constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace consts

/// Natural logarithm for finite x > 0 (x = 0 yields a large negative finite
/// value, which callers multiply away). About 1 ulp.
template <class V>
inline V vlog(V x) {
  using namespace consts;
  const auto tiny = x < V::broadcast(0x1p-1000);
  x = select(tiny, x * V::broadcast(0x1p200), x);
  V e = exponent_field(x) - V::broadcast(1023.0);
  e = select(tiny, e - V::broadcast(200.0), e);
  V m = significand(x);
  const auto high = m > V::broadcast(kSqrt2);
  m = select(high, m * V::broadcast(0.5), m);
  e = select(high, e + V::broadcast(1.0), e);

  // log m = 2 atanh(s) = 2s (1 + z/3 + z^2/5 + ...), s = (m-1)/(m+1), z = s^2 <= 0.0295
  const V s = (m - V::broadcast(1.0)) / (m + V::broadcast(1.0));
  const V z = s * s;
  V q = V::broadcast(1.0 / 21.0);
  q = fma(q, z, V::broadcast(1.0 / 19.0));
  q = fma(q, z, V::broadcast(1.0 / 17.0));
  q = fma(q, z, V::broadcast(1.0 / 15.0));
  q = fma(q, z, V::broadcast(1.0 / 13.0));
  q = fma(q, z, V::broadcast(1.0 / 11.0));
  q = fma(q, z, V::broadcast(1.0 / 9.0));
  q = fma(q, z, V::broadcast(1.0 / 7.0));
  q = fma(q, z, V::broadcast(1.0 / 5.0));
  q = fma(q, z, V::broadcast(1.0 / 3.0));
  const V two_s = s + s;
  const V tail = fma(two_s * z, q, e * V::broadcast(kLn2Lo));
  return fma(e, V::broadcast(kLn2Hi), two_s + tail);
}

/// e^y for y < 709; flushes to 0 below 2^-1022.
template <class V>
inline V vexp(V y) {
  using namespace consts;
  const V n = round_nearest(y * V::broadcast(kLog2e));
  V r = fma(neg(n), V::broadcast(kLn2Hi), y);
  r = fma(neg(n), V::broadcast(kLn2Lo), r);
  // Taylor polynomial through r^13 on |r| <= 0.347
  V p = V::broadcast(1.0 / 6227020800.0);
  p = fma(p, r, V::broadcast(1.0 / 479001600.0));
  p = fma(p, r, V::broadcast(1.0 / 39916800.0));
  p = fma(p, r, V::broadcast(1.0 / 3628800.0));
  p = fma(p, r, V::broadcast(1.0 / 362880.0));
  p = fma(p, r, V::broadcast(1.0 / 40320.0));
  p = fma(p, r, V::broadcast(1.0 / 5040.0));
  p = fma(p, r, V::broadcast(1.0 / 720.0));
  p = fma(p, r, V::broadcast(1.0 / 120.0));
  p = fma(p, r, V::broadcast(1.0 / 24.0));
  p = fma(p, r, V::broadcast(1.0 / 6.0));
  p = fma(p, r, V::broadcast(0.5));
  p = fma(p, r, V::broadcast(1.0));
  p = fma(p, r, V::broadcast(1.0));
  const auto underflow = n < V::broadcast(-1022.0);
  const V safe_n = select(underflow, V::broadcast(0.0), n);
  return select(underflow, V::broadcast(0.0), p * exp2_int(safe_n));
}

/// One step of the intermittency map. `two_pow_gamma` is 2^gamma evaluated
/// once by the caller.
template <class V>
inline V vpm_step(V x, V gamma, V two_pow_gamma, bool branch_left) {
  const V xg = vexp(gamma * vlog(x));
  const V left = fma(x, two_pow_gamma * xg, x);
  const V right = (x + x) - V::broadcast(1.0);
  const V half = V::broadcast(0.5);
  if (branch_left) {
    const V out = select(x > half, right, left);
    return select(x == half, V::broadcast(1.0), out);
  }
  return select(x >= half, right, left);
}

/// sin and cos for |theta| below about 1e5.
template <class V>
inline void vsincos(V theta, V& sin_out, V& cos_out) {
  using namespace consts;
  const V k = round_nearest(theta * V::broadcast(kTwoOverPi));
  V r = fma(neg(k), V::broadcast(kPio2_1), theta);
  r = fma(neg(k), V::broadcast(kPio2_2), r);
  r = fma(neg(k), V::broadcast(kPio2_3), r);
  const V z = r * r;

  // sin r = r + r z S(z), Taylor through r^17
  V sp = V::broadcast(-1.0 / 355687428096000.0);
  sp = fma(sp, z, V::broadcast(1.0 / 1307674368000.0));
  sp = fma(sp, z, V::broadcast(-1.0 / 6227020800.0));
  sp = fma(sp, z, V::broadcast(1.0 / 39916800.0));
  sp = fma(sp, z, V::broadcast(-1.0 / 362880.0));
  sp = fma(sp, z, V::broadcast(1.0 / 5040.0));
  sp = fma(sp, z, V::broadcast(-1.0 / 120.0));
  sp = fma(sp, z, V::broadcast(1.0 / 6.0));
  const V sin_r = fma(neg(r * z), sp, r);

  // cos r = 1 + z C(z), Taylor through r^16
  V cp = V::broadcast(1.0 / 20922789888000.0);
  cp = fma(cp, z, V::broadcast(-1.0 / 87178291200.0));
  cp = fma(cp, z, V::broadcast(1.0 / 479001600.0));
  cp = fma(cp, z, V::broadcast(-1.0 / 3628800.0));
  cp = fma(cp, z, V::broadcast(1.0 / 40320.0));
  cp = fma(cp, z, V::broadcast(-1.0 / 720.0));
  cp = fma(cp, z, V::broadcast(1.0 / 24.0));
  cp = fma(cp, z, V::broadcast(-0.5));
  const V cos_r = fma(z, cp, V::broadcast(1.0));

  const V quadrant = k - V::broadcast(4.0) * floor(k * V::broadcast(0.25));
  const auto q1 = quadrant == V::broadcast(1.0);
  const auto q2 = quadrant == V::broadcast(2.0);
  const auto q3 = quadrant == V::broadcast(3.0);
  const auto swap = q1 | q3;
  const V s = select(swap, cos_r, sin_r);
  const V c = select(swap, sin_r, cos_r);
  sin_out = select(q2 | q3, neg(s), s);
  cos_out = select(q1 | q2, neg(c), c);
}

/// theta reduced into [0, 2 pi), same operation sequence as reduce_angle().
template <class V>
inline V vreduce_angle(V theta) {
  using namespace consts;
  const V two_pi = V::broadcast(kTwoPi);
  V t = theta - two_pi * floor(theta * V::broadcast(1.0 / kTwoPi));
  t = select(t >= two_pi, t - two_pi, t);
  return select(t < V::broadcast(0.0), t + two_pi, t);
}

}  // namespace skewflow::kernels
