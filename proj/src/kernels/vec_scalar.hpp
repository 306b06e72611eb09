#pragma once

// One-lane stand-in for the vector types. Every operation rounds exactly as
// the corresponding AVX2/AVX-512 instruction does (fma is single-rounded,
// nearbyint ties to even), so kernels instantiated with it reproduce the
// vector results bit for bit.

#include <bit>
#include <cmath>
#include <cstdint>

namespace skewflow::kernels::scalar_isa {

struct Mask {
  bool m;
};

struct Vec {
  static constexpr int kLanes = 1;
  double v;

  static Vec broadcast(double a) { return {a}; }
  static Vec load(const double* p) { return {*p}; }
  void store(double* p) const { *p = v; }
};

inline Vec operator+(Vec a, Vec b) { return {a.v + b.v}; }
inline Vec operator-(Vec a, Vec b) { return {a.v - b.v}; }
inline Vec operator*(Vec a, Vec b) { return {a.v * b.v}; }
inline Vec operator/(Vec a, Vec b) { return {a.v / b.v}; }
inline Vec neg(Vec a) { return {-a.v}; }
/// a * b + c, single rounding.
inline Vec fma(Vec a, Vec b, Vec c) { return {std::fma(a.v, b.v, c.v)}; }
inline Vec sqrt(Vec a) { return {std::sqrt(a.v)}; }
inline Vec floor(Vec a) { return {std::floor(a.v)}; }
inline Vec round_nearest(Vec a) { return {std::nearbyint(a.v)}; }

inline Mask operator<(Vec a, Vec b) { return {a.v < b.v}; }
inline Mask operator<=(Vec a, Vec b) { return {a.v <= b.v}; }
inline Mask operator>(Vec a, Vec b) { return {a.v > b.v}; }
inline Mask operator>=(Vec a, Vec b) { return {a.v >= b.v}; }
inline Mask operator==(Vec a, Vec b) { return {a.v == b.v}; }
inline Mask operator|(Mask a, Mask b) { return {a.m || b.m}; }
inline Mask operator&(Mask a, Mask b) { return {a.m && b.m}; }
/// m ? a : b
inline Vec select(Mask m, Vec a, Vec b) { return m.m ? a : b; }

/// Biased exponent field of x as an integer-valued double.
inline Vec exponent_field(Vec x) {
  return {static_cast<double>((std::bit_cast<std::uint64_t>(x.v) >> 52) & 0x7FF)};
}

/// x with its exponent replaced by that of 1.0: the significand in [1, 2).
inline Vec significand(Vec x) {
  const std::uint64_t u = std::bit_cast<std::uint64_t>(x.v);
  return {std::bit_cast<double>((u & 0x000FFFFFFFFFFFFFULL) | 0x3FF0000000000000ULL)};
}

/// 2^n for integer-valued n in [-1022, 1023].
inline Vec exp2_int(Vec n) {
  const auto biased = static_cast<std::uint64_t>(static_cast<std::int64_t>(n.v) + 1023);
  return {std::bit_cast<double>(biased << 52)};
}

}  // namespace skewflow::kernels::scalar_isa
