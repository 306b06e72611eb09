#pragma once

// Four-lane double vector on AVX2 + FMA. Include only from a translation
// unit region compiled for that target (see target_pragmas.hpp).

#include <immintrin.h>

namespace skewflow::kernels::avx2_isa {

struct Mask {
  __m256d m;
};

struct Vec {
  static constexpr int kLanes = 4;
  __m256d v;

  static Vec broadcast(double a) { return {_mm256_set1_pd(a)}; }
  static Vec load(const double* p) { return {_mm256_loadu_pd(p)}; }
  void store(double* p) const { _mm256_storeu_pd(p, v); }
};

inline Vec operator+(Vec a, Vec b) { return {_mm256_add_pd(a.v, b.v)}; }
inline Vec operator-(Vec a, Vec b) { return {_mm256_sub_pd(a.v, b.v)}; }
inline Vec operator*(Vec a, Vec b) { return {_mm256_mul_pd(a.v, b.v)}; }
inline Vec operator/(Vec a, Vec b) { return {_mm256_div_pd(a.v, b.v)}; }
inline Vec neg(Vec a) { return {_mm256_xor_pd(a.v, _mm256_set1_pd(-0.0))}; }
inline Vec fma(Vec a, Vec b, Vec c) { return {_mm256_fmadd_pd(a.v, b.v, c.v)}; }
inline Vec sqrt(Vec a) { return {_mm256_sqrt_pd(a.v)}; }
inline Vec floor(Vec a) { return {_mm256_floor_pd(a.v)}; }
inline Vec round_nearest(Vec a) {
  return {_mm256_round_pd(a.v, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC)};
}

inline Mask operator<(Vec a, Vec b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_LT_OQ)}; }
inline Mask operator<=(Vec a, Vec b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_LE_OQ)}; }
inline Mask operator>(Vec a, Vec b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_GT_OQ)}; }
inline Mask operator>=(Vec a, Vec b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_GE_OQ)}; }
inline Mask operator==(Vec a, Vec b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_EQ_OQ)}; }
inline Mask operator|(Mask a, Mask b) { return {_mm256_or_pd(a.m, b.m)}; }
inline Mask operator&(Mask a, Mask b) { return {_mm256_and_pd(a.m, b.m)}; }
inline Vec select(Mask m, Vec a, Vec b) { return {_mm256_blendv_pd(b.v, a.v, m.m)}; }

inline Vec exponent_field(Vec x) {
  // (bits >> 52) & 0x7FF, converted exactly via the 2^52 magic number.
  const __m256i bits = _mm256_castpd_si256(x.v);
  const __m256i field = _mm256_and_si256(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(0x7FF));
  const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
  return {_mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(field, magic)),
                        _mm256_set1_pd(0x1p52))};
}

inline Vec significand(Vec x) {
  const __m256i bits = _mm256_castpd_si256(x.v);
  const __m256i mant = _mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL));
  return {_mm256_castsi256_pd(_mm256_or_si256(mant, _mm256_set1_epi64x(0x3FF0000000000000LL)))};
}

inline Vec exp2_int(Vec n) {
  const __m256d biased = _mm256_add_pd(n.v, _mm256_set1_pd(0x1p52 + 1023.0));
  return {_mm256_castsi256_pd(_mm256_slli_epi64(_mm256_castpd_si256(biased), 52))};
}

}  // namespace skewflow::kernels::avx2_isa
