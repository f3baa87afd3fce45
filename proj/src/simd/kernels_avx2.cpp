// SPDX-License-Identifier: Apache-2.0
// AVX2 variants. This translation unit is built with -mavx2 (no -mfma) so
// that mul/add pairs round exactly like the scalar reference.
#include "ecgrob/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace ecgrob::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1,
                         _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_squares_avx2(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d x0 = _mm256_loadu_pd(a + i);
    const __m256d x1 = _mm256_loadu_pd(a + i + 4);
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(x0, x0));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(x1, x1));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

double squared_distance_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double out = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    out += d * d;
  }
  return out;
}

void scale_add_avx2(double* out, const double* base, double k, const double* noise,
                    std::size_t n) {
  const __m256d kv = _mm256_set1_pd(k);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d scaled = _mm256_mul_pd(kv, _mm256_loadu_pd(noise + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(base + i), scaled));
  }
  for (; i < n; ++i) out[i] = base[i] + k * noise[i];
}

void add_avx2(double* out, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void complex_mul_real_avx2(double* out, const double* in, const double* gain,
                           std::size_t bins) {
  std::size_t i = 0;
  for (; i + 2 <= bins; i += 2) {
    // gain (g0, g1) -> (g0, g0, g1, g1)
    const __m128d g = _mm_loadu_pd(gain + i);
    const __m256d gg = _mm256_permute4x64_pd(_mm256_castpd128_pd256(g), 0b01010000);
    _mm256_storeu_pd(out + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(in + 2 * i), gg));
  }
  for (; i < bins; ++i) {
    out[2 * i] = in[2 * i] * gain[i];
    out[2 * i + 1] = in[2 * i + 1] * gain[i];
  }
}

void complex_abs_avx2(double* out, const double* in, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d z0 = _mm256_loadu_pd(in + 2 * i);      // r0 i0 r1 i1
    const __m256d z1 = _mm256_loadu_pd(in + 2 * i + 4);  // r2 i2 r3 i3
    const __m256d sq0 = _mm256_mul_pd(z0, z0);
    const __m256d sq1 = _mm256_mul_pd(z1, z1);
    // hadd -> (s0, s2, s1, s3); restore order with a lane permute.
    const __m256d h = _mm256_hadd_pd(sq0, sq1);
    const __m256d ordered = _mm256_permute4x64_pd(h, 0b11011000);
    _mm256_storeu_pd(out + i, _mm256_sqrt_pd(ordered));
  }
  for (; i < n; ++i) {
    const double re = in[2 * i];
    const double im = in[2 * i + 1];
    out[i] = std::sqrt(re * re + im * im);
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{
      "avx2",         dot_avx2, sum_squares_avx2,      squared_distance_avx2,
      scale_add_avx2, add_avx2, complex_mul_real_avx2, complex_abs_avx2,
  };
  return table;
}

}  // namespace ecgrob::simd
