// SPDX-License-Identifier: Apache-2.0
#include "ecgrob/simd/kernels.hpp"

#include <cmath>

namespace ecgrob::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_squares_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void scale_add_scalar(double* out, const double* base, double k, const double* noise,
                      std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = base[i] + k * noise[i];
}

void add_scalar(double* out, const double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void complex_mul_real_scalar(double* out, const double* in, const double* gain,
                             std::size_t bins) {
  for (std::size_t i = 0; i < bins; ++i) {
    out[2 * i] = in[2 * i] * gain[i];
    out[2 * i + 1] = in[2 * i + 1] * gain[i];
  }
}

void complex_abs_scalar(double* out, const double* in, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = in[2 * i];
    const double im = in[2 * i + 1];
    out[i] = std::sqrt(re * re + im * im);
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      "scalar",          dot_scalar, sum_squares_scalar,      squared_distance_scalar,
      scale_add_scalar,  add_scalar, complex_mul_real_scalar, complex_abs_scalar,
  };
  return table;
}

}  // namespace ecgrob::simd
