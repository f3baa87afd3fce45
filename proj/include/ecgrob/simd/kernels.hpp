// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace ecgrob::simd {

// Inner loops shared by the filter, noise, transform and classifier code.
// Every table entry has a scalar reference and, where the CPU allows, a
// vectorized variant. Element-wise kernels are bit-identical across
// variants; reductions agree to rounding (partial sums are reassociated).
struct KernelTable {
  std::string_view name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_squares)(const double* a, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);

  // out[i] = base[i] + k * noise[i]
  void (*scale_add)(double* out, const double* base, double k, const double* noise,
                    std::size_t n);
  // out[i] = a[i] + b[i]
  void (*add)(double* out, const double* a, const double* b, std::size_t n);
  // Interleaved complex spectrum times a real gain per bin.
  void (*complex_mul_real)(double* out_interleaved, const double* in_interleaved,
                           const double* gain, std::size_t bins);
  // |z| for interleaved complex input.
  void (*complex_abs)(double* out, const double* in_interleaved, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not built or the CPU lacks the extension.
const KernelTable* avx2_kernels();

// Selected once: the widest supported variant, unless ECGROB_SIMD=scalar
// (or avx2) is set in the environment.
const KernelTable& active_kernels();

// Test hook: force a specific table for the rest of the process.
void override_kernels(const KernelTable* table);

// Convenience wrappers over active_kernels().
double dot(std::span<const double> a, std::span<const double> b);
double sum_squares(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);
void scale_add(std::span<double> out, std::span<const double> base, double k,
               std::span<const double> noise);
void add(std::span<double> out, std::span<const double> a, std::span<const double> b);

}  // namespace ecgrob::simd
