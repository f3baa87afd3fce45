// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string_view>

#include "ecgrob/simd/kernels.hpp"

namespace ecgrob::simd {

#if defined(ECGROB_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(ECGROB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& select_default() {
  const char* env = std::getenv("ECGROB_SIMD");
  const std::string_view want = env ? env : "";
  if (want == "scalar") return scalar_kernels();
  if (const KernelTable* t = avx2_kernels()) return *t;
  return scalar_kernels();
}

std::atomic<const KernelTable*> g_override{nullptr};

}  // namespace

const KernelTable* avx2_kernels() {
#if defined(ECGROB_HAVE_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  if (const KernelTable* t = g_override.load(std::memory_order_acquire)) return *t;
  static const KernelTable& chosen = select_default();
  return chosen;
}

void override_kernels(const KernelTable* table) {
  g_override.store(table, std::memory_order_release);
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active_kernels().dot(a.data(), b.data(), a.size());
}

double sum_squares(std::span<const double> a) {
  return active_kernels().sum_squares(a.data(), a.size());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active_kernels().squared_distance(a.data(), b.data(), a.size());
}

void scale_add(std::span<double> out, std::span<const double> base, double k,
               std::span<const double> noise) {
  assert(out.size() == base.size() && base.size() == noise.size());
  active_kernels().scale_add(out.data(), base.data(), k, noise.data(), out.size());
}

void add(std::span<double> out, std::span<const double> a, std::span<const double> b) {
  assert(out.size() == a.size() && a.size() == b.size());
  active_kernels().add(out.data(), a.data(), b.data(), out.size());
}

}  // namespace ecgrob::simd
