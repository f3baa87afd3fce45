// SPDX-License-Identifier: Apache-2.0
// Thin wrapper over FFTW. Plans are created once per (size, direction)
// under a lock (the FFTW planner is not thread-safe) with FFTW_UNALIGNED,
// so any std::vector buffer can be used with the new-array execute calls.
#include "ecgrob/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

#include "ecgrob/errors.hpp"

namespace ecgrob::fft {

namespace {

enum class PlanKind { r2c, c2r, c2c_backward };

std::mutex g_plan_mutex;
std::map<std::pair<PlanKind, std::size_t>, fftw_plan> g_plans;

fftw_plan plan_for(PlanKind kind, std::size_t n) {
  std::lock_guard lock(g_plan_mutex);
  const auto key = std::make_pair(kind, n);
  if (auto it = g_plans.find(key); it != g_plans.end()) return it->second;
  const int size = static_cast<int>(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::vector<double> real(n + 2);
  std::vector<std::complex<double>> cplx(n);
  auto* c = reinterpret_cast<fftw_complex*>(cplx.data());
  fftw_plan plan = nullptr;
  switch (kind) {
    case PlanKind::r2c: plan = fftw_plan_dft_r2c_1d(size, real.data(), c, flags); break;
    case PlanKind::c2r: plan = fftw_plan_dft_c2r_1d(size, c, real.data(), flags); break;
    case PlanKind::c2c_backward:
      plan = fftw_plan_dft_1d(size, c, c, FFTW_BACKWARD, flags);
      break;
  }
  if (!plan) throw Error(ErrorCode::InvalidArgument, "FFTW could not plan size " + std::to_string(n));
  g_plans.emplace(key, plan);
  return plan;
}

}  // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<std::complex<double>> forward_real(std::span<const double> x, std::size_t n) {
  if (n == 0) return {};
  std::vector<double> in(n, 0.0);
  std::copy_n(x.begin(), std::min(n, x.size()), in.begin());
  std::vector<std::complex<double>> out(n / 2 + 1);
  fftw_execute_dft_r2c(plan_for(PlanKind::r2c, n), in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> inverse_real(std::span<const std::complex<double>> half_spectrum,
                                 std::size_t n) {
  if (n == 0) return {};
  if (half_spectrum.size() != n / 2 + 1) {
    throw Error(ErrorCode::InvalidArgument, "half spectrum size mismatch");
  }
  // c2r destroys its input
  std::vector<std::complex<double>> in(half_spectrum.begin(), half_spectrum.end());
  std::vector<double> out(n);
  fftw_execute_dft_c2r(plan_for(PlanKind::c2r, n), reinterpret_cast<fftw_complex*>(in.data()),
                       out.data());
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : out) v *= scale;
  return out;
}

void inverse_complex(std::span<std::complex<double>> data) {
  if (data.empty()) return;
  auto* c = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan_for(PlanKind::c2c_backward, data.size()), c, c);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v *= scale;
}

}  // namespace ecgrob::fft
