// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <span>
#include <vector>

namespace ecgrob::fft {

std::size_t next_pow2(std::size_t n);

// Real input zero-padded (or truncated) to n; returns bins 0..n/2.
std::vector<std::complex<double>> forward_real(std::span<const double> x, std::size_t n);

// Inverse of forward_real for a length-n signal (normalised by 1/n).
std::vector<double> inverse_real(std::span<const std::complex<double>> half_spectrum,
                                 std::size_t n);

// In-place inverse complex transform, normalised by 1/size.
void inverse_complex(std::span<std::complex<double>> data);

}  // namespace ecgrob::fft
