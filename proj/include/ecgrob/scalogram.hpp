// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "ecgrob/record.hpp"

namespace ecgrob {

struct MorseConfig {
  double gamma = 3.0;
  double beta = 20.0;
  int voices_per_octave = 16;
  double freq_min_hz = 0.5;
  std::optional<double> freq_max_hz;  // default 0.95 * fs / 2
  int lead = kDefaultLead;
  // When set, magnitudes are divided by this fixed value (clipped to 1)
  // instead of the per-image maximum.
  std::optional<double> fixed_magnitude_limit;

  double max_frequency(double fs) const { return freq_max_hz.value_or(0.95 * fs / 2.0); }
  // Throws InvalidBand / InvalidArgument.
  void validate(double fs) const;
};

// Peak (angular) frequency (beta / gamma)^(1 / gamma).
double morse_peak_frequency(double gamma, double beta);

// Psi(w) = 2 (e gamma / beta)^(beta / gamma) w^beta exp(-w^gamma) for w > 0,
// 0 otherwise; the value at the peak frequency is exactly 2.
std::vector<double> morse_wavelet_freq(double gamma, double beta, std::span<const double> omega);
double morse_wavelet_value(double gamma, double beta, double omega);

// Centre frequencies of the filter bank, highest first:
// f_j = freq_max * 2^(-j / voices), j = 0 .. floor(voices * log2(max / min)).
std::vector<double> cwt_frequencies(double fs, const MorseConfig& config);

struct CwtResult {
  std::vector<double> frequencies;  // per row, Hz, descending
  std::size_t samples = 0;
  std::vector<std::complex<double>> coefficients;  // row-major rows x samples

  std::complex<double> at(std::size_t row, std::size_t t) const {
    return coefficients[row * samples + t];
  }
  // |coefficients|, row-major.
  std::vector<double> magnitude() const;
};

// Frequency-domain CWT: each row is the inverse FFT of the zero-padded
// signal spectrum times the scaled analytic wavelet.
CwtResult cwt(std::span<const double> signal, double fs, const MorseConfig& config = {});

// |cwt| resampled to 150x150: area-averaged over time, linearly
// interpolated over scale, lowest frequency in the bottom row, normalised by
// the image maximum. Throws DegenerateImage for an all-zero magnitude.
TransformImage scalogram_from_magnitude(std::span<const double> magnitude, std::size_t rows,
                                        std::size_t samples, const MorseConfig& config = {});

TransformImage scalogram_image(const EcgRecord& record, const MorseConfig& config = {});

}  // namespace ecgrob
