// SPDX-License-Identifier: Apache-2.0
#include "ecgrob/scalogram.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

#include "ecgrob/errors.hpp"
#include "ecgrob/fft.hpp"
#include "ecgrob/simd/kernels.hpp"

namespace ecgrob {

void MorseConfig::validate(double fs) const {
  if (!(gamma > 0.0) || !(beta > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "Morse gamma and beta must be positive");
  }
  if (voices_per_octave < 1) throw Error(ErrorCode::InvalidArgument, "voices per octave must be >= 1");
  const double fmax = max_frequency(fs);
  if (!(freq_min_hz > 0.0) || !(freq_min_hz < fmax) || !(fmax <= fs / 2.0)) {
    throw Error(ErrorCode::InvalidBand, "need 0 < freq_min < freq_max <= fs/2");
  }
  if (fixed_magnitude_limit && !(*fixed_magnitude_limit > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "fixed magnitude limit must be positive");
  }
}

double morse_peak_frequency(double gamma, double beta) { return std::pow(beta / gamma, 1.0 / gamma); }

double morse_wavelet_value(double gamma, double beta, double omega) {
  if (!(omega > 0.0)) return 0.0;
  // log domain: log 2 + (beta/gamma)(1 + log(gamma/beta)) + beta log w - w^gamma
  const double log_a = std::log(2.0) + (beta / gamma) * (1.0 + std::log(gamma / beta));
  return std::exp(log_a + beta * std::log(omega) - std::pow(omega, gamma));
}

std::vector<double> morse_wavelet_freq(double gamma, double beta, std::span<const double> omega) {
  std::vector<double> out(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) out[i] = morse_wavelet_value(gamma, beta, omega[i]);
  return out;
}

std::vector<double> cwt_frequencies(double fs, const MorseConfig& config) {
  config.validate(fs);
  const double fmax = config.max_frequency(fs);
  const double v = config.voices_per_octave;
  // small slack so an exact octave multiple is not lost to rounding
  const auto rows =
      static_cast<std::size_t>(std::floor(v * std::log2(fmax / config.freq_min_hz) + 1e-9)) + 1;
  std::vector<double> f(rows);
  for (std::size_t j = 0; j < rows; ++j) f[j] = fmax * std::exp2(-static_cast<double>(j) / v);
  return f;
}

namespace {

// Wavelet gains for every (row, bin) depend only on the transform geometry,
// so they are shared between records of equal padded length.
using GainKey = std::tuple<std::size_t, double, double, double, int, double, double>;

std::shared_ptr<const std::vector<double>> filter_bank_gains(std::size_t m, double fs,
                                                             const MorseConfig& config,
                                                             const std::vector<double>& freqs) {
  static std::mutex mutex;
  static std::map<GainKey, std::shared_ptr<const std::vector<double>>> cache;
  const GainKey key{m,  fs, config.gamma, config.beta, config.voices_per_octave,
                    config.freq_min_hz, config.max_frequency(fs)};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const std::size_t bins = m / 2 + 1;
  const double peak = morse_peak_frequency(config.gamma, config.beta);
  auto gains = std::make_shared<std::vector<double>>(freqs.size() * bins);
  for (std::size_t j = 0; j < freqs.size(); ++j) {
    // scale s puts the wavelet peak at f_j: s * 2 pi f_j = peak
    const double scale = peak / (2.0 * std::numbers::pi * freqs[j]);
    for (std::size_t k = 0; k < bins; ++k) {
      const double omega = 2.0 * std::numbers::pi * static_cast<double>(k) * fs / static_cast<double>(m);
      (*gains)[j * bins + k] = morse_wavelet_value(config.gamma, config.beta, scale * omega);
    }
  }
  std::lock_guard lock(mutex);
  if (cache.size() > 16) cache.clear();
  return cache.emplace(key, std::move(gains)).first->second;
}

}  // namespace

std::vector<double> CwtResult::magnitude() const {
  std::vector<double> out(coefficients.size());
  simd::active_kernels().complex_abs(out.data(), reinterpret_cast<const double*>(coefficients.data()),
                                     coefficients.size());
  return out;
}

CwtResult cwt(std::span<const double> signal, double fs, const MorseConfig& config) {
  if (signal.size() < 2) throw Error(ErrorCode::SignalTooShort, "cwt needs at least two samples");
  CwtResult out;
  out.frequencies = cwt_frequencies(fs, config);
  out.samples = signal.size();
  const std::size_t m = fft::next_pow2(signal.size());
  const std::size_t bins = m / 2 + 1;
  const auto spectrum = fft::forward_real(signal, m);

  const auto gains = filter_bank_gains(m, fs, config, out.frequencies);
  const auto& kernels = simd::active_kernels();
  out.coefficients.assign(out.frequencies.size() * out.samples, {});

  std::vector<std::complex<double>> row(m);
  for (std::size_t j = 0; j < out.frequencies.size(); ++j) {
    const double* gain = gains->data() + j * bins;
    std::fill(row.begin(), row.end(), std::complex<double>{});
    kernels.complex_mul_real(reinterpret_cast<double*>(row.data()),
                             reinterpret_cast<const double*>(spectrum.data()), gain, bins);
    fft::inverse_complex(row);
    std::copy_n(row.begin(), out.samples, out.coefficients.begin() + static_cast<std::ptrdiff_t>(j * out.samples));
  }
  return out;
}

TransformImage scalogram_from_magnitude(std::span<const double> magnitude, std::size_t rows,
                                        std::size_t samples, const MorseConfig& config) {
  if (rows == 0 || samples == 0 || magnitude.size() != rows * samples) {
    throw Error(ErrorCode::InvalidArgument, "magnitude matrix shape mismatch");
  }
  constexpr std::size_t G = kImageSize;

  // Time axis: area-average samples into G columns with fractional overlap.
  std::vector<double> cols(rows * G, 0.0);
  const double step = static_cast<double>(samples) / G;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* src = magnitude.data() + r * samples;
    for (std::size_t c = 0; c < G; ++c) {
      const double a = c * step;
      const double b = (c + 1) * step;
      double acc = 0.0;
      for (auto t = static_cast<std::size_t>(a); t < samples && static_cast<double>(t) < b; ++t) {
        const double overlap = std::min(b, t + 1.0) - std::max(a, static_cast<double>(t));
        if (overlap > 0.0) acc += overlap * src[t];
      }
      cols[r * G + c] = acc / step;
    }
  }

  // Scale axis: cwt row 0 is the highest frequency, as is image row 0.
  TransformImage img;
  img.kind = ImageKind::scalogram;
  for (std::size_t y = 0; y < G; ++y) {
    const double pos = rows == 1 ? 0.0 : static_cast<double>(y) * (rows - 1) / (G - 1);
    const auto r0 = std::min(static_cast<std::size_t>(pos), rows - 1);
    const std::size_t r1 = std::min(r0 + 1, rows - 1);
    const double frac = pos - r0;
    for (std::size_t c = 0; c < G; ++c) {
      img.at(y, c) = (1.0 - frac) * cols[r0 * G + c] + frac * cols[r1 * G + c];
    }
  }

  const double peak = *std::max_element(img.pixels.begin(), img.pixels.end());
  const double denom = config.fixed_magnitude_limit.value_or(peak);
  if (!(peak > 0.0)) throw Error(ErrorCode::DegenerateImage, "scalogram magnitude is identically zero");
  for (double& p : img.pixels) p = std::min(p / denom, 1.0);
  return img;
}

TransformImage scalogram_image(const EcgRecord& record, const MorseConfig& config) {
  const auto lead = select_lead(record, config.lead);
  TransformImage img;
  try {
    const CwtResult res = cwt(lead, record.fs, config);
    img = scalogram_from_magnitude(res.magnitude(), res.frequencies.size(), res.samples, config);
  } catch (const Error& e) {
    throw e.with_context("scalogram", record.id);
  }
  img.source_id = record.id;
  img.variant = record.variant;
  img.label = record.label;
  return img;
}

}  // namespace ecgrob
