// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "ecgrob/record.hpp"

namespace ecgrob {

// Single-channel noise waveform. `kind` is one of bw, em, ma, all.
struct NoiseSegment {
  std::vector<double> samples;
  double fs = 0.0;
  Variant kind = Variant::bw;

  double duration_s() const { return fs > 0 ? static_cast<double>(samples.size()) / fs : 0.0; }
};

// The three base noise types plus their pointwise sum.
class NoiseBank {
 public:
  // Throws InvalidArgument unless the segments share fs and length and are finite.
  NoiseBank(NoiseSegment bw, NoiseSegment em, NoiseSegment ma);

  const NoiseSegment& segment(Variant kind) const;
  double fs() const { return bw_.fs; }
  std::size_t length() const { return bw_.samples.size(); }
  double total_duration_s() const { return bw_.duration_s(); }

 private:
  NoiseSegment bw_, em_, ma_, all_;
};

struct SnrPolicy {
  double min_db = 5.0;
  double max_db = 10.0;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

// 10 log10(mean(s^2) / mean(n^2)). Throws LengthMismatch, ZeroNoisePower.
double compute_snr(std::span<const double> signal, std::span<const double> noise);

// k such that compute_snr(signal, k * noise) == target_db:
// k = sqrt(P_signal / (P_noise * 10^(target_db / 10))).
double scale_factor_for_snr(std::span<const double> signal, std::span<const double> noise,
                            double target_db);

struct NoiseOptions {
  int lead = kDefaultLead;          // lead the scaling factor is computed on
  bool per_lead_windows = false;    // draw an independent window per lead
};

struct NoisyRecords {
  // Indexed like kNoiseVariants: bw, em, ma, all.
  std::array<EcgRecord, 4> variants;
  std::vector<std::size_t> offsets;  // window offset per lead (one entry unless per-lead)
  double snr_db = 0.0;
  double scale = 0.0;

  const EcgRecord& get(Variant kind) const;
};

// Draws one window offset and one SNR from the record's RNG substream,
// derives k from the clean lead and the `all` window, and adds the same
// k-scaled window of every kind to every lead.
NoisyRecords apply_noise(const EcgRecord& record, const NoiseBank& bank, const SnrPolicy& policy,
                         const NoiseOptions& options = {});

// Synthetic stand-ins for recorded noise; unit RMS, deterministic per seed.
//   bw: three random-phase sinusoids in [0.05, 0.5] Hz
//   em: slow drift + decaying step discontinuities (Poisson, 0.2/s) +
//       1-10 Hz band-limited Gaussian noise
//   ma: 1-20 Hz band-limited Gaussian noise under a slow random envelope
//   all: bw + em + ma from the same seed
NoiseSegment synth_noise(Variant kind, double duration_s, double fs, std::uint64_t seed);

NoiseBank synth_noise_bank(double duration_s, double fs, std::uint64_t seed);

// Loads bw/em/ma single-channel signal files (bw.csv or bw.ecg, ...) from
// `dir`, resampling linearly to `target_fs` when their rate differs.
NoiseBank load_noise_bank(const std::filesystem::path& dir, double target_fs);

std::vector<double> resample_linear(std::span<const double> x, double from_fs, double to_fs);

// SNR of a raw record against its cleaned version on one lead; returns
// +infinity when raw == clean.
double snr_of_raw(const EcgRecord& raw, const EcgRecord& clean, int lead = kDefaultLead);

}  // namespace ecgrob
