// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ecgrob/record.hpp"

namespace ecgrob {

// Morphology and rhythm of one synthetic record. Amplitudes in mV, times in s,
// all given for lead II; lead I is a scaled copy and lead III = II - I.
struct SynthParams {
  double rr_mean_s = 0.85;
  double rr_cv = 0.02;  // realized exactly over the record's beats
  double r_amp = 1.0;
  double p_amp = 0.12;
  double t_amp = 0.3;
  double st_depression = 0.0;  // fraction of r_amp
  double fwave_amp = 0.0;
  double fwave_hz = 6.0;
  // Recording artefacts left for the cleaning stage.
  double drift_amp = 0.0;
  double hum_amp = 0.0;
  double white_sigma = 0.0;
};

inline constexpr double kSynthStDepression = 0.25;

// ST window relative to each R peak; the depression plateau covers it fully.
inline constexpr double kStWindowStart = 0.08;
inline constexpr double kStWindowEnd = 0.16;

// Class-conditional parameter draw. AF: no P wave, 92-120 bpm, RR CV 0.22,
// 4.5-8.5 Hz f-waves. STD: Normal draw plus a fixed ST depression.
SynthParams sample_params(Label label, std::uint64_t seed, bool artefacts = true);

// Renders leads I, II, III. `r_times` receives the R peak times (s) when set.
EcgRecord render_synthetic(const std::string& id, Label label, const SynthParams& params,
                           double fs, double duration_s, std::uint64_t seed,
                           std::vector<double>* r_times = nullptr);

// n_per_class records per class, ids "<label>_<nnnn>", variant raw.
// Throws InvalidArgument for n_per_class < 10, fs <= 0 or duration <= 0.
std::vector<EcgRecord> synth_corpus(std::size_t n_per_class, double fs, double duration_s,
                                    std::uint64_t seed, bool artefacts = true);

}  // namespace ecgrob
