// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <span>
#include <vector>

namespace ecgrob::iir {

// Second-order section in transposed direct form II, a0 == 1.
// First-order sections carry b2 == a2 == 0.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  std::complex<double> response(std::complex<double> z) const;
};

struct SosFilter {
  std::vector<Biquad> sections;

  std::complex<double> response(double freq_hz, double fs) const;
  // Largest pole radius across sections (< 1 for a stable design).
  double max_pole_radius() const;
  // Samples per e-fold decay of the slowest pole.
  std::size_t effective_length() const;
};

// Butterworth designs via the analog prototype and the bilinear transform
// with frequency pre-warping. Each section is normalised to unit gain at
// the passband reference (DC, Nyquist, DC respectively).
SosFilter butterworth_lowpass(int order, double cutoff_hz, double fs);
SosFilter butterworth_highpass(int order, double cutoff_hz, double fs);
SosFilter butterworth_bandstop(int order, double low_hz, double high_hz, double fs);

// Single causal pass. `zi_scale` multiplies the steady-state initial state
// of a unit-step input (0 gives the rest state).
std::vector<double> sosfilt(const SosFilter& filter, std::span<const double> x, double zi_scale);

// Forward-backward (zero-phase) filtering with even reflection padding of
// min(n - 1, 3 * max(effective_length, 2 * sections + 1)) samples at each
// end. Each pass starts in the steady state of its input's mean; odd padding
// plus endpoint initialisation leaks a record that starts mid-wave into the
// whole output once the high-pass memory spans seconds.
// Output length == input length.
std::vector<double> filtfilt(const SosFilter& filter, std::span<const double> x);

std::size_t filtfilt_padding(const SosFilter& filter, std::size_t n);

}  // namespace ecgrob::iir
