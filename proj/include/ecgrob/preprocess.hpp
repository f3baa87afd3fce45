// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "ecgrob/record.hpp"

namespace ecgrob {

// Cleaning chain settings. Cut-offs in Hz; filters are Butterworth of
// `filter_order`, applied forward-backward when `zero_phase` is set.
struct FilterSpec {
  double lowpass_hz = 150.0;
  double highpass_hz = 0.05;
  double notch_low_hz = 49.0;
  double notch_high_hz = 51.0;
  int filter_order = 3;
  bool zero_phase = true;

  // Throws InvalidSpec unless 0 < highpass < lowpass < fs/2 and the notch
  // band lies strictly inside (highpass, lowpass).
  void validate(double fs) const;
};

inline constexpr std::size_t kIsolineBins = 100;

// Subtracts the centre of the modal bin of a 100-bin amplitude histogram.
// Throws EmptySignal.
std::vector<double> isoline_correct(std::span<const double> signal, double fs);

// Isoline estimate used by isoline_correct (exposed for tests).
double isoline_level(std::span<const double> signal);

// Subtracts a baseline estimated by cascaded 200 ms and 600 ms running
// medians. Requires fs >= 10 Hz and at least one second of samples.
std::vector<double> remove_baseline(std::span<const double> signal, double fs);

// Running median with an odd window, truncated at the edges.
std::vector<double> running_median(std::span<const double> signal, std::size_t window);

// Low-pass then high-pass.
std::vector<double> bandlimit(std::span<const double> signal, double fs, const FilterSpec& spec);
std::vector<double> lowpass(std::span<const double> signal, double fs, const FilterSpec& spec);
std::vector<double> highpass(std::span<const double> signal, double fs, const FilterSpec& spec);

std::vector<double> notch(std::span<const double> signal, double fs, const FilterSpec& spec);
std::vector<double> notch(std::span<const double> signal, double fs, double low_hz = 49.0,
                          double high_hz = 51.0);

// isoline -> baseline -> low-pass -> high-pass -> notch on every lead.
// Requires variant == raw; output variant is clean. Stage failures are
// rethrown with the stage name and record id attached.
EcgRecord clean_pipeline(const EcgRecord& record, const FilterSpec& spec = {});

}  // namespace ecgrob
