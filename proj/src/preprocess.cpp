// SPDX-License-Identifier: Apache-2.0
#include "ecgrob/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "ecgrob/errors.hpp"
#include "ecgrob/iir.hpp"

namespace ecgrob {

void FilterSpec::validate(double fs) const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidSpec, what); };
  if (!(fs > 0.0)) fail("sampling rate must be positive");
  if (filter_order < 1) fail("filter order must be positive");
  if (!(highpass_hz > 0.0 && highpass_hz < lowpass_hz && lowpass_hz < fs / 2.0)) {
    fail("need 0 < highpass (" + std::to_string(highpass_hz) + ") < lowpass (" +
         std::to_string(lowpass_hz) + ") < fs/2 (" + std::to_string(fs / 2.0) + ")");
  }
  if (!(notch_low_hz > highpass_hz && notch_low_hz < notch_high_hz && notch_high_hz < lowpass_hz)) {
    fail("notch band must lie strictly inside the pass band");
  }
}

double isoline_level(std::span<const double> signal) {
  if (signal.empty()) throw Error(ErrorCode::EmptySignal, "isoline of an empty signal");
  const auto [lo_it, hi_it] = std::minmax_element(signal.begin(), signal.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) return lo;
  const double width = (hi - lo) / kIsolineBins;
  std::vector<std::size_t> counts(kIsolineBins, 0);
  for (double v : signal) {
    auto bin = static_cast<std::size_t>((v - lo) / width);
    counts[std::min(bin, kIsolineBins - 1)]++;
  }
  // first maximal bin on ties
  const auto mode = static_cast<std::size_t>(
      std::max_element(counts.begin(), counts.end()) - counts.begin());
  return lo + (static_cast<double>(mode) + 0.5) * width;
}

std::vector<double> isoline_correct(std::span<const double> signal, double /*fs*/) {
  const double level = isoline_level(signal);
  std::vector<double> out(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) out[i] = signal[i] - level;
  return out;
}

std::vector<double> running_median(std::span<const double> signal, std::size_t window) {
  const std::size_t n = signal.size();
  const std::size_t half = window / 2;
  std::vector<double> out(n);
  std::vector<double> sorted;
  sorted.reserve(window + 1);
  auto insert = [&](double v) { sorted.insert(std::upper_bound(sorted.begin(), sorted.end(), v), v); };
  auto erase = [&](double v) { sorted.erase(std::lower_bound(sorted.begin(), sorted.end(), v)); };

  for (std::size_t i = 0; i < std::min(n, half); ++i) insert(signal[i]);
  for (std::size_t i = 0; i < n; ++i) {
    if (i + half < n) insert(signal[i + half]);
    if (i > half) erase(signal[i - half - 1]);
    const std::size_t m = sorted.size();
    out[i] = (m % 2) ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  }
  return out;
}

std::vector<double> remove_baseline(std::span<const double> signal, double fs) {
  if (!(fs >= 10.0)) throw Error(ErrorCode::InvalidArgument, "baseline removal needs fs >= 10 Hz");
  if (static_cast<double>(signal.size()) < fs) {
    throw Error(ErrorCode::SignalTooShort, "baseline removal needs at least 1 s of samples");
  }
  auto odd_window = [fs](double seconds) {
    return 2 * static_cast<std::size_t>(std::floor(seconds * fs / 2.0)) + 1;
  };
  const auto first = running_median(signal, odd_window(0.2));
  const auto baseline = running_median(first, odd_window(0.6));
  std::vector<double> out(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) out[i] = signal[i] - baseline[i];
  return out;
}

namespace {

std::vector<double> apply(const iir::SosFilter& f, std::span<const double> x, bool zero_phase) {
  return zero_phase ? iir::filtfilt(f, x) : iir::sosfilt(f, x, x.empty() ? 0.0 : x.front());
}

}  // namespace

std::vector<double> lowpass(std::span<const double> signal, double fs, const FilterSpec& spec) {
  spec.validate(fs);
  return apply(iir::butterworth_lowpass(spec.filter_order, spec.lowpass_hz, fs), signal,
               spec.zero_phase);
}

std::vector<double> highpass(std::span<const double> signal, double fs, const FilterSpec& spec) {
  spec.validate(fs);
  return apply(iir::butterworth_highpass(spec.filter_order, spec.highpass_hz, fs), signal,
               spec.zero_phase);
}

std::vector<double> bandlimit(std::span<const double> signal, double fs, const FilterSpec& spec) {
  const auto low = lowpass(signal, fs, spec);
  return highpass(low, fs, spec);
}

std::vector<double> notch(std::span<const double> signal, double fs, const FilterSpec& spec) {
  spec.validate(fs);
  return apply(iir::butterworth_bandstop(spec.filter_order, spec.notch_low_hz, spec.notch_high_hz, fs),
               signal, spec.zero_phase);
}

std::vector<double> notch(std::span<const double> signal, double fs, double low_hz,
                          double high_hz) {
  if (!(low_hz > 0.0 && low_hz < high_hz && high_hz < fs / 2.0)) {
    throw Error(ErrorCode::InvalidSpec, "notch band must lie inside (0, fs/2)");
  }
  FilterSpec spec;
  return apply(iir::butterworth_bandstop(spec.filter_order, low_hz, high_hz, fs), signal,
               spec.zero_phase);
}

EcgRecord clean_pipeline(const EcgRecord& record, const FilterSpec& spec) {
  if (record.variant != Variant::raw) {
    throw Error(ErrorCode::VariantMismatch,
                "clean pipeline expects a raw record, got " + std::string(to_string(record.variant)),
                record.id);
  }
  try {
    spec.validate(record.fs);
  } catch (const Error& e) {
    throw e.with_context("validate", record.id);
  }
  EcgRecord out = record;
  out.variant = Variant::clean;
  for (auto& lead : out.leads) {
    auto stage = [&](const char* name, auto&& fn) {
      try {
        lead = fn(lead);
      } catch (const Error& e) {
        throw e.with_context(name, record.id);
      }
    };
    stage("isoline", [&](const auto& x) { return isoline_correct(x, record.fs); });
    stage("baseline", [&](const auto& x) { return remove_baseline(x, record.fs); });
    stage("lowpass", [&](const auto& x) { return lowpass(x, record.fs, spec); });
    stage("highpass", [&](const auto& x) { return highpass(x, record.fs, spec); });
    stage("notch", [&](const auto& x) { return notch(x, record.fs, spec); });
  }
  return out;
}

}  // namespace ecgrob
