// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "ecgrob/errors.hpp"
#include "ecgrob/iir.hpp"
#include "test_util.hpp"

using namespace ecgrob;

namespace {

// Analog Butterworth magnitudes evaluated on the bilinear-warped axis.
double warped(double f, double fs) { return 2.0 * fs * std::tan(std::numbers::pi * f / fs); }

double lowpass_gain(double f, double fc, double fs, int n) {
  return 1.0 / std::sqrt(1.0 + std::pow(warped(f, fs) / warped(fc, fs), 2 * n));
}
double highpass_gain(double f, double fc, double fs, int n) {
  return 1.0 / std::sqrt(1.0 + std::pow(warped(fc, fs) / warped(f, fs), 2 * n));
}
double bandstop_gain(double f, double lo, double hi, double fs, int n) {
  const double w = warped(f, fs), wl = warped(lo, fs), wh = warped(hi, fs);
  const double p = (wh - wl) * w / (wl * wh - w * w);
  return 1.0 / std::sqrt(1.0 + std::pow(p, 2 * n));
}

}  // namespace

TEST(Butterworth, LowpassMatchesAnalogMagnitude) {
  for (int order : {1, 2, 3, 4, 7}) {
    const auto f = iir::butterworth_lowpass(order, 150.0, 500.0);
    for (double hz : {0.0, 1.0, 10.0, 100.0, 150.0, 180.0, 200.0, 240.0}) {
      EXPECT_NEAR(std::abs(f.response(hz, 500.0)), lowpass_gain(hz, 150.0, 500.0, order), 1e-9)
          << "order " << order << " at " << hz;
    }
  }
}

TEST(Butterworth, HighpassMatchesAnalogMagnitude) {
  for (int order : {1, 2, 3, 5}) {
    const auto f = iir::butterworth_highpass(order, 0.05, 500.0);
    for (double hz : {0.01, 0.05, 0.2, 1.0, 100.0, 249.0}) {
      EXPECT_NEAR(std::abs(f.response(hz, 500.0)), highpass_gain(hz, 0.05, 500.0, order), 1e-9);
    }
  }
}

TEST(Butterworth, BandstopMatchesAnalogMagnitude) {
  for (int order : {1, 2, 3}) {
    const auto f = iir::butterworth_bandstop(order, 49.0, 51.0, 500.0);
    for (double hz : {0.0, 10.0, 45.0, 49.0, 49.9, 50.0, 50.5, 51.0, 60.0, 240.0}) {
      EXPECT_NEAR(std::abs(f.response(hz, 500.0)), bandstop_gain(hz, 49.0, 51.0, 500.0, order), 1e-7)
          << "order " << order << " at " << hz;
    }
  }
}

TEST(Butterworth, StableAndUnitPassband) {
  const auto lp = iir::butterworth_lowpass(3, 150.0, 500.0);
  const auto hp = iir::butterworth_highpass(3, 0.05, 500.0);
  const auto bs = iir::butterworth_bandstop(3, 49.0, 51.0, 500.0);
  EXPECT_LT(lp.max_pole_radius(), 1.0);
  EXPECT_LT(hp.max_pole_radius(), 1.0);
  EXPECT_LT(bs.max_pole_radius(), 1.0);
  EXPECT_NEAR(std::abs(lp.response(0.0, 500.0)), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(hp.response(250.0, 500.0)), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(bs.response(0.0, 500.0)), 1.0, 1e-12);
}

TEST(Butterworth, InvalidDesignsRejected) {
  EXPECT_THROW(iir::butterworth_lowpass(0, 10.0, 500.0), Error);
  EXPECT_THROW(iir::butterworth_lowpass(3, 250.0, 500.0), Error);
  EXPECT_THROW(iir::butterworth_highpass(3, 0.0, 500.0), Error);
  EXPECT_THROW(iir::butterworth_bandstop(3, 51.0, 49.0, 500.0), Error);
}

TEST(Sosfilt, ImpulseResponseSpectrumMatchesDesign) {
  const auto f = iir::butterworth_lowpass(3, 40.0, 500.0);
  std::vector<double> impulse(4096, 0.0);
  impulse[0] = 1.0;
  const auto h = iir::sosfilt(f, impulse, 0.0);
  for (double hz : {0.0, 20.0, 40.0, 80.0}) {
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < h.size(); ++n)
      acc += h[n] * std::polar(1.0, -testutil::kTwoPi * hz * static_cast<double>(n) / 500.0);
    EXPECT_NEAR(std::abs(acc - f.response(hz, 500.0)), 0.0, 1e-9);
  }
}

TEST(Sosfilt, SteadyStateInitialConditionsHoldAStep) {
  const auto f = iir::butterworth_lowpass(3, 20.0, 500.0);
  const std::vector<double> step(200, 2.5);
  const auto y = iir::sosfilt(f, step, 2.5);
  for (double v : y) EXPECT_NEAR(v, 2.5, 1e-12);
}

TEST(Filtfilt, SquaredMagnitudeAndZeroPhase) {
  const double fs = 500.0;
  const auto f = iir::butterworth_lowpass(3, 30.0, fs);
  const auto x = testutil::sine(25.0, fs, 10.0);
  const auto y = iir::filtfilt(f, x);
  ASSERT_EQ(y.size(), x.size());
  const double g = std::norm(f.response(25.0, fs));
  for (std::size_t i = 500; i < x.size() - 500; ++i) EXPECT_NEAR(y[i], g * x[i], 1e-9);
}

TEST(Filtfilt, PaddingCoversTheSlowestPole) {
  const auto notch = iir::butterworth_bandstop(3, 49.0, 51.0, 500.0);
  const std::size_t pad = iir::filtfilt_padding(notch, 100000);
  EXPECT_EQ(pad, 3 * std::max<std::size_t>(notch.effective_length(), 2 * notch.sections.size() + 1));
  EXPECT_EQ(iir::filtfilt_padding(notch, 50), 49u);
  // e-fold length of the slowest pole.
  const double r = notch.max_pole_radius();
  EXPECT_EQ(notch.effective_length(), static_cast<std::size_t>(std::ceil(-1.0 / std::log(r))));
}
