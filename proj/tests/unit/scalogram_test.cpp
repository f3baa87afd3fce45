// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "ecgrob/errors.hpp"
#include "ecgrob/scalogram.hpp"
#include "test_util.hpp"

using namespace ecgrob;
using testutil::sine;

namespace {

constexpr double kFs = 500.0;
const double kVoice = std::pow(2.0, 1.0 / 16.0);

std::vector<double> row_means(const CwtResult& r, std::size_t skip) {
  const auto m = r.magnitude();
  std::vector<double> out(r.frequencies.size(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t t = skip; t + skip < r.samples; ++t) out[i] += m[i * r.samples + t];
    out[i] /= static_cast<double>(r.samples - 2 * skip);
  }
  return out;
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Local maxima of the time-averaged magnitude over frequency.
std::vector<double> ridge_frequencies(const CwtResult& r) {
  const auto means = row_means(r, 1000);
  const double top = *std::max_element(means.begin(), means.end());
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < means.size(); ++i)
    if (means[i] > means[i - 1] && means[i] >= means[i + 1] && means[i] > 0.2 * top) out.push_back(r.frequencies[i]);
  return out;
}

}  // namespace

TEST(MorseWavelet, PeakZeroAndDecay) {
  const double wp = std::cbrt(20.0 / 3.0);
  EXPECT_DOUBLE_EQ(morse_peak_frequency(3.0, 20.0), wp);
  EXPECT_NEAR(morse_wavelet_value(3.0, 20.0, wp), 2.0, 1e-12);
  EXPECT_EQ(morse_wavelet_value(3.0, 20.0, 0.0), 0.0);
  EXPECT_LT(morse_wavelet_value(3.0, 20.0, 10.0 * wp), 1e-6 * 2.0);
  EXPECT_LT(morse_wavelet_value(3.0, 20.0, 0.99 * wp), 2.0);
  EXPECT_LT(morse_wavelet_value(3.0, 20.0, 1.01 * wp), 2.0);
  const std::vector<double> omega{0.0, wp, 2.0 * wp};
  const auto v = morse_wavelet_freq(3.0, 20.0, omega);
  EXPECT_EQ(v[0], 0.0);
  EXPECT_NEAR(v[1], 2.0, 1e-12);
}

TEST(Cwt, RowCountAndLadder) {
  const MorseConfig cfg;
  const auto f = cwt_frequencies(kFs, cfg);
  EXPECT_EQ(f.size(), static_cast<std::size_t>(std::floor(16.0 * std::log2(237.5 / 0.5))) + 1);
  EXPECT_EQ(f.size(), 143u);
  EXPECT_DOUBLE_EQ(f.front(), 237.5);
  for (std::size_t i = 1; i < f.size(); ++i) EXPECT_NEAR(f[i - 1] / f[i], kVoice, 1e-12);
  EXPECT_GE(f.back(), 0.5);
}

TEST(Cwt, ZeroSignal) {
  const auto r = cwt(std::vector<double>(1000, 0.0), kFs);
  for (const auto& c : r.coefficients) EXPECT_EQ(std::abs(c), 0.0);
}

TEST(Cwt, SingleAndTwoToneRidges) {
  for (double f0 : {2.0, 10.0, 40.0, 120.0}) {
    const auto r = cwt(sine(f0, kFs, 10.0), kFs);
    const double fr = r.frequencies[argmax(row_means(r, 1000))];
    EXPECT_LE(std::abs(std::log(fr / f0)), std::log(kVoice) + 1e-12) << f0;
  }
  auto x = sine(5.0, kFs, 10.0);
  const auto y = sine(40.0, kFs, 10.0);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
  const auto ridges = ridge_frequencies(cwt(x, kFs));
  ASSERT_EQ(ridges.size(), 2u);
  EXPECT_LE(std::abs(std::log(ridges[0] / 40.0)), std::log(kVoice) + 1e-12);
  EXPECT_LE(std::abs(std::log(ridges[1] / 5.0)), std::log(kVoice) + 1e-12);
}

TEST(Cwt, Linearity) {
  const auto x = testutil::gaussian_noise(2000, 1);
  const auto y = sine(13.0, kFs, 4.0);
  std::vector<double> mix(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) mix[i] = 1.5 * x[i] - 0.25 * y[i];
  const auto cx = cwt(x, kFs), cy = cwt(y, kFs), cm = cwt(mix, kFs);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < cm.coefficients.size(); ++i) {
    worst = std::max(worst, std::abs(cm.coefficients[i] - (1.5 * cx.coefficients[i] - 0.25 * cy.coefficients[i])));
    scale = std::max(scale, std::abs(cm.coefficients[i]));
  }
  EXPECT_LE(worst, 1e-9 * scale);
}

// The wavelet is analytic, so |W| of a real tone does not oscillate with phase.
TEST(Cwt, MagnitudeIndependentOfPhase) {
  const auto a = cwt(sine(10.0, kFs, 10.0, 1.0, 0.0), kFs);
  const auto b = cwt(sine(10.0, kFs, 10.0, 1.0, 1.1), kFs);
  const std::size_t row = argmax(row_means(a, 1000));
  for (std::size_t t = 1000; t + 1000 < a.samples; t += 37) {
    EXPECT_NEAR(std::abs(a.at(row, t)), std::abs(b.at(row, t)), 0.01 * std::abs(a.at(row, t)));
    EXPECT_NEAR(std::abs(a.at(row, t)), 1.0, 0.01);
  }
}

TEST(Cwt, TimeShiftCovariance) {
  const auto x = testutil::gaussian_noise(3000, 3);
  const std::size_t d = 40;
  std::vector<double> shifted(x.size(), 0.0);
  std::copy(x.begin(), x.end() - d, shifted.begin() + d);
  const auto a = cwt(x, kFs), b = cwt(shifted, kFs);
  // Rows whose wavelet fits in the 600-sample trim and stays below Nyquist.
  for (std::size_t row = 10; row <= 80; ++row) {
    for (std::size_t t = 600; t + 600 < a.samples; t += 11) {
      EXPECT_NEAR(std::abs(b.at(row, t + d)), std::abs(a.at(row, t)), 1e-6 * std::abs(a.at(row, t)) + 1e-12)
          << row << " " << t;
    }
  }
}

TEST(Cwt, InvalidBand) {
  MorseConfig cfg;
  cfg.freq_min_hz = 300.0;
  try {
    cwt(sine(10.0, kFs, 2.0), kFs, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidBand);
  }
}

// Share of intensity within +-3 voices of the ridge, against the same share
// of the analytic filter-bank response to a pure tone.
TEST(ScalogramImage, ToneBandShareMatchesWaveletResponse) {
  const double f0 = 10.0;
  const auto x = sine(f0, kFs, 10.0);
  const MorseConfig cfg;
  const auto freqs = cwt_frequencies(kFs, cfg);
  const double wp = morse_peak_frequency(cfg.gamma, cfg.beta);
  std::vector<double> response(freqs.size());
  for (std::size_t i = 0; i < freqs.size(); ++i) response[i] = morse_wavelet_value(cfg.gamma, cfg.beta, wp * f0 / freqs[i]);
  const auto share = [](const std::vector<double>& rows, std::size_t center, std::size_t half) {
    double in = 0.0;
    for (std::size_t i = center >= half ? center - half : 0; i <= std::min(center + half, rows.size() - 1); ++i) in += rows[i];
    return in / std::accumulate(rows.begin(), rows.end(), 0.0);
  };
  const double expected = share(response, argmax(response), 3);

  const auto means = row_means(cwt(x, kFs, cfg), 1000);
  EXPECT_NEAR(share(means, argmax(means), 3), expected, 0.01);

  // Image rows are a resampled scale axis, so the reference goes through the
  // same rasteriser; the full-length image also carries the edge transients.
  const auto image_rows = [](const TransformImage& im) {
    std::vector<double> rows(kImageSize, 0.0);
    for (std::size_t r = 0; r < kImageSize; ++r)
      for (std::size_t c = 0; c < kImageSize; ++c) rows[r] += im.at(r, c);
    return rows;
  };
  const std::size_t cols = 300;
  std::vector<double> ideal(freqs.size() * cols);
  for (std::size_t i = 0; i < freqs.size(); ++i)
    std::fill_n(ideal.begin() + static_cast<std::ptrdiff_t>(i * cols), cols, response[i]);
  const auto ideal_rows = image_rows(scalogram_from_magnitude(ideal, freqs.size(), cols, cfg));
  const double expected_image = share(ideal_rows, argmax(ideal_rows), 3);

  const auto img = scalogram_image(testutil::make_record("tone", {x, x}));
  const auto rows = image_rows(img);
  const std::size_t ridge = argmax(rows);
  EXPECT_EQ(ridge, argmax(ideal_rows));
  EXPECT_NEAR(share(rows, ridge, 3), expected_image, 0.05);
  // horizontal band: the ridge row is bright across the interior columns
  for (std::size_t c = 10; c + 10 < kImageSize; ++c) EXPECT_GT(img.at(ridge, c), 0.9);
  // low frequencies at the bottom: 10 Hz sits below the middle of a 0.5-237.5 Hz log axis
  EXPECT_GT(ridge, kImageSize / 2);
}

TEST(ScalogramImage, ScaleInvariantAndDegenerate) {
  const auto x = testutil::gaussian_noise(2500, 9);
  auto x2 = x;
  for (auto& v : x2) v *= 2.0;
  const auto a = scalogram_image(testutil::make_record("a", {x, x}));
  const auto b = scalogram_image(testutil::make_record("a", {x2, x2}));
  EXPECT_EQ(a.pixels, b.pixels);
  EXPECT_EQ(a.kind, ImageKind::scalogram);
  EXPECT_EQ(*std::max_element(a.pixels.begin(), a.pixels.end()), 1.0);
  for (double v : a.pixels) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  try {
    scalogram_image(testutil::make_record("zero", {std::vector<double>(2500, 0.0), std::vector<double>(2500, 0.0)}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateImage);
    EXPECT_EQ(e.record_id(), "zero");
  }
  try {
    scalogram_image(testutil::make_record("one", {x}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingLead);
  }
}

TEST(ScalogramImage, FixedLimitClips) {
  const auto x = sine(10.0, kFs, 4.0);
  MorseConfig cfg;
  cfg.fixed_magnitude_limit = 0.5;
  const auto img = scalogram_image(testutil::make_record("f", {x, x}), cfg);
  EXPECT_EQ(*std::max_element(img.pixels.begin(), img.pixels.end()), 1.0);
  cfg.fixed_magnitude_limit = 4.0;
  const auto dim = scalogram_image(testutil::make_record("f", {x, x}), cfg);
  EXPECT_LE(*std::max_element(dim.pixels.begin(), dim.pixels.end()), 0.26);
}
