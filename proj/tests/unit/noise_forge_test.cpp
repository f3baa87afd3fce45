// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <limits>

#include "ecgrob/errors.hpp"
#include "ecgrob/noise_forge.hpp"
#include "ecgrob/signal_io.hpp"
#include "ecgrob/synth.hpp"
#include "test_util.hpp"

using namespace ecgrob;
using testutil::sine;

namespace {

constexpr double kFs = 500.0;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no ecgrob::Error thrown";
  return ErrorCode::InvalidArgument;
}

// Hann-windowed periodogram by direct DFT; returns the fraction of power
// (excluding DC) with frequency in [lo, hi].
double band_power_fraction(const std::vector<double>& x, double fs, double lo, double hi) {
  const std::size_t n = x.size();
  std::vector<double> w(n);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hann = 0.5 - 0.5 * std::cos(testutil::kTwoPi * static_cast<double>(i) / static_cast<double>(n));
    w[i] = (x[i] - mean) * hann;
  }
  double in = 0.0, total = 0.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    const double step = -testutil::kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * std::polar(1.0, step * static_cast<double>(i));
    const double p = std::norm(acc);
    const double f = static_cast<double>(k) * fs / static_cast<double>(n);
    total += p;
    if (f >= lo && f <= hi) in += p;
  }
  return in / total;
}

EcgRecord clean_fixture(const std::string& id, Label label = Label::Normal) {
  auto r = render_synthetic(id, label, sample_params(label, stable_hash(id), false), kFs, 10.0, 3);
  r.variant = Variant::clean;
  return r;
}

}  // namespace

TEST(Snr, Examples) {
  const auto s = testutil::gaussian_noise(1000, 1);
  EXPECT_EQ(compute_snr(s, s), 0.0);
  EXPECT_NEAR(compute_snr(sine(5.0, kFs, 10.0), sine(7.0, kFs, 10.0)), 0.0, 1e-9);
  auto quiet = s;
  for (auto& v : quiet) v /= std::sqrt(10.0);
  EXPECT_NEAR(compute_snr(s, quiet), 10.0, 1e-9);
}

TEST(Snr, Errors) {
  EXPECT_EQ(code_of([] { compute_snr(std::vector<double>(3, 1.0), std::vector<double>(4, 1.0)); }),
            ErrorCode::LengthMismatch);
  EXPECT_EQ(code_of([] { compute_snr(std::vector<double>(3, 1.0), std::vector<double>(3, 0.0)); }),
            ErrorCode::ZeroNoisePower);
  EXPECT_EQ(code_of([] { scale_factor_for_snr(std::vector<double>(3, 0.0), std::vector<double>(3, 1.0), 5.0); }),
            ErrorCode::ZeroSignalPower);
}

TEST(ScaleFactor, ClosedFormExamples) {
  const auto a = sine(5.0, kFs, 10.0);
  const auto b = sine(9.0, kFs, 10.0);
  EXPECT_NEAR(scale_factor_for_snr(a, b, 0.0), 1.0, 1e-12);
  EXPECT_NEAR(scale_factor_for_snr(a, b, 10.0), std::pow(10.0, -0.5), 1e-12);
}

TEST(ScaleFactor, HitsTargetScalesAndDecreases) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> target(5.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = testutil::gaussian_noise(100 + trial * 7, 100 + trial, 0.3 + trial * 0.01);
    const auto n = testutil::gaussian_noise(s.size(), 900 + trial, 2.0);
    const double db = target(rng);
    const double k = scale_factor_for_snr(s, n, db);
    std::vector<double> scaled(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) scaled[i] = k * n[i];
    ASSERT_NEAR(compute_snr(s, scaled), db, 1e-9);

    auto s3 = s;
    for (auto& v : s3) v *= 3.0;
    EXPECT_NEAR(scale_factor_for_snr(s3, n, db), 3.0 * k, 1e-12 * k);
    EXPECT_LT(scale_factor_for_snr(s, n, db + 0.5), k);
  }
}

TEST(NoiseBank, AllIsThePointwiseSum) {
  const auto bank = synth_noise_bank(20.0, kFs, 5);
  const auto& bw = bank.segment(Variant::bw).samples;
  const auto& em = bank.segment(Variant::em).samples;
  const auto& ma = bank.segment(Variant::ma).samples;
  const auto& all = bank.segment(Variant::all).samples;
  ASSERT_EQ(all.size(), bw.size());
  for (std::size_t i = 0; i < all.size(); ++i) ASSERT_EQ(all[i], (bw[i] + em[i]) + ma[i]);
  EXPECT_EQ(bank.total_duration_s(), 20.0);
  EXPECT_EQ(code_of([] {
              NoiseBank({std::vector<double>(10, 1.0), kFs, Variant::bw},
                        {std::vector<double>(11, 1.0), kFs, Variant::em},
                        {std::vector<double>(10, 1.0), kFs, Variant::ma});
            }),
            ErrorCode::InvalidArgument);
}

TEST(ApplyNoise, SharedWindowAndScale) {
  const auto bank = synth_noise_bank(120.0, kFs, 21);
  const SnrPolicy policy{5.0, 10.0, 77};
  for (int r = 0; r < 6; ++r) {
    const auto rec = clean_fixture("rec" + std::to_string(r), kAllLabels[r % 3]);
    const auto out = apply_noise(rec, bank, policy);
    EXPECT_GE(out.snr_db, 5.0);
    EXPECT_LE(out.snr_db, 10.0);
    ASSERT_EQ(out.offsets.size(), 1u);
    const std::size_t off = out.offsets[0];
    const auto& all = out.get(Variant::all);
    EXPECT_EQ(all.variant, Variant::all);
    EXPECT_EQ(all.label, rec.label);

    const auto window = [&](Variant v) {
      return std::span<const double>(bank.segment(v).samples).subspan(off, rec.sample_count());
    };
    std::vector<double> scaled_all(rec.sample_count());
    for (std::size_t i = 0; i < scaled_all.size(); ++i) scaled_all[i] = out.scale * window(Variant::all)[i];
    EXPECT_NEAR(compute_snr(rec.leads[1], scaled_all), out.snr_db, 1e-9);

    std::vector<double> added(rec.sample_count());
    for (std::size_t i = 0; i < added.size(); ++i) added[i] = all.leads[1][i] - rec.leads[1][i];
    EXPECT_NEAR(compute_snr(rec.leads[1], added), out.snr_db, 1e-9);

    for (std::size_t l = 0; l < rec.lead_count(); ++l) {
      for (std::size_t i = 0; i < rec.sample_count(); ++i) {
        const double c = rec.leads[l][i];
        const double b = window(Variant::bw)[i], e = window(Variant::em)[i], m = window(Variant::ma)[i];
        ASSERT_EQ(all.leads[l][i], c + out.scale * ((b + e) + m));
        ASSERT_EQ(out.get(Variant::bw).leads[l][i], c + out.scale * b);
        ASSERT_EQ(out.get(Variant::em).leads[l][i], c + out.scale * e);
        ASSERT_EQ(out.get(Variant::ma).leads[l][i], c + out.scale * m);
        ASSERT_NEAR(all.leads[l][i] - c - out.scale * (b + e + m), 0.0, 1e-12);
      }
    }
  }
}

TEST(ApplyNoise, DeterministicPerSeedAndId) {
  const auto bank = synth_noise_bank(60.0, kFs, 4);
  const auto rec = clean_fixture("abc");
  const auto a = apply_noise(rec, bank, {5.0, 10.0, 9});
  const auto b = apply_noise(rec, bank, {5.0, 10.0, 9});
  EXPECT_EQ(a.get(Variant::all).leads, b.get(Variant::all).leads);
  EXPECT_EQ(a.snr_db, b.snr_db);
  const auto c = apply_noise(rec, bank, {5.0, 10.0, 10});
  EXPECT_NE(a.snr_db, c.snr_db);
  auto renamed = rec;
  renamed.id = "abd";
  EXPECT_NE(apply_noise(renamed, bank, {5.0, 10.0, 9}).offsets, a.offsets);
}

TEST(ApplyNoise, PerLeadWindows) {
  const auto bank = synth_noise_bank(60.0, kFs, 4);
  const auto rec = clean_fixture("multi");
  NoiseOptions opts;
  opts.per_lead_windows = true;
  const auto out = apply_noise(rec, bank, {5.0, 10.0, 1}, opts);
  EXPECT_EQ(out.offsets.size(), rec.lead_count());
}

TEST(ApplyNoise, Errors) {
  const auto bank = synth_noise_bank(60.0, kFs, 4);
  auto raw = clean_fixture("r");
  raw.variant = Variant::raw;
  EXPECT_EQ(code_of([&] { apply_noise(raw, bank, {}); }), ErrorCode::VariantMismatch);

  const auto small = synth_noise_bank(5.0, kFs, 4);
  EXPECT_EQ(code_of([&] { apply_noise(clean_fixture("s"), small, {}); }), ErrorCode::BankTooShort);

  const NoiseBank silent({std::vector<double>(6000, 0.0), kFs, Variant::bw},
                         {std::vector<double>(6000, 0.0), kFs, Variant::em},
                         {std::vector<double>(6000, 0.0), kFs, Variant::ma});
  EXPECT_EQ(code_of([&] { apply_noise(clean_fixture("z"), silent, {}); }), ErrorCode::ZeroNoisePower);
  EXPECT_EQ(code_of([&] { apply_noise(clean_fixture("p"), bank, {10.0, 5.0, 0}); }),
            ErrorCode::InvalidArgument);
}

TEST(SynthNoise, BaselineWanderIsBelowOneHertz) {
  const auto bw = synth_noise(Variant::bw, 10.0, kFs, 31);
  EXPECT_GT(band_power_fraction(bw.samples, kFs, 0.0, 1.0), 0.99);
  EXPECT_NEAR(testutil::rms(bw.samples), 1.0, 1e-12);
}

TEST(SynthNoise, MotionArtefactIsInBand) {
  const auto ma = synth_noise(Variant::ma, 10.0, kFs, 32);
  EXPECT_GT(band_power_fraction(ma.samples, kFs, 1.0, 20.0), 0.95);
  EXPECT_NEAR(testutil::rms(ma.samples), 1.0, 1e-12);
}

TEST(SynthNoise, ElectrodeMotionHasUnitRms) {
  const auto em = synth_noise(Variant::em, 30.0, kFs, 33);
  EXPECT_EQ(em.samples.size(), 15000u);
  EXPECT_NEAR(testutil::rms(em.samples), 1.0, 1e-12);
}

TEST(SynthNoise, DeterministicPerSeed) {
  for (Variant v : kNoiseVariants) {
    EXPECT_EQ(synth_noise(v, 10.0, kFs, 8).samples, synth_noise(v, 10.0, kFs, 8).samples);
    EXPECT_NE(synth_noise(v, 10.0, kFs, 8).samples, synth_noise(v, 10.0, kFs, 9).samples);
  }
  EXPECT_EQ(code_of([] { synth_noise(Variant::bw, 0.0, kFs, 1); }), ErrorCode::InvalidArgument);
}

TEST(SnrOfRaw, Examples) {
  const auto clean = clean_fixture("c");
  auto raw = clean;
  raw.variant = Variant::raw;
  EXPECT_TRUE(std::isinf(snr_of_raw(raw, clean)));

  auto doubled = clean;
  for (auto& lead : doubled.leads)
    for (auto& v : lead) v *= 2.0;
  EXPECT_NEAR(snr_of_raw(doubled, clean), 0.0, 1e-9);

  const auto n = testutil::gaussian_noise(clean.sample_count(), 3);
  const double k = scale_factor_for_snr(clean.leads[1], n, 7.0);
  auto noisy = clean;
  for (auto& lead : noisy.leads)
    for (std::size_t i = 0; i < lead.size(); ++i) lead[i] += k * n[i];
  EXPECT_NEAR(snr_of_raw(noisy, clean), 7.0, 1e-9);

  auto shorter = clean;
  shorter.leads[1].pop_back();
  shorter.leads[0].pop_back();
  shorter.leads[2].pop_back();
  EXPECT_EQ(code_of([&] { snr_of_raw(shorter, clean); }), ErrorCode::LengthMismatch);
}

TEST(NoiseBankFiles, LoadAndResample) {
  testutil::TempDir dir("bank");
  for (const char* name : {"bw", "em", "ma"}) {
    SignalFile f{{testutil::gaussian_noise(3600, stable_hash(name))}, 360.0, std::nullopt};
    write_signal_file(dir / (std::string(name) + ".ecg"), f, SignalFormat::binary_f64);
  }
  const auto bank = load_noise_bank(dir.path(), 500.0);
  EXPECT_EQ(bank.fs(), 500.0);
  EXPECT_NEAR(bank.total_duration_s(), 10.0, 0.01);
  std::filesystem::remove(dir / "ma.ecg");
  EXPECT_EQ(code_of([&] { load_noise_bank(dir.path(), 500.0); }), ErrorCode::MissingFile);
}

TEST(Resample, LinearInterpolation) {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
  const auto y = resample_linear(x, 1.0, 2.0);
  EXPECT_EQ(y, (std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0}));
  EXPECT_EQ(resample_linear(x, 5.0, 5.0), x);
}
