// SPDX-License-Identifier: Apache-2.0
#include "ecgrob/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "ecgrob/errors.hpp"
#include "ecgrob/parallel.hpp"

namespace ecgrob {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void add_gaussian(std::vector<double>& x, double fs, double centre, double sigma, double amp) {
  if (amp == 0.0) return;
  const double n = static_cast<double>(x.size());
  const auto lo = static_cast<std::ptrdiff_t>(std::floor((centre - 5.0 * sigma) * fs));
  const auto hi = static_cast<std::ptrdiff_t>(std::ceil((centre + 5.0 * sigma) * fs));
  for (auto i = std::max<std::ptrdiff_t>(lo, 0); i <= hi && static_cast<double>(i) < n; ++i) {
    const double d = (static_cast<double>(i) / fs - centre) / sigma;
    x[static_cast<std::size_t>(i)] += amp * std::exp(-0.5 * d * d);
  }
}

// Flat plateau on [start, end] with raised-cosine shoulders of width `ramp`.
void add_plateau(std::vector<double>& x, double fs, double start, double end, double ramp,
                 double amp) {
  if (amp == 0.0) return;
  const double n = static_cast<double>(x.size());
  const auto lo = static_cast<std::ptrdiff_t>(std::floor((start - ramp) * fs));
  const auto hi = static_cast<std::ptrdiff_t>(std::ceil((end + ramp) * fs));
  for (auto i = std::max<std::ptrdiff_t>(lo, 0); i <= hi && static_cast<double>(i) < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    double w = 0.0;
    if (t >= start && t <= end) w = 1.0;
    else if (t < start && t > start - ramp) w = 0.5 - 0.5 * std::cos(std::numbers::pi * (t - start + ramp) / ramp);
    else if (t > end && t < end + ramp) w = 0.5 + 0.5 * std::cos(std::numbers::pi * (t - end) / ramp);
    x[static_cast<std::size_t>(i)] += amp * w;
  }
}

struct LeadShape {
  double r_scale;
  double p_scale;
  double t_scale;
};

void render_beat(std::vector<double>& x, double fs, double tr, double rr, const SynthParams& p,
                 const LeadShape& s) {
  const double r = p.r_amp * s.r_scale;
  const double qt = std::sqrt(rr);
  add_gaussian(x, fs, tr - 0.16, 0.025, p.p_amp * s.p_scale);
  add_gaussian(x, fs, tr - 0.025, 0.010, -0.12 * r);
  add_gaussian(x, fs, tr, 0.011, r);
  add_gaussian(x, fs, tr + 0.028, 0.010, -0.22 * r);
  add_gaussian(x, fs, tr + 0.30 * qt, 0.045 * qt, p.t_amp * s.t_scale);
  add_plateau(x, fs, tr + 0.06, tr + 0.18, 0.02, -p.st_depression * r);
}

}  // namespace

SynthParams sample_params(Label label, std::uint64_t seed, bool artefacts) {
  std::mt19937_64 rng(seed);
  const auto u = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  SynthParams p;
  p.r_amp = u(0.8, 1.6);
  p.t_amp = u(0.2, 0.4);
  p.p_amp = u(0.08, 0.15);
  p.rr_mean_s = u(0.75, 1.05);
  p.rr_cv = u(0.01, 0.03);
  if (label == Label::AF) {
    p.p_amp = 0.0;
    p.rr_mean_s = u(0.5, 0.65);
    p.rr_cv = 0.22;
    p.fwave_amp = u(0.04, 0.08);
    p.fwave_hz = u(4.5, 8.5);
  } else {
    (void)u(0.0, 1.0);
    (void)u(0.0, 1.0);
  }
  if (label == Label::STD) p.st_depression = kSynthStDepression;
  if (artefacts) {
    p.drift_amp = u(0.05, 0.15);
    p.hum_amp = u(0.01, 0.03);
    p.white_sigma = 0.005;
  }
  return p;
}

EcgRecord render_synthetic(const std::string& id, Label label, const SynthParams& params,
                           double fs, double duration_s, std::uint64_t seed,
                           std::vector<double>* r_times) {
  if (!(fs > 0.0) || !(duration_s > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "fs and duration must be positive", id);
  }
  const auto n = static_cast<std::size_t>(std::llround(fs * duration_s));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Beat intervals with exactly the requested sample CV, bounded deviations.
  const auto beats = static_cast<std::size_t>(std::ceil(duration_s / params.rr_mean_s)) + 3;
  std::vector<double> z(beats);
  for (double& v : z) v = unit(rng) * 2.0 - 1.0;
  double mean = 0.0;
  for (double v : z) mean += v;
  mean /= static_cast<double>(beats);
  double var = 0.0;
  for (double v : z) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(beats - 1));
  std::vector<double> rr(beats);
  for (std::size_t i = 0; i < beats; ++i) {
    const double zn = sd > 0.0 ? (z[i] - mean) / sd : 0.0;
    rr[i] = params.rr_mean_s * (1.0 + params.rr_cv * zn);
  }

  std::vector<double> lead2(n, 0.0), lead1(n, 0.0);
  const LeadShape shape2{1.0, 1.0, 1.0};
  const LeadShape shape1{0.6, 0.7, 0.8};
  double tr = -unit(rng) * params.rr_mean_s;
  std::vector<double> peaks;
  for (std::size_t i = 0; i < beats; ++i) {
    if (tr > -0.6 && tr < duration_s + 0.6) {
      render_beat(lead2, fs, tr, rr[i], params, shape2);
      render_beat(lead1, fs, tr, rr[i], params, shape1);
      if (tr >= 0.0 && tr < duration_s) peaks.push_back(tr);
    }
    tr += rr[i];
  }

  const double f_phase = unit(rng) * kTwoPi;
  const double mod_phase = unit(rng) * kTwoPi;
  const double drift_phase1 = unit(rng) * kTwoPi;
  const double drift_phase2 = unit(rng) * kTwoPi;
  const double hum_phase = unit(rng) * kTwoPi;
  std::normal_distribution<double> white(0.0, 1.0);
  double phase = f_phase;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    if (params.fwave_amp > 0.0) {
      const double f = params.fwave_hz + 0.4 * std::sin(kTwoPi * 0.15 * t + mod_phase);
      phase += kTwoPi * f / fs;
      const double fw = params.fwave_amp * std::sin(phase);
      lead2[i] += fw;
      lead1[i] += 0.5 * fw;
    }
    if (params.drift_amp > 0.0) {
      lead2[i] += params.drift_amp * std::sin(kTwoPi * 0.12 * t + drift_phase1);
      lead1[i] += 0.7 * params.drift_amp * std::sin(kTwoPi * 0.09 * t + drift_phase2);
    }
    if (params.hum_amp > 0.0) {
      const double hum = params.hum_amp * std::sin(kTwoPi * 50.0 * t + hum_phase);
      lead2[i] += hum;
      lead1[i] += hum;
    }
    if (params.white_sigma > 0.0) {
      lead2[i] += params.white_sigma * white(rng);
      lead1[i] += params.white_sigma * white(rng);
    }
  }

  EcgRecord rec;
  rec.id = id;
  rec.fs = fs;
  rec.label = label;
  rec.variant = Variant::raw;
  std::vector<double> lead3(n);
  for (std::size_t i = 0; i < n; ++i) lead3[i] = lead2[i] - lead1[i];
  rec.leads = {std::move(lead1), std::move(lead2), std::move(lead3)};
  if (r_times) *r_times = std::move(peaks);
  return rec;
}

std::vector<EcgRecord> synth_corpus(std::size_t n_per_class, double fs, double duration_s,
                                    std::uint64_t seed, bool artefacts) {
  if (n_per_class < 10) throw Error(ErrorCode::InvalidArgument, "n_per_class must be at least 10");
  if (!(fs > 0.0) || !(duration_s > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "fs and duration must be positive");
  }
  std::vector<EcgRecord> out(n_per_class * kNumClasses);
  parallel_for(out.size(), [&](std::size_t i) {
    const Label label = kAllLabels[i / n_per_class];
    char id[64];
    std::snprintf(id, sizeof id, "%s_%04zu", std::string(to_string(label)).c_str(),
                  i % n_per_class + 1);
    const auto params = sample_params(label, substream_seed(seed, std::string(id) + "/params"), artefacts);
    out[i] = render_synthetic(id, label, params, fs, duration_s,
                              substream_seed(seed, std::string(id) + "/render"));
  });
  return out;
}

}  // namespace ecgrob
