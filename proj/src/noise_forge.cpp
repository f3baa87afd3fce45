// SPDX-License-Identifier: Apache-2.0
#include "ecgrob/noise_forge.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "ecgrob/errors.hpp"
#include "ecgrob/fft.hpp"
#include "ecgrob/signal_io.hpp"
#include "ecgrob/simd/kernels.hpp"

namespace ecgrob {

namespace fs = std::filesystem;

namespace {

double mean_power(std::span<const double> x) {
  return simd::sum_squares(x) / static_cast<double>(x.size());
}

void check_pair(std::span<const double> signal, std::span<const double> noise) {
  if (signal.size() != noise.size()) {
    throw Error(ErrorCode::LengthMismatch, "signal has " + std::to_string(signal.size()) +
                                               " samples, noise " + std::to_string(noise.size()));
  }
  if (signal.empty()) throw Error(ErrorCode::EmptySignal, "empty signal");
}

void normalise_rms(std::vector<double>& x) {
  const double rms = std::sqrt(mean_power(x));
  if (rms > 0.0)
    for (double& v : x) v /= rms;
}

// Gaussian white noise restricted to [f_lo, f_hi] Hz by zeroing spectral bins.
std::vector<double> band_limited_gaussian(std::size_t n, double fs, double f_lo, double f_hi,
                                          std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> white(n);
  for (double& v : white) v = gauss(rng);
  auto spec = fft::forward_real(white, n);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double f = static_cast<double>(k) * fs / static_cast<double>(n);
    if (f < f_lo || f > f_hi) spec[k] = 0.0;
  }
  return fft::inverse_real(spec, n);
}

std::vector<double> slow_sinusoids(std::size_t n, double fs, int count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> freq(0.05, 0.5);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> amp(0.5, 1.0);
  std::vector<double> out(n, 0.0);
  for (int c = 0; c < count; ++c) {
    const double f = freq(rng);
    const double ph = phase(rng);
    const double a = amp(rng);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] += a * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / fs + ph);
    }
  }
  return out;
}

std::vector<double> synth_bw(std::size_t n, double fs, std::mt19937_64& rng) {
  auto x = slow_sinusoids(n, fs, 3, rng);
  normalise_rms(x);
  return x;
}

std::vector<double> synth_em(std::size_t n, double fs, std::mt19937_64& rng) {
  auto drift = slow_sinusoids(n, fs, 2, rng);
  normalise_rms(drift);

  // Step discontinuities at Poisson times that relax back with time constant ~2 s.
  std::vector<double> steps(n, 0.0);
  std::exponential_distribution<double> gap(0.2);
  std::normal_distribution<double> height(0.0, 1.0);
  const double decay = std::exp(-1.0 / (2.0 * fs));
  double t = gap(rng);
  std::size_t next_step = static_cast<std::size_t>(t * fs);
  double level = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    while (i == next_step) {
      level += height(rng);
      t += gap(rng);
      next_step = static_cast<std::size_t>(t * fs);
    }
    steps[i] = level;
    level *= decay;
  }

  auto jitter = band_limited_gaussian(n, fs, 1.0, 10.0, rng);
  normalise_rms(jitter);

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.6 * drift[i] + steps[i] + 0.5 * jitter[i];
  normalise_rms(out);
  return out;
}

std::vector<double> synth_ma(std::size_t n, double fs, std::mt19937_64& rng) {
  auto burst = band_limited_gaussian(n, fs, 1.0, 20.0, rng);
  std::uniform_real_distribution<double> ef(0.02, 0.1);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
  const double f1 = ef(rng), p1 = ph(rng), f2 = ef(rng), p2 = ph(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const double ti = static_cast<double>(i) / fs;
    const double envelope = 1.0 + 0.4 * std::sin(2.0 * std::numbers::pi * f1 * ti + p1) +
                            0.3 * std::sin(2.0 * std::numbers::pi * f2 * ti + p2);
    burst[i] *= envelope;
  }
  normalise_rms(burst);
  return burst;
}

std::size_t sample_count(double duration_s, double fs) {
  if (!(duration_s > 0.0) || !(fs > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "noise duration and fs must be positive");
  }
  return static_cast<std::size_t>(std::llround(duration_s * fs));
}

}  // namespace

NoiseBank::NoiseBank(NoiseSegment bw, NoiseSegment em, NoiseSegment ma)
    : bw_(std::move(bw)), em_(std::move(em)), ma_(std::move(ma)) {
  if (bw_.samples.empty() || bw_.samples.size() != em_.samples.size() ||
      bw_.samples.size() != ma_.samples.size()) {
    throw Error(ErrorCode::InvalidArgument, "noise segments must be non-empty and equal length");
  }
  if (!(bw_.fs > 0.0) || bw_.fs != em_.fs || bw_.fs != ma_.fs) {
    throw Error(ErrorCode::InvalidArgument, "noise segments must share a positive fs");
  }
  for (const auto* s : {&bw_, &em_, &ma_})
    for (double v : s->samples)
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite noise sample");
  bw_.kind = Variant::bw;
  em_.kind = Variant::em;
  ma_.kind = Variant::ma;
  all_.kind = Variant::all;
  all_.fs = bw_.fs;
  all_.samples.resize(bw_.samples.size());
  simd::add(all_.samples, bw_.samples, em_.samples);
  simd::add(all_.samples, all_.samples, ma_.samples);
}

const NoiseSegment& NoiseBank::segment(Variant kind) const {
  switch (kind) {
    case Variant::bw: return bw_;
    case Variant::em: return em_;
    case Variant::ma: return ma_;
    case Variant::all: return all_;
    default: throw Error(ErrorCode::InvalidArgument, "not a noise kind");
  }
}

void SnrPolicy::validate() const {
  if (!(min_db <= max_db) || !std::isfinite(min_db) || !std::isfinite(max_db)) {
    throw Error(ErrorCode::InvalidArgument, "SNR range must satisfy min <= max");
  }
}

double compute_snr(std::span<const double> signal, std::span<const double> noise) {
  check_pair(signal, noise);
  const double pn = mean_power(noise);
  if (!(pn > 0.0)) throw Error(ErrorCode::ZeroNoisePower, "noise power is zero");
  return 10.0 * std::log10(mean_power(signal) / pn);
}

double scale_factor_for_snr(std::span<const double> signal, std::span<const double> noise,
                            double target_db) {
  check_pair(signal, noise);
  const double pn = mean_power(noise);
  if (!(pn > 0.0)) throw Error(ErrorCode::ZeroNoisePower, "noise power is zero");
  const double ps = mean_power(signal);
  if (!(ps > 0.0)) throw Error(ErrorCode::ZeroSignalPower, "signal power is zero");
  return std::sqrt(ps / (pn * std::pow(10.0, target_db / 10.0)));
}

const EcgRecord& NoisyRecords::get(Variant kind) const {
  for (std::size_t i = 0; i < kNoiseVariants.size(); ++i)
    if (kNoiseVariants[i] == kind) return variants[i];
  throw Error(ErrorCode::InvalidArgument, "not a noise variant");
}

NoisyRecords apply_noise(const EcgRecord& record, const NoiseBank& bank, const SnrPolicy& policy,
                         const NoiseOptions& options) {
  policy.validate();
  if (record.variant != Variant::clean) {
    throw Error(ErrorCode::VariantMismatch, "noise is applied to clean records only", record.id);
  }
  if (record.fs != bank.fs()) {
    throw Error(ErrorCode::InvalidArgument, "noise bank fs differs from record fs", record.id);
  }
  const std::size_t n = record.sample_count();
  if (bank.length() < n || n == 0) {
    throw Error(ErrorCode::BankTooShort, "noise bank shorter than record", record.id);
  }
  const std::size_t ref = lead_index(record, options.lead);

  std::mt19937_64 rng(substream_seed(policy.rng_seed, record.id));
  std::uniform_int_distribution<std::size_t> pick_offset(0, bank.length() - n);

  NoisyRecords out;
  const std::size_t windows = options.per_lead_windows ? record.lead_count() : 1;
  for (std::size_t w = 0; w < windows; ++w) out.offsets.push_back(pick_offset(rng));
  std::uniform_real_distribution<double> pick_snr(policy.min_db, policy.max_db);
  out.snr_db = policy.min_db == policy.max_db ? policy.min_db : pick_snr(rng);

  auto window = [&](Variant kind, std::size_t lead) {
    const std::size_t off = out.offsets[options.per_lead_windows ? lead : 0];
    return std::span<const double>(bank.segment(kind).samples).subspan(off, n);
  };

  try {
    out.scale = scale_factor_for_snr(record.leads[ref], window(Variant::all, ref), out.snr_db);
  } catch (const Error& e) {
    throw e.with_context("scale", record.id);
  }

  for (std::size_t v = 0; v < kNoiseVariants.size(); ++v) {
    EcgRecord& noisy = out.variants[v];
    noisy.id = record.id;
    noisy.fs = record.fs;
    noisy.label = record.label;
    noisy.variant = kNoiseVariants[v];
    noisy.leads.resize(record.lead_count());
    for (std::size_t l = 0; l < record.lead_count(); ++l) {
      noisy.leads[l].resize(n);
      simd::scale_add(noisy.leads[l], record.leads[l], out.scale, window(kNoiseVariants[v], l));
    }
  }
  return out;
}

NoiseSegment synth_noise(Variant kind, double duration_s, double fs, std::uint64_t seed) {
  const std::size_t n = sample_count(duration_s, fs);
  NoiseSegment seg;
  seg.fs = fs;
  seg.kind = kind;
  switch (kind) {
    case Variant::bw: {
      std::mt19937_64 rng(substream_seed(seed, "noise/bw"));
      seg.samples = synth_bw(n, fs, rng);
      break;
    }
    case Variant::em: {
      std::mt19937_64 rng(substream_seed(seed, "noise/em"));
      seg.samples = synth_em(n, fs, rng);
      break;
    }
    case Variant::ma: {
      std::mt19937_64 rng(substream_seed(seed, "noise/ma"));
      seg.samples = synth_ma(n, fs, rng);
      break;
    }
    case Variant::all: {
      NoiseBank bank = synth_noise_bank(duration_s, fs, seed);
      seg.samples = bank.segment(Variant::all).samples;
      break;
    }
    default: throw Error(ErrorCode::InvalidArgument, "not a noise kind");
  }
  return seg;
}

NoiseBank synth_noise_bank(double duration_s, double fs, std::uint64_t seed) {
  return NoiseBank(synth_noise(Variant::bw, duration_s, fs, seed),
                   synth_noise(Variant::em, duration_s, fs, seed),
                   synth_noise(Variant::ma, duration_s, fs, seed));
}

std::vector<double> resample_linear(std::span<const double> x, double from_fs, double to_fs) {
  if (!(from_fs > 0.0) || !(to_fs > 0.0)) throw Error(ErrorCode::InvalidArgument, "fs must be positive");
  if (x.empty() || from_fs == to_fs) return {x.begin(), x.end()};
  const double duration = static_cast<double>(x.size() - 1) / from_fs;
  const auto m = static_cast<std::size_t>(std::floor(duration * to_fs)) + 1;
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double pos = static_cast<double>(i) * from_fs / to_fs;
    const auto j = std::min(static_cast<std::size_t>(pos), x.size() - 1);
    const double frac = pos - static_cast<double>(j);
    out[i] = j + 1 < x.size() ? x[j] + frac * (x[j + 1] - x[j]) : x[j];
  }
  return out;
}

NoiseBank load_noise_bank(const fs::path& dir, double target_fs) {
  auto load = [&](Variant kind) {
    const std::string stem(to_string(kind));
    for (const char* ext : {".csv", ".ecg"}) {
      const fs::path p = dir / (stem + ext);
      if (!fs::exists(p)) continue;
      SignalFile file = read_signal_file(p);
      if (file.leads.empty()) throw Error(ErrorCode::ParseError, "noise file has no channel: " + p.string());
      NoiseSegment seg;
      seg.kind = kind;
      seg.fs = target_fs;
      seg.samples = resample_linear(file.leads.front(), file.fs, target_fs);
      return seg;
    }
    throw Error(ErrorCode::MissingFile, "no " + stem + ".csv or " + stem + ".ecg in " + dir.string());
  };
  NoiseSegment bw = load(Variant::bw), em = load(Variant::em), ma = load(Variant::ma);
  const std::size_t n = std::min({bw.samples.size(), em.samples.size(), ma.samples.size()});
  bw.samples.resize(n);
  em.samples.resize(n);
  ma.samples.resize(n);
  return NoiseBank(std::move(bw), std::move(em), std::move(ma));
}

double snr_of_raw(const EcgRecord& raw, const EcgRecord& clean, int lead) {
  if (raw.sample_count() != clean.sample_count() || raw.lead_count() != clean.lead_count() ||
      raw.fs != clean.fs) {
    throw Error(ErrorCode::LengthMismatch, "raw and clean records differ in shape", raw.id);
  }
  const auto r = select_lead(raw, lead);
  const auto c = select_lead(clean, lead);
  std::vector<double> diff(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) diff[i] = r[i] - c[i];
  try {
    return compute_snr(c, diff);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ZeroNoisePower) return std::numeric_limits<double>::infinity();
    throw;
  }
}

}  // namespace ecgrob
