// SPDX-License-Identifier: Apache-2.0
#include "ecgrob/spar.hpp"

#include <algorithm>
#include <cmath>

#include "ecgrob/errors.hpp"
#include "ecgrob/simd/kernels.hpp"

namespace ecgrob {

namespace {

std::vector<double> detrend_linear(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  const double t_mean = (n - 1.0) / 2.0;
  double x_mean = 0.0;
  for (double v : x) x_mean += v;
  x_mean /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dt = static_cast<double>(i) - t_mean;
    sxy += dt * (x[i] - x_mean);
    sxx += dt * dt;
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = (x[i] - x_mean) - slope * (static_cast<double>(i) - t_mean);
  }
  return out;
}

// Gaussian smoothing, renormalised at the edges. Widens the QRS past the
// beat-to-beat jitter so the one-beat lag keeps the strongest correlation.
std::vector<double> gaussian_smooth(std::span<const double> x, double sigma_samples) {
  const auto half = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma_samples));
  std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
  for (std::ptrdiff_t j = -half; j <= half; ++j) {
    const double u = static_cast<double>(j) / sigma_samples;
    kernel[static_cast<std::size_t>(j + half)] = std::exp(-0.5 * u * u);
  }
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  std::vector<double> out(x.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0, weight = 0.0;
    for (std::ptrdiff_t j = std::max(-half, -i); j <= std::min(half, n - 1 - i); ++j) {
      const double k = kernel[static_cast<std::size_t>(j + half)];
      acc += k * x[static_cast<std::size_t>(i + j)];
      weight += k;
    }
    out[static_cast<std::size_t>(i)] = acc / weight;
  }
  return out;
}

// One smoothing sigma in samples.
std::size_t sigma_samples(double fs) {
  return static_cast<std::size_t>(std::ceil(kCycleSmoothingS * fs));
}

}  // namespace

void SparConfig::validate() const {
  if (!(tau_fraction > 0.0 && tau_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "tau fraction must lie in (0, 1)");
  }
  if (grid == 0) throw Error(ErrorCode::InvalidArgument, "grid must be positive");
}

std::vector<double> normalized_autocorrelation(std::span<const double> signal, std::size_t max_lag) {
  const auto x = detrend_linear(signal);
  const double energy = simd::sum_squares(x);
  std::vector<double> r(max_lag + 1, 0.0);
  if (!(energy > 0.0)) return r;
  const std::span<const double> xs(x);
  for (std::size_t lag = 0; lag <= max_lag && lag < x.size(); ++lag) {
    const std::size_t m = x.size() - lag;
    r[lag] = simd::dot(xs.subspan(0, m), xs.subspan(lag, m)) / energy;
  }
  return r;
}

CycleEstimate estimate_cycle_length(std::span<const double> signal, double fs) {
  if (!(fs > 0.0)) throw Error(ErrorCode::InvalidArgument, "fs must be positive");
  if (static_cast<double>(signal.size()) < 2.0 * fs) {
    throw Error(ErrorCode::SignalTooShort, "cycle estimation needs at least 2 s");
  }
  const auto [lo_it, hi_it] = std::minmax_element(signal.begin(), signal.end());
  if (!(*hi_it > *lo_it)) throw Error(ErrorCode::InvalidArgument, "constant signal has no cycle");

  const auto lo = static_cast<std::size_t>(std::ceil(kMinCycleS * fs));
  const auto hi = std::min(static_cast<std::size_t>(std::floor(kMaxCycleS * fs)), signal.size() - 1);
  const auto smooth = gaussian_smooth(signal, kCycleSmoothingS * fs);
  const auto r = normalized_autocorrelation(smooth, hi + 1 < signal.size() ? hi + 1 : hi);

  std::size_t best = 0;
  double best_value = -2.0;
  for (std::size_t lag = lo; lag <= hi; ++lag) {
    const bool local_max = r[lag] >= r[lag - 1] && (lag + 1 >= r.size() || r[lag] >= r[lag + 1]);
    if (local_max && r[lag] > best_value) {
      best_value = r[lag];
      best = lag;
    }
  }
  // Periodicity is judged on the unsmoothed signal: smoothing alone lifts the
  // chance correlation of white noise above the floor.
  double raw_peak = -2.0;
  if (best != 0) {
    const auto raw = normalized_autocorrelation(signal, std::min(r.size() - 1, best + 2 * sigma_samples(fs)));
    for (std::size_t lag = best > 2 * sigma_samples(fs) ? best - 2 * sigma_samples(fs) : 0; lag < raw.size(); ++lag) {
      raw_peak = std::max(raw_peak, raw[lag]);
    }
  }
  CycleEstimate est;
  if (best == 0 || raw_peak < kMinPeriodicity) {
    est.seconds = kFallbackCycleS;
    est.peak_correlation = std::max(raw_peak, 0.0);
    est.no_periodicity = true;
    return est;
  }
  est.seconds = static_cast<double>(best) / fs;
  est.peak_correlation = raw_peak;
  return est;
}

std::vector<Point3> delay_embed(std::span<const double> signal, std::size_t tau) {
  if (tau < 1) throw Error(ErrorCode::InvalidArgument, "delay must be at least one sample");
  if (signal.size() <= 2 * tau) {
    throw Error(ErrorCode::SignalTooShort, "signal of " + std::to_string(signal.size()) +
                                               " samples too short for delay " + std::to_string(tau));
  }
  std::vector<Point3> pts;
  pts.reserve(signal.size() - 2 * tau);
  for (std::size_t i = 2 * tau; i < signal.size(); ++i) {
    pts.push_back({signal[i], signal[i - tau], signal[i - 2 * tau]});
  }
  return pts;
}

std::vector<Point2> project_spar(std::span<const Point3> points) {
  static const double inv_sqrt6 = 1.0 / std::sqrt(6.0);
  static const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::vector<Point2> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    // differences first: exact cancellation of any common offset
    const double xz = p[0] - p[2];
    const double yz = p[1] - p[2];
    out.push_back({(xz + yz) * inv_sqrt6, xz * inv_sqrt2});
  }
  return out;
}

std::vector<std::size_t> density_counts(std::span<const Point2> points, std::size_t grid) {
  double b = 0.0;
  for (const auto& p : points) b = std::max({b, std::abs(p[0]), std::abs(p[1])});
  if (!(b > 0.0)) b = 1e-12;
  std::vector<std::size_t> counts(grid * grid, 0);
  const double g = static_cast<double>(grid);
  auto cell = [&](double u) {
    const double pos = (u / b + 1.0) * 0.5 * g;
    return std::min(static_cast<std::size_t>(std::max(pos, 0.0)), grid - 1);
  };
  for (const auto& p : points) {
    const std::size_t col = cell(p[0]);
    const std::size_t row = grid - 1 - cell(p[1]);
    counts[row * grid + col]++;
  }
  return counts;
}

TransformImage rasterize_density(std::span<const Point2> points, const SparConfig& config) {
  config.validate();
  if (config.grid != kImageSize) {
    throw Error(ErrorCode::InvalidArgument, "attractor images are 150x150");
  }
  TransformImage img;
  img.kind = ImageKind::attractor;
  if (points.empty()) return img;
  const auto counts = density_counts(points, config.grid);
  const std::size_t peak = *std::max_element(counts.begin(), counts.end());
  const double denom = config.density_scale == DensityScale::log1p
                           ? std::log1p(static_cast<double>(peak))
                           : static_cast<double>(peak);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double c = static_cast<double>(counts[i]);
    img.pixels[i] = config.density_scale == DensityScale::log1p ? std::log1p(c) / denom : c / denom;
  }
  return img;
}

SparResult spar_transform(const EcgRecord& record, const SparConfig& config) {
  config.validate();
  const auto lead = select_lead(record, config.lead);
  SparResult result;
  try {
    result.cycle = estimate_cycle_length(lead, record.fs);
    const double tau = std::round(config.tau_fraction * result.cycle.seconds * record.fs);
    result.tau_samples = std::max<std::size_t>(1, static_cast<std::size_t>(tau));
    const auto points = project_spar(delay_embed(lead, result.tau_samples));
    result.image = rasterize_density(points, config);
  } catch (const Error& e) {
    throw e.with_context("attractor", record.id);
  }
  result.image.source_id = record.id;
  result.image.variant = record.variant;
  result.image.label = record.label;
  return result;
}

TransformImage spar_image(const EcgRecord& record, const SparConfig& config) {
  return spar_transform(record, config).image;
}

}  // namespace ecgrob
