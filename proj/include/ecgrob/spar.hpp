// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <vector>

#include "ecgrob/record.hpp"

namespace ecgrob {

enum class DensityScale { linear, log1p };

struct SparConfig {
  int lead = kDefaultLead;
  double tau_fraction = 1.0 / 3.0;  // delay as a fraction of the mean cycle
  std::size_t grid = kImageSize;
  DensityScale density_scale = DensityScale::log1p;

  void validate() const;
};

struct CycleEstimate {
  double seconds = 0.0;
  double peak_correlation = 0.0;  // unsmoothed, near the chosen lag
  bool no_periodicity = false;  // fallback value used
};

inline constexpr double kMinCycleS = 0.25;
inline constexpr double kMaxCycleS = 2.0;
inline constexpr double kFallbackCycleS = 0.8;
inline constexpr double kMinPeriodicity = 0.1;
inline constexpr double kCycleSmoothingS = 0.04;  // Gaussian sigma before correlating

// Lag in [0.25 s, 2 s] at the strongest local maximum of the normalised
// autocorrelation of the Gaussian-smoothed, linearly detrended signal. Peaks below 0.1 give
// the 0.8 s fallback with `no_periodicity` set. Requires >= 2 s of a
// non-constant signal.
CycleEstimate estimate_cycle_length(std::span<const double> signal, double fs);

// r[lag] = sum x[i] x[i+lag] / sum x[i]^2 over the detrended signal, for
// lag in [0, max_lag].
std::vector<double> normalized_autocorrelation(std::span<const double> signal, std::size_t max_lag);

using Point3 = std::array<double, 3>;
using Point2 = std::array<double, 2>;

// (x[i], x[i - tau], x[i - 2 tau]) for i = 2 tau .. n - 1.
std::vector<Point3> delay_embed(std::span<const double> signal, std::size_t tau);

// Projection onto the plane orthogonal to (1, 1, 1):
//   v = (x + y - 2z) / sqrt(6), w = (x - z) / sqrt(2)
std::vector<Point2> project_spar(std::span<const Point3> points);

// grid x grid histogram over [-b, b]^2 with b the largest absolute
// coordinate, normalised so the densest cell is 1.
TransformImage rasterize_density(std::span<const Point2> points, const SparConfig& config = {});

// Raw cell counts behind rasterize_density (row 0 at the top).
std::vector<std::size_t> density_counts(std::span<const Point2> points, std::size_t grid);

struct SparResult {
  TransformImage image;
  CycleEstimate cycle;
  std::size_t tau_samples = 0;
};

SparResult spar_transform(const EcgRecord& record, const SparConfig& config = {});
TransformImage spar_image(const EcgRecord& record, const SparConfig& config = {});

}  // namespace ecgrob
