// SPDX-License-Identifier: Apache-2.0
#include "ecgrob/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ecgrob/errors.hpp"
#include "ecgrob/metrics.hpp"
#include "ecgrob/simd/kernels.hpp"

namespace ecgrob {

namespace {

constexpr double kMinStd = 1e-12;

void normalize_length(std::span<double> f) {
  const double norm = std::sqrt(simd::sum_squares(f));
  if (norm > 0.0)
    for (double& x : f) x /= norm;
}

std::vector<double> standardize(const ClassifierModel& model, const TransformImage& image) {
  auto f = pooled_features(image);
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    f[j] = model.stddev[j] > 0.0 ? (f[j] - model.mean[j]) / model.stddev[j] : 0.0;
  }
  if (model.metric == DistanceMetric::cosine) normalize_length(f);
  return f;
}

// Training indices ordered by (distance, index), truncated to `count`.
std::vector<std::size_t> nearest(const ClassifierModel& model, std::span<const double> q,
                                 std::size_t count) {
  const std::size_t n = model.train_size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = simd::squared_distance(
        q, std::span<const double>(model.train.data() + i * kFeatureCount, kFeatureCount));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  count = std::min(count, n);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(),
                    [&](std::size_t a, std::size_t b) { return d[a] < d[b] || (d[a] == d[b] && a < b); });
  order.resize(count);
  return order;
}

std::size_t nearest_centroid(const ClassifierModel& model, std::span<const double> q) {
  std::size_t best = 0;
  double best_d = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const double d = simd::squared_distance(q, model.centroids[c]);
    if (c == 0 || d < best_d) {
      best = c;
      best_d = d;
    }
  }
  return best;
}

Label vote(const ClassifierModel& model, std::span<const std::size_t> neighbours, std::size_t k,
           std::size_t centroid_class) {
  std::array<double, kNumClasses> votes{};
  for (std::size_t i = 0; i < std::min(k, neighbours.size()); ++i) {
    votes[class_index(model.train_labels[neighbours[i]])] += 1.0;
  }
  votes[centroid_class] += model.centroid_vote;
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumClasses; ++c)
    if (votes[c] > votes[best]) best = c;
  return kAllLabels[best];
}

}  // namespace

std::vector<double> pooled_features(const TransformImage& image) {
  if (image.pixels.size() != kImageSize * kImageSize) {
    throw Error(ErrorCode::InvalidArgument, "image must be 150x150", image.source_id);
  }
  std::vector<double> f(kFeatureCount, 0.0);
  constexpr double inv = 1.0 / static_cast<double>(kPoolFactor * kPoolFactor);
  for (std::size_t r = 0; r < kPooledSide; ++r) {
    for (std::size_t c = 0; c < kPooledSide; ++c) {
      double s = 0.0;
      for (std::size_t dr = 0; dr < kPoolFactor; ++dr)
        for (std::size_t dc = 0; dc < kPoolFactor; ++dc)
          s += image.at(r * kPoolFactor + dr, c * kPoolFactor + dc);
      f[r * kPooledSide + c] = s * inv;
    }
  }
  return f;
}

ClassifierModel train_baseline(std::span<const TransformImage> train_images,
                               std::span<const Label> train_labels,
                               std::span<const TransformImage> val_images,
                               std::span<const Label> val_labels,
                               const ClassifierOptions& options) {
  if (train_images.size() != train_labels.size() || val_images.size() != val_labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "image and label counts differ");
  }
  if (options.k_candidates.empty()) throw Error(ErrorCode::InvalidArgument, "no k candidates");
  std::array<std::size_t, kNumClasses> per_class{};
  for (Label l : train_labels) ++per_class[class_index(l)];
  for (Label l : kAllLabels) {
    if (per_class[class_index(l)] == 0) {
      throw Error(ErrorCode::MissingClass,
                  "training set has no " + std::string(to_string(l)) + " images");
    }
  }

  const std::size_t n = train_images.size();
  ClassifierModel model;
  model.centroid_vote = options.centroid_vote;
  model.metric = options.metric;
  model.train_labels.assign(train_labels.begin(), train_labels.end());
  model.train.resize(n * kFeatureCount);
  for (std::size_t i = 0; i < n; ++i) {
    const auto f = pooled_features(train_images[i]);
    std::copy(f.begin(), f.end(), model.train.begin() + static_cast<std::ptrdiff_t>(i * kFeatureCount));
  }

  model.mean.assign(kFeatureCount, 0.0);
  model.stddev.assign(kFeatureCount, 0.0);
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += model.train[i * kFeatureCount + j];
    const double mean = s / static_cast<double>(n);
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = model.train[i * kFeatureCount + j] - mean;
      v += d * d;
    }
    const double sd = std::sqrt(v / static_cast<double>(n));
    model.mean[j] = mean;
    if (sd > kMinStd) model.stddev[j] = sd; else ++model.dropped_features;
  }
  model.degenerate_features = model.dropped_features == kFeatureCount;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      double& x = model.train[i * kFeatureCount + j];
      x = model.stddev[j] > 0.0 ? (x - model.mean[j]) / model.stddev[j] : 0.0;
    }
    if (model.metric == DistanceMetric::cosine) {
      normalize_length(std::span<double>(model.train.data() + i * kFeatureCount, kFeatureCount));
    }
  }

  // Threshold in units of the RMS training coordinate, so it means the same
  // for both metrics.
  const double coord_rms =
      std::sqrt(simd::sum_squares(model.train) / static_cast<double>(model.train.size()));
  const double threshold = options.centroid_shrinkage * coord_rms;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    auto& centroid = model.centroids[c];
    centroid.assign(kFeatureCount, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (class_index(model.train_labels[i]) != c) continue;
      for (std::size_t j = 0; j < kFeatureCount; ++j) centroid[j] += model.train[i * kFeatureCount + j];
    }
    for (double& x : centroid) {
      x /= static_cast<double>(per_class[c]);
      const double mag = std::max(std::abs(x) - threshold, 0.0);
      x = std::copysign(mag, x);
    }
  }

  const std::size_t k_max = *std::max_element(options.k_candidates.begin(), options.k_candidates.end());
  std::vector<ConfusionMatrix> cms(options.k_candidates.size());
  for (std::size_t v = 0; v < val_images.size(); ++v) {
    const auto q = standardize(model, val_images[v]);
    const auto nn = nearest(model, q, k_max);
    const std::size_t cc = nearest_centroid(model, q);
    for (std::size_t ki = 0; ki < options.k_candidates.size(); ++ki) {
      cms[ki].add(val_labels[v], vote(model, nn, options.k_candidates[ki], cc));
    }
  }
  double best = -1.0;
  for (std::size_t ki = 0; ki < options.k_candidates.size(); ++ki) {
    const double f1 = macro_f1(cms[ki]);
    model.validation_macro_f1.push_back(f1);
    const std::size_t k = options.k_candidates[ki];
    if (f1 > best || (f1 == best && k > model.k)) {
      best = f1;
      model.k = k;
    }
  }
  return model;
}

Label predict(const ClassifierModel& model, const TransformImage& image) {
  const auto q = standardize(model, image);
  const auto nn = nearest(model, q, model.k);
  return vote(model, nn, model.k, nearest_centroid(model, q));
}

std::vector<Label> predict(const ClassifierModel& model, std::span<const TransformImage> images) {
  std::vector<Label> out;
  out.reserve(images.size());
  for (const auto& im : images) out.push_back(predict(model, im));
  return out;
}

}  // namespace ecgrob
