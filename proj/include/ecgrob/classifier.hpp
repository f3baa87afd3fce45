// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <vector>

#include "ecgrob/record.hpp"

namespace ecgrob {

inline constexpr std::size_t kPoolFactor = 5;
inline constexpr std::size_t kPooledSide = kImageSize / kPoolFactor;  // 30
inline constexpr std::size_t kFeatureCount = kPooledSide * kPooledSide;

enum class DistanceMetric { euclidean, cosine };

struct ClassifierOptions {
  // cosine: standardized vectors are scaled to unit length before the
  // neighbour and centroid searches.
  DistanceMetric metric = DistanceMetric::euclidean;
  std::vector<std::size_t> k_candidates{1, 5, 15};
  // Soft threshold on class centroid coordinates, in units of the RMS
  // training coordinate.
  double centroid_shrinkage = 0.25;
  // Extra vote given to the class of the nearest shrunken centroid.
  double centroid_vote = 0.5;
};

struct ClassifierModel {
  std::vector<double> mean;    // per feature
  std::vector<double> stddev;  // per feature; 0 marks a dropped feature
  std::vector<double> train;   // standardized features, row-major (n x kFeatureCount)
  std::vector<Label> train_labels;
  std::array<std::vector<double>, kNumClasses> centroids;
  std::size_t k = 1;
  std::vector<double> validation_macro_f1;  // one per candidate k
  double centroid_vote = 0.5;
  DistanceMetric metric = DistanceMetric::euclidean;
  bool degenerate_features = false;  // every feature had zero variance
  std::size_t dropped_features = 0;

  std::size_t train_size() const { return train_labels.size(); }
};

// 150x150 -> 30x30 by 5x5 mean pooling, flattened row-major.
std::vector<double> pooled_features(const TransformImage& image);

// Standardized k-NN vote plus a fixed bonus for the nearest shrunken class
// centroid; exact vote ties go to the lowest class index. k is chosen from
// the candidates by validation macro F1, ties toward the larger k.
// Throws MissingClass when the training set lacks a class, LengthMismatch
// on label/image count disagreement.
ClassifierModel train_baseline(std::span<const TransformImage> train_images,
                               std::span<const Label> train_labels,
                               std::span<const TransformImage> val_images,
                               std::span<const Label> val_labels,
                               const ClassifierOptions& options = {});

Label predict(const ClassifierModel& model, const TransformImage& image);
std::vector<Label> predict(const ClassifierModel& model, std::span<const TransformImage> images);

}  // namespace ecgrob
