// SPDX-License-Identifier: Apache-2.0
#include "ecgrob/metrics.hpp"

#include "ecgrob/errors.hpp"

namespace ecgrob {

std::uint64_t ConfusionMatrix::row_sum(std::size_t c) const {
  std::uint64_t s = 0;
  for (std::size_t j = 0; j < kNumClasses; ++j) s += counts[c][j];
  return s;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t c) const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < kNumClasses; ++i) s += counts[i][c];
  return s;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t s = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) s += row_sum(c);
  return s;
}

ConfusionMatrix confusion_from_labels(std::span<const Label> truth, std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) {
    throw Error(ErrorCode::LengthMismatch, "truth and prediction lists differ in length");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

double f1_from_precision_recall(double precision, double recall) {
  const double denom = precision + recall;
  if (denom == 0.0) return 0.0;
  return 2.0 * precision * recall / denom;
}

std::array<ClassMetrics, kNumClasses> per_class_metrics(const ConfusionMatrix& cm) {
  std::array<ClassMetrics, kNumClasses> out{};
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto tp = static_cast<double>(cm.counts[c][c]);
    const auto col = cm.col_sum(c);
    const auto row = cm.row_sum(c);
    ClassMetrics& m = out[c];
    if (col == 0) m.degenerate = true; else m.precision = tp / static_cast<double>(col);
    if (row == 0) m.degenerate = true; else m.recall = tp / static_cast<double>(row);
    if (m.precision + m.recall == 0.0) m.degenerate = true;
    m.f1 = f1_from_precision_recall(m.precision, m.recall);
  }
  return out;
}

double macro_f1(const ConfusionMatrix& cm) {
  const auto m = per_class_metrics(cm);
  double s = 0.0;
  for (const auto& c : m) s += c.f1;
  return s / static_cast<double>(kNumClasses);
}

}  // namespace ecgrob
