// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "ecgrob/record.hpp"

namespace ecgrob {

// rows = true class, columns = predicted class, order AF, Normal, STD.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};

  void add(Label truth, Label predicted) { ++counts[class_index(truth)][class_index(predicted)]; }
  std::uint64_t row_sum(std::size_t c) const;
  std::uint64_t col_sum(std::size_t c) const;
  std::uint64_t total() const;
};

ConfusionMatrix confusion_from_labels(std::span<const Label> truth, std::span<const Label> predicted);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool degenerate = false;  // some ratio was 0/0 and taken as 0
};

// 0/0 is defined as 0 for precision, recall and F1.
std::array<ClassMetrics, kNumClasses> per_class_metrics(const ConfusionMatrix& cm);
double macro_f1(const ConfusionMatrix& cm);

// Shared by the matrix path and raw-label oracles so both round identically.
double f1_from_precision_recall(double precision, double recall);

}  // namespace ecgrob
