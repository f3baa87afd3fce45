// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ecgrob/classifier.hpp"
#include "ecgrob/folds.hpp"
#include "ecgrob/metrics.hpp"
#include "ecgrob/record.hpp"

namespace ecgrob {

enum class MatrixMode { same, train_clean, train_all };

std::string_view to_string(MatrixMode mode);
std::optional<MatrixMode> parse_matrix_mode(std::string_view text);  // accepts - or _

using ImageDatasets = std::map<std::pair<Variant, ImageKind>, std::vector<TransformImage>>;

struct CellKey {
  Variant train = Variant::clean;
  Variant test = Variant::clean;
  ImageKind kind = ImageKind::attractor;

  auto operator<=>(const CellKey&) const = default;
};

struct FoldResult {
  ConfusionMatrix confusion;
  double macro_f1 = 0.0;
  std::array<double, kNumClasses> class_f1{};
  std::size_t k = 0;
};

struct CellResult {
  std::vector<FoldResult> folds;
  double macro_f1_mean = 0.0;
  double macro_f1_std = 0.0;  // sample standard deviation across folds
  std::array<double, kNumClasses> class_f1_mean{};
  std::array<double, kNumClasses> class_f1_std{};
};

struct RobustnessReport {
  MatrixMode mode = MatrixMode::same;
  std::uint64_t fold_seed = 0;
  std::map<CellKey, CellResult> cells;

  const CellResult& at(Variant train, Variant test, ImageKind kind) const;
};

// Fills the mean/std fields from the per-fold results.
void summarize(CellResult& cell);

// Trains one baseline model per (kind, training variant, fold) and scores it
// on the fold's test ids of each evaluated variant. Every dataset of a kind
// must hold exactly the plan's ids with matching labels (IdMismatch).
RobustnessReport run_matrix(const FoldPlan& plan, const ImageDatasets& datasets,
                            std::span<const ImageKind> kinds, MatrixMode mode,
                            const ClassifierOptions& options = {});

std::string encode_report(const RobustnessReport& report);
RobustnessReport decode_report(std::string_view json_text);

// Several reports (one per mode) in one document.
std::string encode_report_bundle(std::span<const RobustnessReport> reports);
std::vector<RobustnessReport> decode_reports(std::string_view json_text);

// Aligned text table: variants as columns, image kinds (and per-class
// breakdowns) as rows, "mean (std)" per cell.
std::string render_table(const RobustnessReport& report);

}  // namespace ecgrob
