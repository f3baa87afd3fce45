// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ecgrob/record.hpp"

namespace ecgrob {

struct LabeledId {
  std::string id;
  Label label = Label::Normal;
};

struct Fold {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
};

inline constexpr std::size_t kFoldCount = 5;
inline constexpr double kTrainFraction = 0.75;
inline constexpr double kValidationFraction = 0.05;
inline constexpr double kTestFraction = 0.20;
inline constexpr std::size_t kMinRecordsPerClass = 20;

struct FoldPlan {
  std::vector<Fold> folds;
  std::uint64_t seed = 0;
  std::vector<LabeledId> ids;  // every id in the plan with its label, sorted by id
};

// Stratified 5-fold plan. Test sets are the blocks of a shuffled
// per-class round-robin deal; each fold's validation set is drawn from its
// non-test remainder so that every class count in every set stays within
// one record of class_size * fraction. Throws TooFewRecords when a class
// has fewer than 20 records, InvariantViolation on duplicate ids.
FoldPlan make_folds(std::span<const LabeledId> ids, std::uint64_t seed);

std::string encode_fold_plan(const FoldPlan& plan);
FoldPlan decode_fold_plan(std::string_view json_text);
FoldPlan read_fold_plan(const std::filesystem::path& path);

}  // namespace ecgrob
