// SPDX-License-Identifier: Apache-2.0
#include "ecgrob/folds.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "ecgrob/errors.hpp"
#include "json.hpp"

namespace ecgrob {

using nlohmann::json;

namespace {

constexpr int kFoldSchemaVersion = 1;

}  // namespace

FoldPlan make_folds(std::span<const LabeledId> ids, std::uint64_t seed) {
  std::array<std::vector<std::string>, kNumClasses> by_class;
  std::set<std::string> seen;
  for (const auto& e : ids) {
    if (!seen.insert(e.id).second) throw Error(ErrorCode::InvariantViolation, "duplicate id", e.id);
    by_class[class_index(e.label)].push_back(e.id);
  }
  for (Label l : kAllLabels) {
    if (by_class[class_index(l)].size() < kMinRecordsPerClass) {
      throw Error(ErrorCode::TooFewRecords,
                  "class " + std::string(to_string(l)) + " has " +
                      std::to_string(by_class[class_index(l)].size()) + " records, need " +
                      std::to_string(kMinRecordsPerClass));
    }
  }

  FoldPlan plan;
  plan.seed = seed;
  plan.folds.resize(kFoldCount);
  for (const auto& e : ids) plan.ids.push_back(e);
  std::sort(plan.ids.begin(), plan.ids.end(),
            [](const LabeledId& a, const LabeledId& b) { return a.id < b.id; });

  // Shuffle within class (after sorting, so input order does not matter),
  // then deal positions round-robin across the concatenated class lists.
  std::mt19937_64 rng(substream_seed(seed, "folds/test"));
  std::array<std::array<std::vector<std::string>, kNumClasses>, kFoldCount> test_by_class;
  std::size_t position = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    auto& members = by_class[c];
    std::sort(members.begin(), members.end());
    std::shuffle(members.begin(), members.end(), rng);
    for (const auto& id : members) test_by_class[position++ % kFoldCount][c].push_back(id);
  }

  for (std::size_t f = 0; f < kFoldCount; ++f) {
    Fold& fold = plan.folds[f];
    std::mt19937_64 val_rng(substream_seed(seed, "folds/validation/" + std::to_string(f)));
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      const auto& test_ids = test_by_class[f][c];
      const std::set<std::string> in_test(test_ids.begin(), test_ids.end());
      std::vector<std::string> rest;
      for (const auto& id : by_class[c])
        if (!in_test.count(id)) rest.push_back(id);

      // Pick the validation count nearest 5% whose complement keeps the
      // train count within one record of 75% as well.
      const double n = static_cast<double>(by_class[c].size());
      const double q_val = kValidationFraction * n;
      const double excess = static_cast<double>(test_ids.size()) - kTestFraction * n;
      const double lo = std::max(q_val - 1.0, q_val - excess - 1.0);
      const double hi = std::min(q_val + 1.0, q_val - excess + 1.0);
      double v = std::round(q_val);
      v = std::clamp(v, std::ceil(lo), std::floor(hi));
      const auto val_count = std::min(rest.size(), static_cast<std::size_t>(std::max(0.0, v)));

      std::shuffle(rest.begin(), rest.end(), val_rng);
      fold.validation.insert(fold.validation.end(), rest.begin(),
                             rest.begin() + static_cast<std::ptrdiff_t>(val_count));
      fold.train.insert(fold.train.end(), rest.begin() + static_cast<std::ptrdiff_t>(val_count),
                        rest.end());
      fold.test.insert(fold.test.end(), test_ids.begin(), test_ids.end());
    }
    std::sort(fold.train.begin(), fold.train.end());
    std::sort(fold.validation.begin(), fold.validation.end());
    std::sort(fold.test.begin(), fold.test.end());
  }
  return plan;
}

std::string encode_fold_plan(const FoldPlan& plan) {
  json j;
  j["schema_version"] = kFoldSchemaVersion;
  j["seed"] = plan.seed;
  json labels = json::object();
  for (const auto& e : plan.ids) labels[e.id] = std::string(to_string(e.label));
  j["labels"] = labels;
  json folds = json::array();
  for (const auto& f : plan.folds) {
    folds.push_back({{"train", f.train}, {"validation", f.validation}, {"test", f.test}});
  }
  j["folds"] = folds;
  return j.dump(1) + "\n";
}

FoldPlan decode_fold_plan(std::string_view json_text) {
  FoldPlan plan;
  try {
    const json j = json::parse(json_text);
    if (j.at("schema_version").get<int>() != kFoldSchemaVersion) {
      throw Error(ErrorCode::ParseError, "unsupported fold plan schema version");
    }
    plan.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [id, label] : j.at("labels").items()) {
      const auto l = parse_label(label.get<std::string>());
      if (!l) throw Error(ErrorCode::ParseError, "bad label in fold plan", id);
      plan.ids.push_back({id, *l});
    }
    for (const auto& f : j.at("folds")) {
      plan.folds.push_back({f.at("train").get<std::vector<std::string>>(),
                            f.at("validation").get<std::vector<std::string>>(),
                            f.at("test").get<std::vector<std::string>>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("fold plan: ") + e.what());
  }
  if (plan.folds.size() != kFoldCount) throw Error(ErrorCode::ParseError, "fold plan needs 5 folds");
  return plan;
}

FoldPlan read_fold_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open fold plan " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return decode_fold_plan(ss.str());
}

}  // namespace ecgrob
