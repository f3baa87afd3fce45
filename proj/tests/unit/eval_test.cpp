// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "ecgrob/classifier.hpp"
#include "ecgrob/errors.hpp"
#include "ecgrob/folds.hpp"
#include "ecgrob/metrics.hpp"
#include "ecgrob/robustness.hpp"

using namespace ecgrob;

namespace {

std::vector<LabeledId> balanced_ids(std::size_t per_class) {
  std::vector<LabeledId> ids;
  for (Label l : kAllLabels)
    for (std::size_t i = 0; i < per_class; ++i) ids.push_back({std::string(to_string(l)) + "_" + std::to_string(i), l});
  return ids;
}

std::vector<LabeledId> counted_ids(std::array<std::size_t, kNumClasses> counts) {
  std::vector<LabeledId> ids;
  for (Label l : kAllLabels)
    for (std::size_t i = 0; i < counts[class_index(l)]; ++i)
      ids.push_back({std::string(to_string(l)) + "_" + std::to_string(i), l});
  return ids;
}

void expect_plan_invariants(const FoldPlan& plan, std::span<const LabeledId> ids) {
  std::map<std::string, Label> label_of;
  std::array<double, kNumClasses> n{};
  for (const auto& e : ids) {
    label_of[e.id] = e.label;
    n[class_index(e.label)] += 1.0;
  }
  ASSERT_EQ(plan.folds.size(), kFoldCount);
  std::multiset<std::string> tested;
  for (const auto& fold : plan.folds) {
    std::set<std::string> all;
    for (const auto* part : {&fold.train, &fold.validation, &fold.test})
      for (const auto& id : *part) EXPECT_TRUE(all.insert(id).second) << "overlap " << id;
    EXPECT_EQ(all.size(), ids.size());
    tested.insert(fold.test.begin(), fold.test.end());
    const std::array<std::pair<const std::vector<std::string>*, double>, 3> parts{
        {{&fold.train, kTrainFraction}, {&fold.validation, kValidationFraction}, {&fold.test, kTestFraction}}};
    for (const auto& [part, frac] : parts) {
      std::array<double, kNumClasses> got{};
      for (const auto& id : *part) got[class_index(label_of.at(id))] += 1.0;
      for (std::size_t c = 0; c < kNumClasses; ++c) EXPECT_LE(std::abs(got[c] - frac * n[c]), 1.0 + 1e-9);
    }
  }
  EXPECT_EQ(tested.size(), ids.size());
  EXPECT_EQ(std::set<std::string>(tested.begin(), tested.end()).size(), ids.size());
}

// Metrics straight from (truth, prediction) pairs.
struct OracleMetrics {
  std::array<double, kNumClasses> f1{};
  double macro = 0.0;
};

OracleMetrics oracle(const std::vector<std::pair<Label, Label>>& pairs) {
  OracleMetrics m;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const Label l = kAllLabels[c];
    double tp = 0, predicted = 0, actual = 0;
    for (const auto& [t, p] : pairs) {
      tp += (t == l && p == l);
      predicted += (p == l);
      actual += (t == l);
    }
    const double prec = predicted > 0 ? tp / predicted : 0.0;
    const double rec = actual > 0 ? tp / actual : 0.0;
    m.f1[c] = prec + rec > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
  }
  m.macro = (m.f1[0] + m.f1[1] + m.f1[2]) / 3.0;
  return m;
}

// Image of class c: a bright 30x30 block at a class-specific position plus noise.
TransformImage cluster_image(Label label, std::uint64_t seed, const std::string& id = "") {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> noise(0.0, 0.1);
  TransformImage im;
  im.label = label;
  im.source_id = id;
  const std::size_t off = 20 + 45 * class_index(label);
  for (auto& v : im.pixels) v = noise(rng);
  for (std::size_t r = off; r < off + 30; ++r)
    for (std::size_t c = off; c < off + 30; ++c) im.at(r, c) = 0.9 + noise(rng);
  return im;
}

}  // namespace

TEST(Folds, BalancedHundred) {
  const auto ids = balanced_ids(34);  // 102 ids
  const auto plan = make_folds(ids, 3);
  expect_plan_invariants(plan, ids);
  const auto hundred = counted_ids({34, 33, 33});
  const auto p100 = make_folds(hundred, 11);
  for (const auto& f : p100.folds) EXPECT_EQ(f.test.size(), 20u);
  expect_plan_invariants(p100, hundred);
}

TEST(Folds, DeterministicPerSeed) {
  const auto ids = balanced_ids(25);
  EXPECT_EQ(encode_fold_plan(make_folds(ids, 5)), encode_fold_plan(make_folds(ids, 5)));
  EXPECT_NE(encode_fold_plan(make_folds(ids, 5)), encode_fold_plan(make_folds(ids, 6)));
  auto reversed = ids;
  std::reverse(reversed.begin(), reversed.end());
  EXPECT_EQ(encode_fold_plan(make_folds(reversed, 5)), encode_fold_plan(make_folds(ids, 5)));
}

TEST(Folds, StudySizedCorpus) {
  const auto ids = counted_ids({976, 918, 784});
  ASSERT_EQ(ids.size(), 2678u);
  const auto plan = make_folds(ids, 2024);
  expect_plan_invariants(plan, ids);
  for (const auto& f : plan.folds) {
    EXPECT_NEAR(static_cast<double>(f.test.size()), 535.6, 3.0);
    EXPECT_NEAR(static_cast<double>(f.validation.size()), 133.9, 3.0);
    EXPECT_NEAR(static_cast<double>(f.train.size()), 2008.5, 4.0);
  }
}

TEST(Folds, PartitionPropertyOverSeedsAndSizes) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (std::array<std::size_t, 3> counts : {std::array<std::size_t, 3>{20, 20, 20}, {21, 37, 58}, {99, 20, 43}}) {
      const auto ids = counted_ids(counts);
      expect_plan_invariants(make_folds(ids, seed), ids);
    }
  }
}

TEST(Folds, TooFewAndDuplicates) {
  try {
    make_folds(counted_ids({20, 19, 30}), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewRecords);
  }
  auto ids = balanced_ids(20);
  ids.push_back(ids.front());
  EXPECT_THROW(make_folds(ids, 1), Error);
}

TEST(Folds, JsonRoundTrip) {
  const auto plan = make_folds(counted_ids({22, 31, 40}), 77);
  const auto text = encode_fold_plan(plan);
  const auto back = decode_fold_plan(text);
  EXPECT_EQ(encode_fold_plan(back), text);
  EXPECT_EQ(back.seed, 77u);
  ASSERT_EQ(back.ids.size(), 93u);
  EXPECT_THROW(decode_fold_plan("{\"schema_version\": 99}"), Error);
  EXPECT_THROW(decode_fold_plan("not json"), Error);
}

TEST(Metrics, Examples) {
  ConfusionMatrix diag;
  for (Label l : kAllLabels)
    for (int i = 0; i < 4; ++i) diag.add(l, l);
  for (const auto& m : per_class_metrics(diag)) {
    EXPECT_EQ(m.precision, 1.0);
    EXPECT_EQ(m.recall, 1.0);
    EXPECT_EQ(m.f1, 1.0);
  }
  EXPECT_EQ(macro_f1(diag), 1.0);

  ConfusionMatrix all_af;
  for (Label l : kAllLabels)
    for (int i = 0; i < 10; ++i) all_af.add(l, Label::AF);
  const auto m = per_class_metrics(all_af);
  EXPECT_DOUBLE_EQ(m[0].precision, 1.0 / 3.0);
  EXPECT_EQ(m[0].recall, 1.0);
  EXPECT_DOUBLE_EQ(m[0].f1, 0.5);
  EXPECT_EQ(m[1].f1, 0.0);
  EXPECT_TRUE(m[1].degenerate);
  EXPECT_EQ(m[2].f1, 0.0);
  EXPECT_DOUBLE_EQ(macro_f1(all_af), 1.0 / 6.0);

  EXPECT_DOUBLE_EQ(f1_from_precision_recall(0.6, 0.6), 0.6);
  EXPECT_EQ(f1_from_precision_recall(0.0, 0.0), 0.0);
  EXPECT_EQ(macro_f1(ConfusionMatrix{}), 0.0);
}

TEST(Metrics, MatchBruteForceOnRandomMatrices) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> count(0, 10000);
  std::uniform_int_distribution<int> sparse(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<Label, Label>> pairs;
    for (Label t : kAllLabels) {
      for (Label p : kAllLabels) {
        const int n = sparse(rng) == 0 ? 0 : count(rng) / (trial % 7 + 1);
        for (int i = 0; i < n; ++i) pairs.emplace_back(t, p);
      }
    }
    std::shuffle(pairs.begin(), pairs.end(), rng);
    std::vector<Label> truth, pred;
    for (const auto& [t, p] : pairs) {
      truth.push_back(t);
      pred.push_back(p);
    }
    const auto cm = confusion_from_labels(truth, pred);
    const auto expected = oracle(pairs);
    const auto got = per_class_metrics(cm);
    for (std::size_t c = 0; c < kNumClasses; ++c) ASSERT_EQ(got[c].f1, expected.f1[c]) << trial;
    ASSERT_EQ(macro_f1(cm), expected.macro);
    ASSERT_EQ(cm.total(), pairs.size());
  }
  EXPECT_THROW(confusion_from_labels(std::vector<Label>{Label::AF}, std::vector<Label>{}), Error);
}

TEST(Classifier, SeparableClusters) {
  std::vector<TransformImage> train, val;
  std::vector<Label> train_labels, val_labels;
  for (Label l : kAllLabels) {
    for (std::uint64_t i = 0; i < 12; ++i) {
      train.push_back(cluster_image(l, 100 * class_index(l) + i));
      train_labels.push_back(l);
    }
    val.push_back(cluster_image(l, 9000 + class_index(l)));
    val_labels.push_back(l);
  }
  const auto model = train_baseline(train, train_labels, val, val_labels);
  EXPECT_EQ(model.k, 15u);  // every k scores 1, ties go to the larger k
  EXPECT_FALSE(model.degenerate_features);
  const auto pred = predict(model, std::span<const TransformImage>(train));
  EXPECT_EQ(macro_f1(confusion_from_labels(train_labels, pred)), 1.0);

  ClassifierOptions cosine;
  cosine.metric = DistanceMetric::cosine;
  const auto cmodel = train_baseline(train, train_labels, val, val_labels, cosine);
  EXPECT_EQ(macro_f1(confusion_from_labels(train_labels, predict(cmodel, std::span<const TransformImage>(train)))), 1.0);
}

TEST(Classifier, IdenticalImagesAreDegenerate) {
  TransformImage same;
  for (std::size_t i = 0; i < same.pixels.size(); ++i) same.pixels[i] = static_cast<double>(i % 7) / 7.0;
  std::vector<TransformImage> train(30, same), val(30, same);
  std::vector<Label> labels;
  for (int i = 0; i < 30; ++i) labels.push_back(kAllLabels[i % 3]);
  const auto model = train_baseline(train, labels, val, labels);
  EXPECT_TRUE(model.degenerate_features);
  EXPECT_EQ(model.dropped_features, kFeatureCount);
  for (double f1 : model.validation_macro_f1) EXPECT_LE(f1, 0.45);
}

TEST(Classifier, DeterministicAndChecked) {
  std::vector<TransformImage> train;
  std::vector<Label> labels;
  for (std::uint64_t i = 0; i < 30; ++i) {
    const Label l = kAllLabels[i % 3];
    auto im = cluster_image(l, i);
    for (std::size_t p = 0; p < im.pixels.size(); p += 13) im.pixels[p] = static_cast<double>((i * p) % 5) / 5.0;
    train.push_back(im);
    labels.push_back(l);
  }
  const auto a = train_baseline(train, labels, train, labels);
  const auto b = train_baseline(train, labels, train, labels);
  EXPECT_EQ(a.k, b.k);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.centroids, b.centroids);
  EXPECT_EQ(predict(a, std::span<const TransformImage>(train)), predict(b, std::span<const TransformImage>(train)));

  std::vector<Label> no_std(labels.size(), Label::AF);
  for (std::size_t i = 0; i < no_std.size(); i += 2) no_std[i] = Label::Normal;
  try {
    train_baseline(train, no_std, train, no_std);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingClass);
  }
  EXPECT_THROW(train_baseline(train, std::span<const Label>(labels).first(5), train, labels), Error);
}

TEST(Classifier, PoolingAverages) {
  TransformImage im;
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 5; ++c) im.at(r, c) = static_cast<double>(r * 5 + c);
  const auto f = pooled_features(im);
  ASSERT_EQ(f.size(), kFeatureCount);
  EXPECT_DOUBLE_EQ(f[0], 12.0);
  EXPECT_EQ(f[1], 0.0);
}

namespace {

struct Corpus {
  FoldPlan plan;
  ImageDatasets datasets;
};

Corpus separable_corpus(std::size_t per_class, std::initializer_list<Variant> variants) {
  Corpus c;
  const auto ids = balanced_ids(per_class);
  c.plan = make_folds(ids, 9);
  for (Variant v : variants) {
    for (ImageKind kind : {ImageKind::attractor, ImageKind::scalogram}) {
      auto& images = c.datasets[{v, kind}];
      for (const auto& e : ids) {
        auto im = cluster_image(e.label, stable_hash(e.id) + static_cast<std::uint64_t>(v), e.id);
        im.kind = kind;
        im.variant = v;
        images.push_back(std::move(im));
      }
    }
  }
  return c;
}

}  // namespace

TEST(RunMatrix, SeparableDataIsPerfect) {
  const auto c = separable_corpus(20, {Variant::clean});
  const std::vector<ImageKind> kinds{ImageKind::attractor};
  const auto report = run_matrix(c.plan, c.datasets, kinds, MatrixMode::same);
  ASSERT_EQ(report.cells.size(), 1u);
  const auto& cell = report.at(Variant::clean, Variant::clean, ImageKind::attractor);
  EXPECT_EQ(cell.macro_f1_mean, 1.0);
  EXPECT_EQ(cell.macro_f1_std, 0.0);
  ASSERT_EQ(cell.folds.size(), kFoldCount);
  for (const auto& f : cell.folds) {
    for (std::size_t cls = 0; cls < kNumClasses; ++cls) EXPECT_EQ(f.confusion.row_sum(cls), 4u);
  }
}

TEST(RunMatrix, CellCountsPerMode) {
  const auto c = separable_corpus(20, {Variant::clean, Variant::bw, Variant::em, Variant::ma, Variant::all});
  const std::vector<ImageKind> kinds{ImageKind::attractor, ImageKind::scalogram};
  for (MatrixMode mode : {MatrixMode::same, MatrixMode::train_clean, MatrixMode::train_all}) {
    const auto report = run_matrix(c.plan, c.datasets, kinds, mode);
    EXPECT_EQ(report.cells.size(), 10u) << to_string(mode);
    for (const auto& [key, cell] : report.cells) {
      const Variant expected_train = mode == MatrixMode::same          ? key.test
                                     : mode == MatrixMode::train_clean ? Variant::clean
                                                                       : Variant::all;
      EXPECT_EQ(key.train, expected_train);
      EXPECT_GE(cell.macro_f1_std, 0.0);
      EXPECT_GE(cell.macro_f1_mean, 0.0);
      EXPECT_LE(cell.macro_f1_mean, 1.0);
    }
  }
  const auto a = encode_report(run_matrix(c.plan, c.datasets, kinds, MatrixMode::train_all));
  const auto b = encode_report(run_matrix(c.plan, c.datasets, kinds, MatrixMode::train_all));
  EXPECT_EQ(a, b);
}

TEST(RunMatrix, IdMismatch) {
  auto c = separable_corpus(20, {Variant::clean, Variant::all});
  const std::vector<ImageKind> kinds{ImageKind::attractor};
  auto missing = c.datasets;
  missing[{Variant::all, ImageKind::attractor}].pop_back();
  try {
    run_matrix(c.plan, missing, kinds, MatrixMode::train_clean);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IdMismatch);
    EXPECT_FALSE(e.record_id().empty());
  }
  auto stranger = c.datasets;
  stranger[{Variant::clean, ImageKind::attractor}][0].source_id = "nobody";
  try {
    run_matrix(c.plan, stranger, kinds, MatrixMode::same);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IdMismatch);
    EXPECT_EQ(e.record_id(), "nobody");
  }
  auto relabelled = c.datasets;
  auto& first = relabelled[{Variant::clean, ImageKind::attractor}][0];
  first.label = first.label == Label::AF ? Label::STD : Label::AF;
  EXPECT_THROW(run_matrix(c.plan, relabelled, kinds, MatrixMode::same), Error);
}

TEST(RunMatrix, SampleStdAcrossFolds) {
  CellResult cell;
  for (double v : {0.5, 0.6, 0.7, 0.8, 0.9}) {
    FoldResult f;
    f.macro_f1 = v;
    f.class_f1 = {v, 1.0, 0.0};
    cell.folds.push_back(f);
  }
  summarize(cell);
  EXPECT_NEAR(cell.macro_f1_mean, 0.7, 1e-15);
  EXPECT_NEAR(cell.macro_f1_std, std::sqrt(0.025), 1e-15);
  EXPECT_EQ(cell.class_f1_std[1], 0.0);
}

TEST(Report, JsonAndTableRoundTrip) {
  const auto c = separable_corpus(20, {Variant::clean, Variant::all});
  const std::vector<ImageKind> kinds{ImageKind::attractor, ImageKind::scalogram};
  const auto report = run_matrix(c.plan, c.datasets, kinds, MatrixMode::train_clean);
  const auto text = encode_report(report);
  const auto back = decode_report(text);
  EXPECT_EQ(encode_report(back), text);
  EXPECT_EQ(render_table(back), render_table(report));
  EXPECT_EQ(back.mode, MatrixMode::train_clean);
  EXPECT_EQ(back.fold_seed, 9u);

  const std::vector<RobustnessReport> two{report, run_matrix(c.plan, c.datasets, kinds, MatrixMode::same)};
  const auto bundle = decode_reports(encode_report_bundle(two));
  ASSERT_EQ(bundle.size(), 2u);
  EXPECT_EQ(encode_report(bundle[1]), encode_report(two[1]));

  const auto table = render_table(report);
  EXPECT_NE(table.find("attractor"), std::string::npos);
  EXPECT_NE(table.find("scalogram"), std::string::npos);
  EXPECT_NE(table.find("1.000 (0.000)"), std::string::npos);
  EXPECT_THROW(decode_report("{\"schema_version\": 2}"), Error);

  EXPECT_EQ(parse_matrix_mode("train-all"), MatrixMode::train_all);
  EXPECT_EQ(parse_matrix_mode("train_clean"), MatrixMode::train_clean);
  EXPECT_FALSE(parse_matrix_mode("sideways").has_value());
}
