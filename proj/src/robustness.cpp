// SPDX-License-Identifier: Apache-2.0
#include "ecgrob/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_map>

#include "ecgrob/errors.hpp"
#include "ecgrob/parallel.hpp"
#include "json.hpp"

namespace ecgrob {

using nlohmann::json;

namespace {

constexpr int kReportSchemaVersion = 1;

struct Task {
  ImageKind kind;
  Variant train_variant;
  std::size_t fold;
  std::vector<Variant> test_variants;
};

using IdIndex = std::unordered_map<std::string, const TransformImage*>;

std::vector<TransformImage> gather(const IdIndex& index, const std::vector<std::string>& ids) {
  std::vector<TransformImage> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(*index.at(id));
  return out;
}

std::vector<Label> labels_of(const std::vector<TransformImage>& images) {
  std::vector<Label> out;
  out.reserve(images.size());
  for (const auto& im : images) out.push_back(im.label);
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::string fmt(double mean, double sd) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f (%.3f)", mean, sd);
  return buf;
}

json class_array(const std::array<double, kNumClasses>& a) {
  json j = json::object();
  for (Label l : kAllLabels) j[std::string(to_string(l))] = a[class_index(l)];
  return j;
}

std::array<double, kNumClasses> parse_class_array(const json& j) {
  std::array<double, kNumClasses> a{};
  for (Label l : kAllLabels) a[class_index(l)] = j.at(std::string(to_string(l))).get<double>();
  return a;
}

json report_to_json(const RobustnessReport& report) {
  json cells = json::array();
  for (const auto& [key, cell] : report.cells) {
    json folds = json::array();
    for (const auto& f : cell.folds) {
      json cm = json::array();
      for (const auto& row : f.confusion.counts) cm.push_back(row);
      folds.push_back({{"macro_f1", f.macro_f1},
                       {"per_class_f1", class_array(f.class_f1)},
                       {"k", f.k},
                       {"confusion", cm}});
    }
    cells.push_back({{"train_variant", std::string(to_string(key.train))},
                     {"test_variant", std::string(to_string(key.test))},
                     {"image_kind", std::string(to_string(key.kind))},
                     {"macro_f1_mean", cell.macro_f1_mean},
                     {"macro_f1_std", cell.macro_f1_std},
                     {"per_class_f1_mean", class_array(cell.class_f1_mean)},
                     {"per_class_f1_std", class_array(cell.class_f1_std)},
                     {"folds", folds}});
  }
  return {{"mode", std::string(to_string(report.mode))},
          {"fold_seed", report.fold_seed},
          {"cells", cells}};
}

RobustnessReport report_from_json(const json& j) {
  RobustnessReport r;
  const auto mode = parse_matrix_mode(j.at("mode").get<std::string>());
  if (!mode) throw Error(ErrorCode::ParseError, "unknown report mode");
  r.mode = *mode;
  r.fold_seed = j.at("fold_seed").get<std::uint64_t>();
  for (const auto& c : j.at("cells")) {
    const auto train = parse_variant(c.at("train_variant").get<std::string>());
    const auto test = parse_variant(c.at("test_variant").get<std::string>());
    const auto kind = parse_image_kind(c.at("image_kind").get<std::string>());
    if (!train || !test || !kind) throw Error(ErrorCode::ParseError, "bad report cell key");
    CellResult cell;
    for (const auto& f : c.at("folds")) {
      FoldResult fr;
      fr.macro_f1 = f.at("macro_f1").get<double>();
      fr.class_f1 = parse_class_array(f.at("per_class_f1"));
      fr.k = f.at("k").get<std::size_t>();
      const auto cm = f.at("confusion");
      for (std::size_t a = 0; a < kNumClasses; ++a)
        for (std::size_t b = 0; b < kNumClasses; ++b)
          fr.confusion.counts[a][b] = cm.at(a).at(b).get<std::uint64_t>();
      cell.folds.push_back(fr);
    }
    cell.macro_f1_mean = c.at("macro_f1_mean").get<double>();
    cell.macro_f1_std = c.at("macro_f1_std").get<double>();
    cell.class_f1_mean = parse_class_array(c.at("per_class_f1_mean"));
    cell.class_f1_std = parse_class_array(c.at("per_class_f1_std"));
    r.cells[{*train, *test, *kind}] = std::move(cell);
  }
  return r;
}

}  // namespace

std::string_view to_string(MatrixMode mode) {
  switch (mode) {
    case MatrixMode::same: return "same";
    case MatrixMode::train_clean: return "train-clean";
    case MatrixMode::train_all: return "train-all";
  }
  return "?";
}

std::optional<MatrixMode> parse_matrix_mode(std::string_view text) {
  if (text == "same") return MatrixMode::same;
  if (text == "train-clean" || text == "train_clean") return MatrixMode::train_clean;
  if (text == "train-all" || text == "train_all") return MatrixMode::train_all;
  return std::nullopt;
}

const CellResult& RobustnessReport::at(Variant train, Variant test, ImageKind kind) const {
  const auto it = cells.find({train, test, kind});
  if (it == cells.end()) {
    throw Error(ErrorCode::InvalidArgument,
                "no report cell " + std::string(to_string(train)) + "->" +
                    std::string(to_string(test)) + " " + std::string(to_string(kind)));
  }
  return it->second;
}

void summarize(CellResult& cell) {
  std::vector<double> macro;
  std::array<std::vector<double>, kNumClasses> per_class;
  for (const auto& f : cell.folds) {
    macro.push_back(f.macro_f1);
    for (std::size_t c = 0; c < kNumClasses; ++c) per_class[c].push_back(f.class_f1[c]);
  }
  cell.macro_f1_mean = mean_of(macro);
  cell.macro_f1_std = std_of(macro, cell.macro_f1_mean);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    cell.class_f1_mean[c] = mean_of(per_class[c]);
    cell.class_f1_std[c] = std_of(per_class[c], cell.class_f1_mean[c]);
  }
}

RobustnessReport run_matrix(const FoldPlan& plan, const ImageDatasets& datasets,
                            std::span<const ImageKind> kinds, MatrixMode mode,
                            const ClassifierOptions& options) {
  std::map<std::string, Label> plan_labels;
  for (const auto& e : plan.ids) plan_labels[e.id] = e.label;

  // Per (variant, kind): id -> image, checked against the plan.
  std::map<std::pair<Variant, ImageKind>, IdIndex> index;
  for (ImageKind kind : kinds) {
    bool any = false;
    for (Variant v : kAllVariants) {
      const auto it = datasets.find({v, kind});
      if (it == datasets.end()) continue;
      any = true;
      IdIndex& idx = index[{v, kind}];
      for (const auto& im : it->second) {
        const auto pl = plan_labels.find(im.source_id);
        if (pl == plan_labels.end()) {
          throw Error(ErrorCode::IdMismatch,
                      "image not in fold plan (" + std::string(to_string(v)) + ")", im.source_id);
        }
        if (pl->second != im.label) {
          throw Error(ErrorCode::IdMismatch, "image label disagrees with fold plan", im.source_id);
        }
        if (!idx.emplace(im.source_id, &im).second) {
          throw Error(ErrorCode::IdMismatch, "duplicate image id", im.source_id);
        }
      }
      if (idx.size() != plan_labels.size()) {
        for (const auto& [id, label] : plan_labels) {
          if (!idx.count(id)) {
            throw Error(ErrorCode::IdMismatch,
                        "fold plan id missing from " + std::string(to_string(v)) + " " +
                            std::string(to_string(kind)) + " images",
                        id);
          }
        }
      }
    }
    if (!any) {
      throw Error(ErrorCode::InvalidArgument, "no images of kind " + std::string(to_string(kind)));
    }
  }

  std::vector<Task> tasks;
  for (ImageKind kind : kinds) {
    std::vector<Variant> present;
    for (Variant v : kAllVariants)
      if (index.count({v, kind})) present.push_back(v);
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
      if (mode == MatrixMode::same) {
        for (Variant v : present) tasks.push_back({kind, v, f, {v}});
      } else {
        const Variant train = mode == MatrixMode::train_clean ? Variant::clean : Variant::all;
        if (!index.count({train, kind})) {
          throw Error(ErrorCode::InvalidArgument,
                      "mode " + std::string(to_string(mode)) + " needs " +
                          std::string(to_string(train)) + " " + std::string(to_string(kind)) +
                          " images");
        }
        tasks.push_back({kind, train, f, present});
      }
    }
  }

  std::vector<std::vector<FoldResult>> results(tasks.size());
  parallel_for(tasks.size(), [&](std::size_t t) {
    const Task& task = tasks[t];
    const Fold& fold = plan.folds[task.fold];
    const IdIndex& train_idx = index.at({task.train_variant, task.kind});
    const auto train_images = gather(train_idx, fold.train);
    const auto val_images = gather(train_idx, fold.validation);
    const auto model = train_baseline(train_images, labels_of(train_images), val_images,
                                      labels_of(val_images), options);
    for (Variant test : task.test_variants) {
      const auto test_images = gather(index.at({test, task.kind}), fold.test);
      const auto predicted = predict(model, test_images);
      FoldResult r;
      r.confusion = confusion_from_labels(labels_of(test_images), predicted);
      const auto m = per_class_metrics(r.confusion);
      for (std::size_t c = 0; c < kNumClasses; ++c) r.class_f1[c] = m[c].f1;
      r.macro_f1 = macro_f1(r.confusion);
      r.k = model.k;
      results[t].push_back(r);
    }
  });

  RobustnessReport report;
  report.mode = mode;
  report.fold_seed = plan.seed;
  // Tasks are ordered by fold within each key, so folds land in order.
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    for (std::size_t i = 0; i < tasks[t].test_variants.size(); ++i) {
      report.cells[{tasks[t].train_variant, tasks[t].test_variants[i], tasks[t].kind}]
          .folds.push_back(results[t][i]);
    }
  }
  for (auto& [key, cell] : report.cells) summarize(cell);
  return report;
}

std::string encode_report(const RobustnessReport& report) {
  json j = report_to_json(report);
  j["schema_version"] = kReportSchemaVersion;
  return j.dump(1) + "\n";
}

RobustnessReport decode_report(std::string_view json_text) {
  const auto all = decode_reports(json_text);
  if (all.size() != 1) throw Error(ErrorCode::ParseError, "expected a single report");
  return all.front();
}

std::string encode_report_bundle(std::span<const RobustnessReport> reports) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r));
  j["reports"] = arr;
  return j.dump(1) + "\n";
}

std::vector<RobustnessReport> decode_reports(std::string_view json_text) {
  try {
    const json j = json::parse(json_text);
    if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
      throw Error(ErrorCode::ParseError, "unsupported report schema version");
    }
    std::vector<RobustnessReport> out;
    if (j.contains("reports")) {
      for (const auto& r : j.at("reports")) out.push_back(report_from_json(r));
    } else {
      out.push_back(report_from_json(j));
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("report: ") + e.what());
  }
}

std::string render_table(const RobustnessReport& report) {
  std::set<Variant> trains;
  std::set<Variant> tests;
  std::set<ImageKind> kinds;
  for (const auto& [key, cell] : report.cells) {
    trains.insert(key.train);
    tests.insert(key.test);
    kinds.insert(key.kind);
  }

  std::string out;
  const auto emit_block = [&](const std::string& title, const std::optional<Variant>& train) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{title};
    for (Variant v : tests) header.emplace_back(to_string(v));
    rows.push_back(header);
    for (int metric = -1; metric < static_cast<int>(kNumClasses); ++metric) {
      for (ImageKind kind : kinds) {
        std::vector<std::string> row;
        row.push_back(std::string(to_string(kind)) +
                      (metric < 0 ? "" : " " + std::string(to_string(kAllLabels[metric]))));
        for (Variant v : tests) {
          const auto it = report.cells.find({train ? *train : v, v, kind});
          if (it == report.cells.end()) { row.emplace_back("-"); continue; }
          const auto& c = it->second;
          row.push_back(metric < 0 ? fmt(c.macro_f1_mean, c.macro_f1_std)
                                   : fmt(c.class_f1_mean[metric], c.class_f1_std[metric]));
        }
        rows.push_back(row);
      }
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& r : rows)
      for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    for (const auto& r : rows) {
      std::string line;
      for (std::size_t i = 0; i < r.size(); ++i) {
        std::string cell = r[i];
        cell.resize(width[i], ' ');
        line += cell;
        if (i + 1 < r.size()) line += "  ";
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      out += line + "\n";
    }
    out += "\n";
  };

  if (report.mode == MatrixMode::same) {
    emit_block("same train/test F1", std::nullopt);
  } else {
    for (Variant t : trains) emit_block("train " + std::string(to_string(t)) + " F1", t);
  }
  return out;
}

}  // namespace ecgrob
