// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "ecgrob/errors.hpp"
#include "ecgrob/folds.hpp"
#include "ecgrob/io_util.hpp"
#include "ecgrob/manifest.hpp"
#include "ecgrob/noise_forge.hpp"
#include "ecgrob/parallel.hpp"
#include "ecgrob/robustness.hpp"
#include "ecgrob/synth.hpp"
#include "json.hpp"

namespace ecgrob::cli {

using nlohmann::json;

namespace {

constexpr int kConfigSchemaVersion = 1;

void write_config(const fs::path& path, const std::string& subcommand, json config) {
  config["schema_version"] = kConfigSchemaVersion;
  config["subcommand"] = subcommand;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_file_atomic(path, config.dump(1) + "\n");
}

fs::path sidecar_for_file(const fs::path& out) { return fs::path(out.string() + ".config.json"); }
fs::path sidecar_for_dir(const fs::path& dir) { return dir / "config.json"; }

std::string format_name(SignalFormat f) {
  switch (f) {
    case SignalFormat::csv: return "csv";
    case SignalFormat::binary_f32: return "f32";
    case SignalFormat::binary_f64: return "f64";
  }
  return "?";
}

json filter_json(const FilterSpec& s) {
  return {{"lowpass_hz", s.lowpass_hz},   {"highpass_hz", s.highpass_hz},
          {"notch_low_hz", s.notch_low_hz}, {"notch_high_hz", s.notch_high_hz},
          {"order", s.filter_order},      {"zero_phase", s.zero_phase}};
}

std::vector<fs::path> find_image_manifests(const fs::path& root) {
  if (!fs::is_directory(root)) throw Error(ErrorCode::MissingFile, "no image directory " + root.string());
  std::vector<fs::path> found;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && e.path().filename() == kManifestFileName) found.push_back(e.path());
  }
  std::sort(found.begin(), found.end());
  if (found.empty()) throw Error(ErrorCode::MissingFile, "no image manifests under " + root.string());
  return found;
}

}  // namespace

std::pair<double, double> parse_range(const std::string& text, const std::string& flag) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw UsageError(flag + " expects LOW:HIGH, got '" + text + "'");
  try {
    std::size_t p0 = 0, p1 = 0;
    const double a = std::stod(parts[0], &p0);
    const double b = std::stod(parts[1], &p1);
    if (p0 != parts[0].size() || p1 != parts[1].size()) throw std::invalid_argument("trailing");
    return {a, b};
  } catch (const std::exception&) {
    throw UsageError(flag + " expects LOW:HIGH, got '" + text + "'");
  }
}

SignalFormat parse_signal_format(const std::string& text) {
  if (text == "csv") return SignalFormat::csv;
  if (text == "f32") return SignalFormat::binary_f32;
  if (text == "f64") return SignalFormat::binary_f64;
  throw UsageError("--format must be csv, f32 or f64");
}

void cmd_synth_corpus(const SynthCorpusArgs& args, std::ostream& out) {
  const auto records = synth_corpus(args.n_per_class, args.fs, args.duration_s, args.seed, args.artefacts);
  const auto manifest = write_dataset(records, args.out, Variant::raw, args.format);
  write_config(sidecar_for_dir(args.out), "synth-corpus",
               {{"n_per_class", args.n_per_class},
                {"fs", args.fs},
                {"duration_s", args.duration_s},
                {"seed", args.seed},
                {"artefacts", args.artefacts},
                {"format", format_name(args.format)},
                {"records", manifest.entries.size()}});
  out << "wrote " << manifest.entries.size() << " raw records to " << args.out.string() << "\n";
}

void cmd_clean(const CleanArgs& args, std::ostream& out) {
  LoadOptions opts;
  if (args.strict_duration) opts.bounds = DurationBounds::strict();
  const auto raw = load_dataset(args.manifest, opts);
  for (const auto& r : raw) args.filter.validate(r.fs);
  std::vector<EcgRecord> cleaned(raw.size());
  parallel_for(raw.size(), [&](std::size_t i) { cleaned[i] = clean_pipeline(raw[i], args.filter); });
  const auto manifest = write_dataset(cleaned, args.out, Variant::clean, args.format);
  write_config(sidecar_for_dir(args.out), "clean",
               {{"manifest", args.manifest.string()},
                {"filter", filter_json(args.filter)},
                {"strict_duration", args.strict_duration},
                {"format", format_name(args.format)},
                {"records", manifest.entries.size()}});
  out << "cleaned " << manifest.entries.size() << " records into " << args.out.string() << "\n";
}

void cmd_add_noise(const AddNoiseArgs& args, std::ostream& out) {
  SnrPolicy policy{args.snr_min, args.snr_max, args.seed};
  policy.validate();
  LoadOptions opts;
  opts.required_lead = args.lead;
  std::vector<std::string> rejected;
  const auto clean = load_dataset(args.manifest, opts, &rejected);
  if (clean.empty()) throw Error(ErrorCode::EmptySignal, "no usable records in " + args.manifest.string());
  const double fs = clean.front().fs;
  for (const auto& r : clean) {
    if (r.fs != fs) throw Error(ErrorCode::InvariantViolation, "records must share one sampling rate", r.id);
  }
  const NoiseBank bank = args.noise_bank
                             ? load_noise_bank(*args.noise_bank, fs)
                             : synth_noise_bank(args.bank_duration_s, fs, substream_seed(args.seed, "bank"));
  NoiseOptions nopts;
  nopts.lead = args.lead;
  nopts.per_lead_windows = args.per_lead_windows;

  std::vector<NoisyRecords> noisy(clean.size());
  parallel_for(clean.size(), [&](std::size_t i) {
    try {
      noisy[i] = apply_noise(clean[i], bank, policy, nopts);
    } catch (const Error& e) {
      throw e.with_context("add-noise", clean[i].id);
    }
  });

  std::ostringstream log;
  log << "id,offset,snr_db,scale\n";
  log.precision(17);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    log << clean[i].id << ',' << noisy[i].offsets.front() << ',' << noisy[i].snr_db << ','
        << noisy[i].scale << '\n';
  }
  for (std::size_t v = 0; v < kNoiseVariants.size(); ++v) {
    std::vector<EcgRecord> recs;
    recs.reserve(noisy.size());
    for (auto& n : noisy) recs.push_back(std::move(n.variants[v]));
    write_dataset(recs, args.out / std::string(to_string(kNoiseVariants[v])), kNoiseVariants[v], args.format);
  }
  write_file_atomic(args.out / "noise_log.csv", log.str());
  write_config(sidecar_for_dir(args.out), "add-noise",
               {{"manifest", args.manifest.string()},
                {"snr_db", {args.snr_min, args.snr_max}},
                {"seed", args.seed},
                {"noise_bank", args.noise_bank ? args.noise_bank->string() : std::string("synthetic")},
                {"bank_duration_s", bank.total_duration_s()},
                {"lead", args.lead},
                {"per_lead_windows", args.per_lead_windows},
                {"format", format_name(args.format)},
                {"records", clean.size()},
                {"skipped_missing_lead", rejected}});
  out << "added noise to " << clean.size() << " records";
  if (!rejected.empty()) out << " (" << rejected.size() << " skipped: no lead " << args.lead << ")";
  out << "\n";
}

void cmd_transform(const TransformArgs& args, std::ostream& out) {
  LoadOptions opts;
  opts.required_lead = args.lead;
  std::vector<std::string> rejected;
  const auto records = load_dataset(args.manifest, opts, &rejected);
  std::vector<TransformImage> images(records.size());
  std::vector<SparResult> spar(args.kind == ImageKind::attractor ? records.size() : 0);
  SparConfig spar_cfg = args.spar;
  spar_cfg.lead = args.lead;
  MorseConfig morse = args.morse;
  morse.lead = args.lead;
  parallel_for(records.size(), [&](std::size_t i) {
    if (args.kind == ImageKind::attractor) {
      spar[i] = spar_transform(records[i], spar_cfg);
      images[i] = spar[i].image;
    } else {
      images[i] = scalogram_image(records[i], morse);
    }
  });
  if (args.kind == ImageKind::attractor) {
    std::ostringstream meta;
    meta.precision(17);
    meta << "id,cycle_s,peak_correlation,no_periodicity,tau_samples\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
      meta << records[i].id << ',' << spar[i].cycle.seconds << ',' << spar[i].cycle.peak_correlation
           << ',' << (spar[i].cycle.no_periodicity ? 1 : 0) << ',' << spar[i].tau_samples << '\n';
    }
    fs::create_directories(args.out);
    write_file_atomic(args.out / "attractor_meta.csv", meta.str());
  }
  write_images(images, args.out, args.format);

  json cfg{{"manifest", args.manifest.string()},
           {"kind", std::string(to_string(args.kind))},
           {"lead", args.lead},
           {"format", std::string(extension_for(args.format)).substr(1)},
           {"images", images.size()},
           {"skipped_missing_lead", rejected}};
  if (args.kind == ImageKind::attractor) {
    cfg["tau_fraction"] = spar_cfg.tau_fraction;
    cfg["grid"] = spar_cfg.grid;
    cfg["density_scale"] = spar_cfg.density_scale == DensityScale::log1p ? "log1p" : "linear";
  } else {
    cfg["gamma"] = morse.gamma;
    cfg["beta"] = morse.beta;
    cfg["voices"] = morse.voices_per_octave;
    cfg["freq_min_hz"] = morse.freq_min_hz;
    cfg["freq_max_hz"] = morse.freq_max_hz ? json(*morse.freq_max_hz) : json("0.95*fs/2");
    cfg["fixed_magnitude_limit"] = morse.fixed_magnitude_limit ? json(*morse.fixed_magnitude_limit) : json(nullptr);
  }
  write_config(sidecar_for_dir(args.out), "transform", cfg);
  out << "wrote " << images.size() << ' ' << to_string(args.kind) << " images to " << args.out.string() << "\n";
}

void cmd_folds(const FoldsArgs& args, std::ostream& out) {
  const auto manifest = read_manifest(args.manifest);
  std::vector<LabeledId> ids;
  for (const auto& e : manifest.entries) ids.push_back({e.id, e.label});
  const auto plan = make_folds(ids, args.seed);
  if (args.out.has_parent_path()) fs::create_directories(args.out.parent_path());
  write_file_atomic(args.out, encode_fold_plan(plan));
  write_config(sidecar_for_file(args.out), "folds",
               {{"manifest", args.manifest.string()}, {"seed", args.seed}, {"records", ids.size()}});
  out << "wrote 5-fold plan for " << ids.size() << " records to " << args.out.string() << "\n";
}

void cmd_evaluate(const EvaluateArgs& args, std::ostream& out) {
  const auto mode = parse_matrix_mode(args.mode);
  if (!mode) throw UsageError("--mode must be same, train-clean or train-all");
  const auto plan = read_fold_plan(args.folds);

  ImageDatasets datasets;
  std::vector<std::string> sources;
  for (const auto& m : find_image_manifests(args.images)) {
    sources.push_back(fs::relative(m, args.images).generic_string());
    for (auto& im : load_images(m)) {
      datasets[{im.variant, im.kind}].push_back(std::move(im));
    }
  }
  std::vector<ImageKind> kinds;
  if (args.kinds.empty()) {
    std::set<ImageKind> present;
    for (const auto& [key, images] : datasets) present.insert(key.second);
    kinds.assign(present.begin(), present.end());
  } else {
    for (const auto& k : args.kinds) {
      const auto kind = parse_image_kind(k);
      if (!kind) throw UsageError("unknown image kind '" + k + "'");
      kinds.push_back(*kind);
    }
  }

  const auto report = run_matrix(plan, datasets, kinds, *mode);
  if (args.out.has_parent_path()) fs::create_directories(args.out.parent_path());
  write_file_atomic(args.out, encode_report(report));
  const auto table = render_table(report);
  if (args.table) write_file_atomic(*args.table, table);
  std::vector<std::string> kind_names;
  for (ImageKind k : kinds) kind_names.emplace_back(to_string(k));
  write_config(sidecar_for_file(args.out), "evaluate",
               {{"folds", args.folds.string()},
                {"images", args.images.string()},
                {"image_manifests", sources},
                {"mode", std::string(to_string(*mode))},
                {"kinds", kind_names},
                {"classifier", {{"k_candidates", {1, 5, 15}}, {"pool", 5}}}});
  out << table;
}

void cmd_report(const ReportArgs& args, std::ostream& out) {
  std::vector<RobustnessReport> reports;
  std::vector<std::string> inputs;
  for (const auto& p : args.inputs) {
    const auto bytes = read_file_bytes(p);
    for (auto& r : decode_reports(std::string(bytes.begin(), bytes.end()))) reports.push_back(std::move(r));
    inputs.push_back(p.string());
  }
  if (args.out.has_parent_path()) fs::create_directories(args.out.parent_path());
  write_file_atomic(args.out, encode_report_bundle(reports));
  std::string table;
  for (const auto& r : reports) table += "mode " + std::string(to_string(r.mode)) + "\n" + render_table(r);
  if (args.table) write_file_atomic(*args.table, table);
  write_config(sidecar_for_file(args.out), "report", {{"inputs", inputs}});
  out << table;
}

}  // namespace ecgrob::cli
