// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <ostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "ecgrob/cli.hpp"
#include "ecgrob/errors.hpp"

namespace ecgrob::cli {

namespace {

std::optional<ImageFormat> parse_image_format(const std::string& text) {
  if (text == "png") return ImageFormat::png;
  if (text == "pgm") return ImageFormat::pgm;
  return std::nullopt;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"ECG noise robustness pipeline: clean, add noise, transform, evaluate", "ecgrob"};
  app.require_subcommand(1);
  app.fallthrough(false);

  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: ECGROB_THREADS or all cores)");

  SynthCorpusArgs synth;
  std::string synth_format = "f64";
  auto* s = app.add_subcommand("synth-corpus", "Generate a three-class synthetic raw corpus");
  s->add_option("--out", synth.out, "Output directory")->required();
  s->add_option("--n-per-class", synth.n_per_class, "Records per class")->capture_default_str();
  s->add_option("--fs", synth.fs, "Sampling rate in Hz")->capture_default_str();
  s->add_option("--duration", synth.duration_s, "Record length in seconds")->capture_default_str();
  s->add_option("--seed", synth.seed, "RNG seed")->required();
  s->add_option("--format", synth_format, "Signal file format: f64, f32 or csv")->capture_default_str();
  bool no_artefacts = false;
  s->add_flag("--no-artefacts", no_artefacts, "Omit drift, mains hum and white noise");

  CleanArgs clean;
  std::string notch = "49:51";
  std::string clean_format = "f64";
  auto* c = app.add_subcommand("clean", "Filter a raw dataset into a clean dataset");
  c->add_option("--manifest", clean.manifest, "Raw dataset manifest")->required()->check(CLI::ExistingFile);
  c->add_option("--out", clean.out, "Output directory")->required();
  c->add_option("--lowpass", clean.filter.lowpass_hz, "Low-pass cut-off (Hz)")->capture_default_str();
  c->add_option("--highpass", clean.filter.highpass_hz, "High-pass cut-off (Hz)")->capture_default_str();
  c->add_option("--notch", notch, "Notch stop band LOW:HIGH (Hz)")->capture_default_str();
  c->add_option("--order", clean.filter.filter_order, "Butterworth order")->capture_default_str();
  c->add_flag("--strict-duration", clean.strict_duration, "Reject records outside 8..138 s");
  c->add_option("--format", clean_format, "Signal file format: f64, f32 or csv")->capture_default_str();

  AddNoiseArgs noise;
  std::string snr = "5:10";
  std::string noise_format = "f64";
  std::string bank_dir;
  bool synth_bank = false;
  auto* n = app.add_subcommand("add-noise", "Create bw/em/ma/all noisy datasets from a clean dataset");
  n->add_option("--manifest", noise.manifest, "Clean dataset manifest")->required()->check(CLI::ExistingFile);
  n->add_option("--out", noise.out, "Output directory (one subdirectory per noise kind)")->required();
  n->add_option("--snr", snr, "SNR range LOW:HIGH in dB")->capture_default_str();
  n->add_option("--seed", noise.seed, "RNG seed")->required();
  auto* bank_opt = n->add_option("--noise-bank", bank_dir, "Directory with bw/em/ma noise recordings");
  auto* synth_opt = n->add_flag("--synth", synth_bank, "Use the synthetic noise bank");
  bank_opt->excludes(synth_opt);
  n->add_option("--bank-duration", noise.bank_duration_s, "Synthetic bank length (s)")->capture_default_str();
  n->add_option("--lead", noise.lead, "Lead the scaling factor is computed on")->capture_default_str();
  n->add_flag("--per-lead-windows", noise.per_lead_windows, "Independent noise window per lead");
  n->add_option("--format", noise_format, "Signal file format: f64, f32 or csv")->capture_default_str();

  TransformArgs tr;
  std::string kind = "attractor";
  std::string density = "log1p";
  std::string image_format = "png";
  double fmax = 0.0;
  double fixed_limit = 0.0;
  auto* t = app.add_subcommand("transform", "Render attractor or scalogram images");
  t->add_option("--kind", kind, "attractor or scalogram")->required();
  t->add_option("--manifest", tr.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  t->add_option("--out", tr.out, "Output directory")->required();
  t->add_option("--lead", tr.lead, "Lead number (II = 2)")->capture_default_str();
  t->add_option("--tau-fraction", tr.spar.tau_fraction, "Attractor delay as a fraction of the cycle")
      ->capture_default_str();
  t->add_option("--density", density, "Attractor density scale: log1p or linear")->capture_default_str();
  t->add_option("--gamma", tr.morse.gamma, "Morse gamma")->capture_default_str();
  t->add_option("--beta", tr.morse.beta, "Morse beta")->capture_default_str();
  t->add_option("--voices", tr.morse.voices_per_octave, "Voices per octave")->capture_default_str();
  t->add_option("--fmin", tr.morse.freq_min_hz, "Lowest scalogram frequency (Hz)")->capture_default_str();
  auto* fmax_opt = t->add_option("--fmax", fmax, "Highest scalogram frequency (Hz), default 0.95*fs/2");
  auto* limit_opt = t->add_option("--fixed-limit", fixed_limit,
                                  "Divide magnitudes by this value instead of the per-image max");
  t->add_option("--format", image_format, "Image format: png or pgm")->capture_default_str();

  FoldsArgs folds;
  auto* f = app.add_subcommand("folds", "Write a stratified 5-fold plan");
  f->add_option("--manifest", folds.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  f->add_option("--out", folds.out, "Fold plan JSON")->required();
  f->add_option("--seed", folds.seed, "RNG seed")->required();

  EvaluateArgs eval;
  std::string table;
  auto* e = app.add_subcommand("evaluate", "Run the robustness matrix with the baseline classifier");
  e->add_option("--folds", eval.folds, "Fold plan JSON")->required()->check(CLI::ExistingFile);
  e->add_option("--images", eval.images, "Directory searched for image manifests")->required();
  e->add_option("--mode", eval.mode, "same, train-clean or train-all")->capture_default_str();
  e->add_option("--kinds", eval.kinds, "Image kinds to evaluate (default: all present)")->delimiter(',');
  e->add_option("--out", eval.out, "Report JSON")->required();
  e->add_option("--table", table, "Also write the text table here");

  ReportArgs report;
  std::string report_table;
  auto* r = app.add_subcommand("report", "Combine evaluate reports and render tables");
  r->add_option("--in", report.inputs, "Report JSON (repeatable)")->required()->check(CLI::ExistingFile);
  r->add_option("--out", report.out, "Combined report JSON")->required();
  r->add_option("--table", report_table, "Also write the text tables here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (threads > 0) setenv("ECGROB_THREADS", std::to_string(threads).c_str(), 1);

  try {
    if (s->parsed()) {
      synth.artefacts = !no_artefacts;
      synth.format = parse_signal_format(synth_format);
      cmd_synth_corpus(synth, out);
    } else if (c->parsed()) {
      const auto [lo, hi] = parse_range(notch, "--notch");
      clean.filter.notch_low_hz = lo;
      clean.filter.notch_high_hz = hi;
      clean.format = parse_signal_format(clean_format);
      cmd_clean(clean, out);
    } else if (n->parsed()) {
      const auto [lo, hi] = parse_range(snr, "--snr");
      noise.snr_min = lo;
      noise.snr_max = hi;
      if (!bank_dir.empty()) noise.noise_bank = bank_dir;
      noise.format = parse_signal_format(noise_format);
      cmd_add_noise(noise, out);
    } else if (t->parsed()) {
      const auto k = parse_image_kind(kind);
      if (!k) throw UsageError("--kind must be attractor or scalogram");
      tr.kind = *k;
      if (density == "log1p") tr.spar.density_scale = DensityScale::log1p;
      else if (density == "linear") tr.spar.density_scale = DensityScale::linear;
      else throw UsageError("--density must be log1p or linear");
      const auto fmt = parse_image_format(image_format);
      if (!fmt) throw UsageError("--format must be png or pgm");
      tr.format = *fmt;
      if (fmax_opt->count() > 0) tr.morse.freq_max_hz = fmax;
      if (limit_opt->count() > 0) tr.morse.fixed_magnitude_limit = fixed_limit;
      cmd_transform(tr, out);
    } else if (f->parsed()) {
      cmd_folds(folds, out);
    } else if (e->parsed()) {
      if (!table.empty()) eval.table = table;
      cmd_evaluate(eval, out);
    } else if (r->parsed()) {
      if (!report_table.empty()) report.table = report_table;
      cmd_report(report, out);
    }
  } catch (const UsageError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const Error& ex) {
    err << "error: " << ex.what() << "\n";
    if (!ex.record_id().empty()) err << "record: " << ex.record_id() << "\n";
    return kExitData;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace ecgrob::cli
