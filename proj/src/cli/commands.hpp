// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecgrob/image_io.hpp"
#include "ecgrob/preprocess.hpp"
#include "ecgrob/scalogram.hpp"
#include "ecgrob/signal_io.hpp"
#include "ecgrob/spar.hpp"

namespace ecgrob::cli {

namespace fs = std::filesystem;

// Bad flag value detected after parsing; maps to the usage exit code.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SynthCorpusArgs {
  fs::path out;
  std::size_t n_per_class = 150;
  double fs = 500.0;
  double duration_s = 10.0;
  std::uint64_t seed = 0;
  bool artefacts = true;
  SignalFormat format = SignalFormat::binary_f64;
};

struct CleanArgs {
  fs::path manifest;
  fs::path out;
  FilterSpec filter;
  bool strict_duration = false;
  SignalFormat format = SignalFormat::binary_f64;
};

struct AddNoiseArgs {
  fs::path manifest;
  fs::path out;
  double snr_min = 5.0;
  double snr_max = 10.0;
  std::uint64_t seed = 0;
  std::optional<fs::path> noise_bank;
  double bank_duration_s = 1800.0;
  int lead = kDefaultLead;
  bool per_lead_windows = false;
  SignalFormat format = SignalFormat::binary_f64;
};

struct TransformArgs {
  ImageKind kind = ImageKind::attractor;
  fs::path manifest;
  fs::path out;
  int lead = kDefaultLead;
  SparConfig spar;
  MorseConfig morse;
  ImageFormat format = ImageFormat::png;
};

struct FoldsArgs {
  fs::path manifest;
  fs::path out;
  std::uint64_t seed = 0;
};

struct EvaluateArgs {
  fs::path folds;
  fs::path images;
  std::string mode = "same";
  std::vector<std::string> kinds;
  fs::path out;
  std::optional<fs::path> table;
};

struct ReportArgs {
  std::vector<fs::path> inputs;
  fs::path out;
  std::optional<fs::path> table;
};

void cmd_synth_corpus(const SynthCorpusArgs& args, std::ostream& out);
void cmd_clean(const CleanArgs& args, std::ostream& out);
void cmd_add_noise(const AddNoiseArgs& args, std::ostream& out);
void cmd_transform(const TransformArgs& args, std::ostream& out);
void cmd_folds(const FoldsArgs& args, std::ostream& out);
void cmd_evaluate(const EvaluateArgs& args, std::ostream& out);
void cmd_report(const ReportArgs& args, std::ostream& out);

// "a:b" -> {a, b}; throws UsageError.
std::pair<double, double> parse_range(const std::string& text, const std::string& flag);
SignalFormat parse_signal_format(const std::string& text);

}  // namespace ecgrob::cli
