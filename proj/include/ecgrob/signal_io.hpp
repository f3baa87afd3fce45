// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ecgrob/record.hpp"

namespace ecgrob {

// On-disk signal encodings.
//
// Text (.csv):
//   fs,label
//   500,AF
//   I,II,III                  <- one column per lead (names are free-form)
//   0.012,0.034,0.022
//   ...
// Values are written with 17 significant digits, so text round trips are
// exact for IEEE doubles.
//
// Binary (.ecg), little-endian:
//   magic[4]  "ECGB" (f32 samples) or "ECGD" (f64 samples)
//   u32 lead count, u32 sample count, f32 fs
//   samples, lead-major (all of lead 1, then lead 2, ...)
enum class SignalFormat { csv, binary_f32, binary_f64 };

struct SignalFile {
  std::vector<std::vector<double>> leads;
  double fs = 0.0;
  std::optional<Label> label;  // text form only
};

std::string encode_signal(const SignalFile& file, SignalFormat format);
SignalFile decode_signal(std::string_view bytes, SignalFormat format);

// Format from extension (.csv) or magic bytes (.ecg and anything else).
SignalFile read_signal_file(const std::filesystem::path& path);
void write_signal_file(const std::filesystem::path& path, const SignalFile& file,
                       SignalFormat format);

SignalFile to_signal_file(const EcgRecord& record);

std::string_view extension_for(SignalFormat format);

}  // namespace ecgrob
