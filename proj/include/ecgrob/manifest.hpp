// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ecgrob/record.hpp"
#include "ecgrob/signal_io.hpp"

namespace ecgrob {

// One row of a record manifest: id,path,label,variant,fs,leads,samples,sha256.
// `path` is stored relative to the manifest's directory when possible.
struct ManifestEntry {
  std::string id;
  std::string path;
  Label label = Label::Normal;
  Variant variant = Variant::raw;
  double fs = 0.0;
  std::size_t leads = 0;
  std::size_t samples = 0;
  std::string sha256;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  Variant dataset_variant = Variant::raw;
  std::filesystem::path base_dir;  // directory paths are resolved against

  std::filesystem::path resolve(const ManifestEntry& entry) const;
};

DatasetManifest read_manifest(const std::filesystem::path& manifest_path);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& manifest_path);
std::string encode_manifest(const DatasetManifest& manifest);

struct LoadOptions {
  DurationBounds bounds{};
  // Records lacking this lead are skipped and reported through `rejected`.
  std::optional<int> required_lead;
  bool verify_checksums = true;
};

// One record per manifest row, in manifest order. Throws MissingFile,
// ParseError or InvariantViolation tagged with the offending row id.
std::vector<EcgRecord> load_dataset(const std::filesystem::path& manifest_path,
                                    const LoadOptions& options = {},
                                    std::vector<std::string>* rejected = nullptr);

// Writes each record as <dir>/<id><ext> and then <dir>/manifest.csv. The
// manifest is written last; its presence marks a complete dataset.
DatasetManifest write_dataset(const std::vector<EcgRecord>& records,
                              const std::filesystem::path& dir, Variant dataset_variant,
                              SignalFormat format = SignalFormat::binary_f64);

inline constexpr const char* kManifestFileName = "manifest.csv";

// Image manifests use id,path,label,variant,kind,width,height,sha256.
struct ImageManifestEntry {
  std::string id;
  std::string path;
  Label label = Label::Normal;
  Variant variant = Variant::clean;
  ImageKind kind = ImageKind::attractor;
  std::size_t width = kImageSize;
  std::size_t height = kImageSize;
  std::string sha256;
};

struct ImageManifest {
  std::vector<ImageManifestEntry> entries;
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const ImageManifestEntry& entry) const;
};

ImageManifest read_image_manifest(const std::filesystem::path& manifest_path);
void write_image_manifest(const ImageManifest& manifest, const std::filesystem::path& path);

}  // namespace ecgrob
