// SPDX-License-Identifier: Apache-2.0
#include "ecgrob/manifest.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "ecgrob/errors.hpp"
#include "ecgrob/io_util.hpp"
#include "ecgrob/parallel.hpp"

namespace ecgrob {

namespace fs = std::filesystem;

namespace {

constexpr const char* kRecordHeader = "id,path,label,variant,fs,leads,samples,sha256";
constexpr const char* kImageHeader = "id,path,label,variant,kind,width,height,sha256";

std::vector<std::vector<std::string>> read_csv_rows(const fs::path& path,
                                                    std::string_view expected_header) {
  if (!fs::exists(path)) throw Error(ErrorCode::MissingFile, "manifest not found: " + path.string());
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open manifest " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != expected_header) {
    throw Error(ErrorCode::ParseError,
                "manifest " + path.string() + " must start with '" + std::string(expected_header) + "'");
  }
  const std::size_t columns = split(expected_header, ',').size();
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split(trim(line), ',');
    if (cells.size() != columns) {
      throw Error(ErrorCode::ParseError, "manifest line " + std::to_string(line_no) + " has " +
                                             std::to_string(cells.size()) + " columns");
    }
    for (auto& c : cells) c = std::string(trim(c));
    rows.push_back(std::move(cells));
  }
  return rows;
}

template <typename T>
T parse_number(const std::string& text, const std::string& id, const char* what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::ParseError, std::string("bad ") + what + " '" + text + "'", id);
  }
  return v;
}

std::string format_fs(double fs) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), fs);
  return std::string(buf, ptr);
}

std::string relative_to(const fs::path& file, const fs::path& base) {
  std::error_code ec;
  const auto rel = fs::relative(file, base, ec);
  if (ec || rel.empty()) return file.string();
  return rel.generic_string();
}

}  // namespace

fs::path DatasetManifest::resolve(const ManifestEntry& entry) const {
  const fs::path p(entry.path);
  return p.is_absolute() ? p : base_dir / p;
}

fs::path ImageManifest::resolve(const ImageManifestEntry& entry) const {
  const fs::path p(entry.path);
  return p.is_absolute() ? p : base_dir / p;
}

DatasetManifest read_manifest(const fs::path& manifest_path) {
  DatasetManifest manifest;
  manifest.base_dir = manifest_path.parent_path();
  std::set<std::string> seen;
  bool first = true;
  for (const auto& row : read_csv_rows(manifest_path, kRecordHeader)) {
    ManifestEntry e;
    e.id = row[0];
    if (e.id.empty()) throw Error(ErrorCode::ParseError, "empty record id in manifest");
    if (!seen.insert(e.id).second) {
      throw Error(ErrorCode::InvariantViolation, "duplicate id in manifest", e.id);
    }
    e.path = row[1];
    const auto label = parse_label(row[2]);
    const auto variant = parse_variant(row[3]);
    if (!label) throw Error(ErrorCode::ParseError, "unknown label '" + row[2] + "'", e.id);
    if (!variant) throw Error(ErrorCode::ParseError, "unknown variant '" + row[3] + "'", e.id);
    e.label = *label;
    e.variant = *variant;
    e.fs = parse_number<double>(row[4], e.id, "fs");
    e.leads = parse_number<std::size_t>(row[5], e.id, "lead count");
    e.samples = parse_number<std::size_t>(row[6], e.id, "sample count");
    e.sha256 = row[7];
    if (first) manifest.dataset_variant = e.variant;
    first = false;
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

std::string encode_manifest(const DatasetManifest& manifest) {
  std::ostringstream out;
  out << kRecordHeader << '\n';
  for (const auto& e : manifest.entries) {
    out << e.id << ',' << e.path << ',' << to_string(e.label) << ',' << to_string(e.variant) << ','
        << format_fs(e.fs) << ',' << e.leads << ',' << e.samples << ',' << e.sha256 << '\n';
  }
  return out.str();
}

void write_manifest(const DatasetManifest& manifest, const fs::path& manifest_path) {
  write_file_atomic(manifest_path, encode_manifest(manifest));
}

std::vector<EcgRecord> load_dataset(const fs::path& manifest_path, const LoadOptions& options,
                                    std::vector<std::string>* rejected) {
  const DatasetManifest manifest = read_manifest(manifest_path);
  std::vector<std::optional<EcgRecord>> slots(manifest.entries.size());

  parallel_for(manifest.entries.size(), [&](std::size_t i) {
    const ManifestEntry& e = manifest.entries[i];
    const fs::path file = manifest.resolve(e);
    if (!fs::exists(file)) {
      throw Error(ErrorCode::MissingFile, "referenced file missing: " + file.string(), e.id);
    }
    const auto bytes = read_file_bytes(file);
    if (options.verify_checksums && !e.sha256.empty() && sha256_hex(bytes) != e.sha256) {
      throw Error(ErrorCode::InvariantViolation, "checksum mismatch for " + file.string(), e.id);
    }
    SignalFile sig;
    try {
      const std::string_view view(reinterpret_cast<const char*>(bytes.data()), bytes.size());
      sig = decode_signal(view, file.extension() == ".csv" ? SignalFormat::csv
                                                           : SignalFormat::binary_f64);
    } catch (const Error& err) {
      throw err.with_context("load", e.id);
    }
    if (sig.label && *sig.label != e.label) {
      throw Error(ErrorCode::InvariantViolation, "file label disagrees with manifest", e.id);
    }
    if (sig.leads.size() != e.leads || (sig.leads.empty() ? 0 : sig.leads[0].size()) != e.samples ||
        static_cast<float>(sig.fs) != static_cast<float>(e.fs)) {
      throw Error(ErrorCode::InvariantViolation, "file shape or fs disagrees with manifest", e.id);
    }
    EcgRecord rec{e.id, std::move(sig.leads), e.fs, e.label, e.variant};
    validate_record(rec, options.bounds);
    slots[i] = std::move(rec);
  });

  std::vector<EcgRecord> records;
  records.reserve(slots.size());
  for (auto& slot : slots) {
    if (options.required_lead && static_cast<int>(slot->lead_count()) < *options.required_lead) {
      if (rejected) rejected->push_back(slot->id);
      continue;
    }
    records.push_back(std::move(*slot));
  }
  return records;
}

DatasetManifest write_dataset(const std::vector<EcgRecord>& records, const fs::path& dir,
                              Variant dataset_variant, SignalFormat format) {
  fs::create_directories(dir);
  DatasetManifest manifest;
  manifest.base_dir = dir;
  manifest.dataset_variant = dataset_variant;
  manifest.entries.resize(records.size());
  std::set<std::string> ids;
  for (const auto& r : records) {
    if (!ids.insert(r.id).second) {
      throw Error(ErrorCode::InvariantViolation, "duplicate id in dataset", r.id);
    }
  }
  parallel_for(records.size(), [&](std::size_t i) {
    const EcgRecord& r = records[i];
    validate_record(r);
    const fs::path file = dir / (r.id + std::string(extension_for(format)));
    const std::string bytes = encode_signal(to_signal_file(r), format);
    write_file_atomic(file, bytes);
    manifest.entries[i] = ManifestEntry{r.id,           relative_to(file, dir), r.label,
                                        r.variant,      r.fs,                   r.lead_count(),
                                        r.sample_count(), sha256_hex(bytes)};
  });
  write_manifest(manifest, dir / kManifestFileName);
  return manifest;
}

ImageManifest read_image_manifest(const fs::path& manifest_path) {
  ImageManifest manifest;
  manifest.base_dir = manifest_path.parent_path();
  std::set<std::string> seen;
  for (const auto& row : read_csv_rows(manifest_path, kImageHeader)) {
    ImageManifestEntry e;
    e.id = row[0];
    if (!seen.insert(e.id).second) {
      throw Error(ErrorCode::InvariantViolation, "duplicate id in image manifest", e.id);
    }
    e.path = row[1];
    const auto label = parse_label(row[2]);
    const auto variant = parse_variant(row[3]);
    const auto kind = parse_image_kind(row[4]);
    if (!label || !variant || !kind) {
      throw Error(ErrorCode::ParseError, "bad label/variant/kind in image manifest", e.id);
    }
    e.label = *label;
    e.variant = *variant;
    e.kind = *kind;
    e.width = parse_number<std::size_t>(row[5], e.id, "width");
    e.height = parse_number<std::size_t>(row[6], e.id, "height");
    e.sha256 = row[7];
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

void write_image_manifest(const ImageManifest& manifest, const fs::path& path) {
  std::ostringstream out;
  out << kImageHeader << '\n';
  for (const auto& e : manifest.entries) {
    out << e.id << ',' << e.path << ',' << to_string(e.label) << ',' << to_string(e.variant) << ','
        << to_string(e.kind) << ',' << e.width << ',' << e.height << ',' << e.sha256 << '\n';
  }
  write_file_atomic(path, out.str());
}

}  // namespace ecgrob
