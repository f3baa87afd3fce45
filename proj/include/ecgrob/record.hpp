// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ecgrob {

enum class Label : std::uint8_t { AF = 0, Normal = 1, STD = 2 };
inline constexpr std::size_t kNumClasses = 3;
inline constexpr std::array<Label, kNumClasses> kAllLabels{Label::AF, Label::Normal, Label::STD};

enum class Variant : std::uint8_t { raw, clean, bw, em, ma, all };
inline constexpr std::array<Variant, 6> kAllVariants{Variant::raw, Variant::clean, Variant::bw,
                                                     Variant::em,  Variant::ma,    Variant::all};
inline constexpr std::array<Variant, 4> kNoiseVariants{Variant::bw, Variant::em, Variant::ma,
                                                       Variant::all};

enum class ImageKind : std::uint8_t { attractor, scalogram };
inline constexpr std::array<ImageKind, 2> kAllImageKinds{ImageKind::attractor,
                                                         ImageKind::scalogram};

std::string_view to_string(Label label);
std::string_view to_string(Variant variant);
std::string_view to_string(ImageKind kind);
std::optional<Label> parse_label(std::string_view text);
std::optional<Variant> parse_variant(std::string_view text);
std::optional<ImageKind> parse_image_kind(std::string_view text);

inline std::size_t class_index(Label label) { return static_cast<std::size_t>(label); }

// Accepted record durations. Strict mode applies the study's 8 s..138 s
// window; the default admits anything with at least one sample.
struct DurationBounds {
  double min_s = 0.0;
  double max_s = 1e12;

  static DurationBounds strict() { return {8.0, 138.0}; }
};

// Multi-lead ECG record. leads[l][t] in millivolts; all leads equal length.
struct EcgRecord {
  std::string id;
  std::vector<std::vector<double>> leads;
  double fs = 0.0;
  Label label = Label::Normal;
  Variant variant = Variant::raw;

  std::size_t lead_count() const { return leads.size(); }
  std::size_t sample_count() const { return leads.empty() ? 0 : leads.front().size(); }
  double duration_s() const { return fs > 0.0 ? static_cast<double>(sample_count()) / fs : 0.0; }
};

// Throws InvariantViolation (tagged with the record id) when fs, lead shape,
// finiteness or duration bounds are violated.
void validate_record(const EcgRecord& record, const DurationBounds& bounds = {});

// Leads are numbered from 1 (lead II == 2). Throws MissingLead.
std::size_t lead_index(const EcgRecord& record, int lead_number);
std::span<const double> select_lead(const EcgRecord& record, int lead_number);

inline constexpr int kDefaultLead = 2;
inline constexpr std::size_t kImageSize = 150;

// 150x150 grayscale raster, row-major, row 0 at the top. Intensities in [0,1].
struct TransformImage {
  std::vector<double> pixels = std::vector<double>(kImageSize * kImageSize, 0.0);
  ImageKind kind = ImageKind::attractor;
  std::string source_id;
  Variant variant = Variant::clean;
  Label label = Label::Normal;

  double& at(std::size_t row, std::size_t col) { return pixels[row * kImageSize + col]; }
  double at(std::size_t row, std::size_t col) const { return pixels[row * kImageSize + col]; }
};

// 64-bit FNV-1a; stable across platforms and runs (unlike std::hash).
std::uint64_t stable_hash(std::string_view text);

// Independent RNG substream for (seed, key): order-independent draws.
std::uint64_t substream_seed(std::uint64_t seed, std::string_view key);

}  // namespace ecgrob
