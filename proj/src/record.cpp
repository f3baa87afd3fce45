// SPDX-License-Identifier: Apache-2.0
#include "ecgrob/record.hpp"

#include <cmath>
#include <string>

#include "ecgrob/errors.hpp"

namespace ecgrob {

std::string_view to_string(Label label) {
  switch (label) {
    case Label::AF: return "AF";
    case Label::Normal: return "Normal";
    case Label::STD: return "STD";
  }
  return "?";
}

std::string_view to_string(Variant variant) {
  switch (variant) {
    case Variant::raw: return "raw";
    case Variant::clean: return "clean";
    case Variant::bw: return "bw";
    case Variant::em: return "em";
    case Variant::ma: return "ma";
    case Variant::all: return "all";
  }
  return "?";
}

std::string_view to_string(ImageKind kind) {
  return kind == ImageKind::attractor ? "attractor" : "scalogram";
}

std::optional<Label> parse_label(std::string_view text) {
  for (Label l : kAllLabels)
    if (text == to_string(l)) return l;
  return std::nullopt;
}

std::optional<Variant> parse_variant(std::string_view text) {
  for (Variant v : kAllVariants)
    if (text == to_string(v)) return v;
  return std::nullopt;
}

std::optional<ImageKind> parse_image_kind(std::string_view text) {
  for (ImageKind k : kAllImageKinds)
    if (text == to_string(k)) return k;
  return std::nullopt;
}

void validate_record(const EcgRecord& record, const DurationBounds& bounds) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::InvariantViolation, what, record.id);
  };
  if (!(record.fs > 0.0) || !std::isfinite(record.fs)) fail("sampling rate must be positive");
  if (record.leads.empty()) fail("record has no leads");
  const std::size_t n = record.leads.front().size();
  if (n == 0) fail("record has no samples");
  for (const auto& lead : record.leads) {
    if (lead.size() != n) fail("leads differ in length");
    for (double v : lead)
      if (!std::isfinite(v)) fail("non-finite sample value");
  }
  const double d = record.duration_s();
  if (d < bounds.min_s || d > bounds.max_s) {
    fail("duration " + std::to_string(d) + " s outside [" + std::to_string(bounds.min_s) + ", " +
         std::to_string(bounds.max_s) + "]");
  }
}

std::size_t lead_index(const EcgRecord& record, int lead_number) {
  if (lead_number < 1 || static_cast<std::size_t>(lead_number) > record.leads.size()) {
    throw Error(ErrorCode::MissingLead,
                "lead " + std::to_string(lead_number) + " not present (record has " +
                    std::to_string(record.leads.size()) + ")",
                record.id);
  }
  return static_cast<std::size_t>(lead_number - 1);
}

std::span<const double> select_lead(const EcgRecord& record, int lead_number) {
  return record.leads[lead_index(record, lead_number)];
}

std::uint64_t stable_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t substream_seed(std::uint64_t seed, std::string_view key) {
  // splitmix64 finalizer over the combined value
  std::uint64_t z = seed ^ (stable_hash(key) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace ecgrob
