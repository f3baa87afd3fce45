// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ecgrob/manifest.hpp"
#include "ecgrob/record.hpp"

namespace ecgrob {

enum class ImageFormat { pgm, png };

std::string_view extension_for(ImageFormat format);

// 8-bit quantization: byte = round(clamp(i, 0, 1) * 255).
std::vector<std::uint8_t> quantize(const std::vector<double>& pixels);

std::string encode_image(const std::vector<std::uint8_t>& gray, std::size_t width,
                         std::size_t height, ImageFormat format);

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> bytes;

  std::vector<double> intensities() const;  // byte / 255
};

// Accepts binary PGM (P5, maxval 255) or 8-bit grayscale PNG.
GrayImage read_gray_image(const std::filesystem::path& path);

// One file per image (<dir>/<source_id><ext>) plus <dir>/manifest.csv.
ImageManifest write_images(const std::vector<TransformImage>& images,
                           const std::filesystem::path& dir, ImageFormat format);

// Reads every image listed in an image manifest back into TransformImages.
std::vector<TransformImage> load_images(const std::filesystem::path& manifest_path);

}  // namespace ecgrob
