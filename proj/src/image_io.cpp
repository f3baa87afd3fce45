// SPDX-License-Identifier: Apache-2.0
#include "ecgrob/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstring>

#include "ecgrob/errors.hpp"
#include "ecgrob/io_util.hpp"
#include "ecgrob/parallel.hpp"

namespace ecgrob {

namespace fs = std::filesystem;

namespace {

std::string encode_pgm(const std::vector<std::uint8_t>& gray, std::size_t w, std::size_t h) {
  std::string out = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  out.append(reinterpret_cast<const char*>(gray.data()), gray.size());
  return out;
}

GrayImage decode_pgm(std::string_view bytes) {
  std::size_t pos = 0;
  auto next_token = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return std::string(bytes.substr(start, pos - start));
  };
  if (next_token() != "P5") throw Error(ErrorCode::ParseError, "not a binary PGM");
  GrayImage img;
  try {
    img.width = std::stoul(next_token());
    img.height = std::stoul(next_token());
    if (std::stoul(next_token()) != 255) throw Error(ErrorCode::ParseError, "PGM maxval must be 255");
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::ParseError, "malformed PGM header");
  }
  ++pos;  // single whitespace before raster
  if (bytes.size() - pos != img.width * img.height) {
    throw Error(ErrorCode::ParseError, "PGM raster size mismatch");
  }
  img.bytes.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  return img;
}

void png_append(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), len);
}

std::string encode_png(const std::vector<std::uint8_t>& gray, std::size_t w, std::size_t h) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorCode::IoError, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  std::string out;
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::IoError, "PNG encoding failed");
  }
  png_set_write_fn(png, &out, png_append, nullptr);
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t r = 0; r < h; ++r) {
    png_write_row(png, const_cast<png_bytep>(gray.data() + r * w));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

struct PngReadState {
  std::string_view bytes;
  std::size_t offset = 0;
};

void png_take(png_structp png, png_bytep data, png_size_t len) {
  auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (st->offset + len > st->bytes.size()) png_error(png, "truncated PNG");
  std::memcpy(data, st->bytes.data() + st->offset, len);
  st->offset += len;
}

GrayImage decode_png(std::string_view bytes) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorCode::IoError, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  PngReadState state{bytes, 0};
  GrayImage img;
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::ParseError, "PNG decoding failed");
  }
  png_set_read_fn(png, &state, png_take);
  png_read_info(png, info);
  if (png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY || png_get_bit_depth(png, info) != 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::ParseError, "PNG must be 8-bit grayscale");
  }
  img.width = png_get_image_width(png, info);
  img.height = png_get_image_height(png, info);
  img.bytes.resize(img.width * img.height);
  for (std::size_t r = 0; r < img.height; ++r) png_read_row(png, img.bytes.data() + r * img.width, nullptr);
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

}  // namespace

std::string_view extension_for(ImageFormat format) {
  return format == ImageFormat::pgm ? ".pgm" : ".png";
}

std::vector<std::uint8_t> quantize(const std::vector<double>& pixels) {
  std::vector<std::uint8_t> out(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const double v = std::clamp(pixels[i], 0.0, 1.0);
    out[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  return out;
}

std::string encode_image(const std::vector<std::uint8_t>& gray, std::size_t width,
                         std::size_t height, ImageFormat format) {
  if (gray.size() != width * height) throw Error(ErrorCode::InvalidArgument, "raster size mismatch");
  return format == ImageFormat::pgm ? encode_pgm(gray, width, height)
                                    : encode_png(gray, width, height);
}

std::vector<double> GrayImage::intensities() const {
  std::vector<double> out(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) out[i] = bytes[i] / 255.0;
  return out;
}

GrayImage read_gray_image(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::MissingFile, "image not found: " + path.string());
  const auto raw = read_file_bytes(path);
  const std::string_view bytes(reinterpret_cast<const char*>(raw.data()), raw.size());
  static constexpr unsigned char kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (raw.size() >= 8 && std::memcmp(raw.data(), kPngSig, 8) == 0) return decode_png(bytes);
  return decode_pgm(bytes);
}

ImageManifest write_images(const std::vector<TransformImage>& images, const fs::path& dir,
                           ImageFormat format) {
  fs::create_directories(dir);
  ImageManifest manifest;
  manifest.base_dir = dir;
  manifest.entries.resize(images.size());
  parallel_for(images.size(), [&](std::size_t i) {
    const TransformImage& img = images[i];
    if (img.pixels.size() != kImageSize * kImageSize) {
      throw Error(ErrorCode::InvariantViolation, "image is not 150x150", img.source_id);
    }
    const std::string name = img.source_id + std::string(extension_for(format));
    const std::string bytes = encode_image(quantize(img.pixels), kImageSize, kImageSize, format);
    write_file_atomic(dir / name, bytes);
    manifest.entries[i] = ImageManifestEntry{img.source_id, name,       img.label,
                                             img.variant,   img.kind,   kImageSize,
                                             kImageSize,    sha256_hex(bytes)};
  });
  write_image_manifest(manifest, dir / kManifestFileName);
  return manifest;
}

std::vector<TransformImage> load_images(const fs::path& manifest_path) {
  const ImageManifest manifest = read_image_manifest(manifest_path);
  std::vector<TransformImage> out(manifest.entries.size());
  parallel_for(manifest.entries.size(), [&](std::size_t i) {
    const auto& e = manifest.entries[i];
    const fs::path file = manifest.resolve(e);
    if (!fs::exists(file)) throw Error(ErrorCode::MissingFile, "image missing: " + file.string(), e.id);
    if (!e.sha256.empty() && sha256_file(file) != e.sha256) {
      throw Error(ErrorCode::InvariantViolation, "image checksum mismatch", e.id);
    }
    const GrayImage g = read_gray_image(file);
    if (g.width != kImageSize || g.height != kImageSize) {
      throw Error(ErrorCode::InvariantViolation, "image is not 150x150", e.id);
    }
    TransformImage& img = out[i];
    img.pixels = g.intensities();
    img.kind = e.kind;
    img.source_id = e.id;
    img.variant = e.variant;
    img.label = e.label;
  });
  return out;
}

}  // namespace ecgrob
