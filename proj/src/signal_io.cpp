// SPDX-License-Identifier: Apache-2.0
#include "ecgrob/signal_io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <limits>

#include "ecgrob/errors.hpp"
#include "ecgrob/io_util.hpp"

namespace ecgrob {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary signal codec assumes a little-endian host");

constexpr char kMagicF32[4] = {'E', 'C', 'G', 'B'};
constexpr char kMagicF64[4] = {'E', 'C', 'G', 'D'};

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(std::string_view bytes, std::size_t& offset) {
  if (offset + sizeof(T) > bytes.size()) {
    throw Error(ErrorCode::ParseError, "truncated binary signal");
  }
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  offset += sizeof(T);
  return value;
}

double parse_double(std::string_view text, std::size_t line_no) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::ParseError,
                "bad number '" + std::string(text) + "' on line " + std::to_string(line_no));
  }
  return v;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v,
                                       std::chars_format::general, 17);
  return std::string(buf, ptr);
}

std::string encode_csv(const SignalFile& file) {
  std::string out = "fs,label\n";
  out += format_double(file.fs) + "," +
         std::string(file.label ? to_string(*file.label) : std::string_view{}) + "\n";
  for (std::size_t l = 0; l < file.leads.size(); ++l) {
    if (l) out += ',';
    out += "lead" + std::to_string(l + 1);
  }
  out += '\n';
  const std::size_t n = file.leads.empty() ? 0 : file.leads.front().size();
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t l = 0; l < file.leads.size(); ++l) {
      if (l) out += ',';
      out += format_double(file.leads[l][t]);
    }
    out += '\n';
  }
  return out;
}

SignalFile decode_csv(std::string_view bytes) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < bytes.size()) {
    std::size_t end = bytes.find('\n', start);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view line = trim(bytes.substr(start, end - start));
    if (!line.empty()) lines.push_back(line);
    start = end + 1;
  }
  if (lines.size() < 3) throw Error(ErrorCode::ParseError, "csv signal needs a 3-line header");
  if (split(lines[0], ',').size() < 2 || trim(split(lines[0], ',')[0]) != "fs") {
    throw Error(ErrorCode::ParseError, "csv signal must start with 'fs,label'");
  }
  const auto meta = split(lines[1], ',');
  if (meta.size() < 2) throw Error(ErrorCode::ParseError, "csv signal metadata row malformed");

  SignalFile file;
  file.fs = parse_double(meta[0], 2);
  const auto label_text = trim(meta[1]);
  if (!label_text.empty()) {
    file.label = parse_label(label_text);
    if (!file.label) {
      throw Error(ErrorCode::ParseError, "unknown label '" + std::string(label_text) + "'");
    }
  }
  const std::size_t lead_count = split(lines[2], ',').size();
  file.leads.assign(lead_count, {});
  for (auto& lead : file.leads) lead.reserve(lines.size() - 3);
  for (std::size_t i = 3; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    if (cells.size() != lead_count) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(i + 1) + " has " +
                                             std::to_string(cells.size()) + " columns, expected " +
                                             std::to_string(lead_count));
    }
    for (std::size_t l = 0; l < lead_count; ++l) file.leads[l].push_back(parse_double(cells[l], i + 1));
  }
  return file;
}

std::string encode_binary(const SignalFile& file, bool f64) {
  const std::size_t n = file.leads.empty() ? 0 : file.leads.front().size();
  if (file.leads.size() > std::numeric_limits<std::uint32_t>::max() ||
      n > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::InvalidArgument, "signal too large for binary encoding");
  }
  std::string out;
  out.reserve(16 + file.leads.size() * n * (f64 ? 8 : 4));
  out.append(f64 ? kMagicF64 : kMagicF32, 4);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(file.leads.size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(n));
  put<float>(out, static_cast<float>(file.fs));
  for (const auto& lead : file.leads) {
    if (lead.size() != n) throw Error(ErrorCode::InvalidArgument, "leads differ in length");
    for (double v : lead) {
      if (f64) {
        put<double>(out, v);
      } else {
        put<float>(out, static_cast<float>(v));
      }
    }
  }
  return out;
}

SignalFile decode_binary(std::string_view bytes) {
  if (bytes.size() < 4) throw Error(ErrorCode::ParseError, "binary signal shorter than magic");
  bool f64 = false;
  if (std::memcmp(bytes.data(), kMagicF64, 4) == 0) {
    f64 = true;
  } else if (std::memcmp(bytes.data(), kMagicF32, 4) != 0) {
    throw Error(ErrorCode::ParseError, "bad magic in binary signal");
  }
  std::size_t off = 4;
  const auto leads = take<std::uint32_t>(bytes, off);
  const auto samples = take<std::uint32_t>(bytes, off);
  SignalFile file;
  file.fs = take<float>(bytes, off);
  const std::size_t width = f64 ? 8 : 4;
  const std::uint64_t expected = off + std::uint64_t{leads} * samples * width;
  if (expected != bytes.size()) {
    throw Error(ErrorCode::ParseError, "binary signal payload size mismatch");
  }
  file.leads.assign(leads, std::vector<double>(samples));
  for (auto& lead : file.leads) {
    for (auto& v : lead) v = f64 ? take<double>(bytes, off) : take<float>(bytes, off);
  }
  return file;
}

}  // namespace

std::string encode_signal(const SignalFile& file, SignalFormat format) {
  switch (format) {
    case SignalFormat::csv: return encode_csv(file);
    case SignalFormat::binary_f32: return encode_binary(file, false);
    case SignalFormat::binary_f64: return encode_binary(file, true);
  }
  return {};
}

SignalFile decode_signal(std::string_view bytes, SignalFormat format) {
  return format == SignalFormat::csv ? decode_csv(bytes) : decode_binary(bytes);
}

SignalFile read_signal_file(const std::filesystem::path& path) {
  const auto raw = read_file_bytes(path);
  const std::string_view bytes(reinterpret_cast<const char*>(raw.data()), raw.size());
  const auto format = path.extension() == ".csv" ? SignalFormat::csv : SignalFormat::binary_f64;
  return decode_signal(bytes, format);
}

void write_signal_file(const std::filesystem::path& path, const SignalFile& file,
                       SignalFormat format) {
  write_file_atomic(path, encode_signal(file, format));
}

SignalFile to_signal_file(const EcgRecord& record) {
  return SignalFile{record.leads, record.fs, record.label};
}

std::string_view extension_for(SignalFormat format) {
  return format == SignalFormat::csv ? ".csv" : ".ecg";
}

}  // namespace ecgrob
