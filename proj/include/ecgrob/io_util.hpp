// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ecgrob {

std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it over `path`, so readers never
// observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
void write_file_atomic(const std::filesystem::path& path, const std::vector<unsigned char>& bytes);

std::string sha256_hex(std::string_view bytes);
std::string sha256_hex(const std::vector<unsigned char>& bytes);
std::string sha256_file(const std::filesystem::path& path);

std::vector<std::string> split(std::string_view line, char sep);
std::string_view trim(std::string_view text);

}  // namespace ecgrob
