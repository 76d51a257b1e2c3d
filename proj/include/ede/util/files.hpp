#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace ede::util {

/// Reads the whole file; throws ede::Error naming the path on failure.
std::string read_file(const std::filesystem::path& path);

/// Writes `content`, creating parent directories as needed.
void write_file(const std::filesystem::path& path, std::string_view content);

/// Resolves `p` against `base` unless it is already absolute.
std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p);

}  // namespace ede::util
