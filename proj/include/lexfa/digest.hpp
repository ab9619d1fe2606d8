#pragma once

#include <filesystem>
#include <span>
#include <string>

namespace lexfa {

/// Lowercase hex SHA-256 of a file's bytes. IoError when unreadable.
std::string sha256_file(const std::filesystem::path& path);

/// SHA-256 over the listed files of a directory, each contributing its name, a NUL byte,
/// its size and its bytes, in the order given.
std::string sha256_files(const std::filesystem::path& dir, std::span<const std::string> names);

}  // namespace lexfa
