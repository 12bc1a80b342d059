#pragma once

// File helpers: whole-file reads, atomic writes, SHA-256.

#include <filesystem>
#include <string>
#include <string_view>

namespace nnstat::io {

// Throws InputError when the file cannot be read.
std::string read_file(const std::filesystem::path& path);

// Writes to a temporary file in the target directory, then renames it over
// `path`. Throws InputError when the directory is not writable.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

// Lower-case hex digest.
std::string sha256_hex(std::string_view bytes);

}  // namespace nnstat::io
