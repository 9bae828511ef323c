#pragma once

#include <filesystem>
#include <string>

namespace ibvs {

// Shortest decimal string that parses back to the same double. Keeps CSV and
// model files byte-stable across runs.
std::string format_double(double value);

// Inverse of format_double. Throws std::invalid_argument on garbage.
double parse_double(const std::string& text);

// Writes to <path>.tmp and renames onto <path>, so readers never observe a
// partially written file. Throws std::runtime_error on I/O failure.
void atomic_write_file(const std::filesystem::path& path,
                       const std::string& contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace ibvs
