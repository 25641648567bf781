#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace cascade {

/// Shortest decimal that round-trips to the same double; "inf", "-inf", "nan"
/// for non-finite values.
std::string format_double(double v);

/// Scientific display string with 6 significant digits.
std::string format_scientific(double v);

/// Writes to `path.tmp` in the same directory, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace cascade
