#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace symquot {

/// Shortest decimal form that round-trips to the same double.
std::string format_number(double v);

/// One CSV line (no quoting; fields must not contain commas).
std::string csv_line(const std::vector<std::string>& fields);

void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace symquot
