#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tcrl {

/// Whole file, or standard input for "-". Throws IoError.
std::string read_text(const std::string& path);

/// Writes through a temporary file in the same directory and renames it into
/// place; "-" writes to standard output. Throws IoError.
void write_text_atomic(const std::string& path, std::string_view content);

/// Splits on '\n', dropping a trailing '\r' and blank lines. Line numbers
/// (1-based) of the kept lines go to `line_numbers` when given.
std::vector<std::string> split_lines(std::string_view text,
                                     std::vector<std::size_t>* line_numbers = nullptr);

/// Shortest text that round-trips to the same double.
std::string format_number(double v);

}  // namespace tcrl
