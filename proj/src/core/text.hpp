#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace freqprint {

// Shared helpers for the project's line-oriented text formats.

// Splits "key=value" (first '=' wins). Throws ParseError on missing '='.
std::pair<std::string, std::string> split_key_value(const std::string& line, int line_no);

// Strict integer parses; throw ParseError when the whole token is not numeric.
std::int64_t parse_int64(std::string_view token, int line_no);
int parse_int(std::string_view token, int line_no);
double parse_double(std::string_view token, int line_no);

std::vector<std::string> split_on(std::string_view text, char sep);

// Reads a whole file; io_error when unreadable.
std::string read_file(const std::filesystem::path& path);

// Writes content to a temporary file in the same directory, then renames it
// over the destination.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace freqprint
