#include "core/text.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace freqprint {

std::pair<std::string, std::string> split_key_value(const std::string& line, int line_no) {
  const auto eq = line.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ParseError(line_no, "expected key=value, got '" + line + "'");
  return {line.substr(0, eq), line.substr(eq + 1)};
}

std::int64_t parse_int64(std::string_view token, int line_no) {
  std::int64_t value = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ParseError(line_no, "expected integer, got '" + std::string(token) + "'");
  return value;
}

int parse_int(std::string_view token, int line_no) {
  const std::int64_t v = parse_int64(token, line_no);
  if (v < INT32_MIN || v > INT32_MAX)
    throw ParseError(line_no, "integer out of range: '" + std::string(token) + "'");
  return static_cast<int>(v);
}

double parse_double(std::string_view token, int line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw ParseError(line_no, "expected number, got '" + std::string(token) + "'");
  return value;
}

std::vector<std::string> split_on(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(text.substr(start));
      return out;
    }
    out.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io_error, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) raise(Errc::io_error, "read failure on " + path.string());
  return std::move(buf).str();
}

void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::io_error, "cannot create " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) raise(Errc::io_error, "write failure on " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) raise(Errc::io_error, "cannot rename " + tmp.string() + " to " + path.string());
}

}  // namespace freqprint
