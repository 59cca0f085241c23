#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace freqprint {

enum class Errc {
  invalid_argument,
  parse_error,
  io_error,
  format_error,
  shape_error,
  state_error,
  invalid_dataset,
  unsupported_platform,
  access_error,
  target_error,
  partial_data,
  order_error,
  platform_error,
};

const char* errc_name(Errc c) noexcept;

class Error : public std::runtime_error {
public:
  Error(Errc code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

// Parse failure in a text input; carries the 1-based line number.
class ParseError : public Error {
public:
  ParseError(int line, std::string msg, Errc code = Errc::parse_error)
      : Error(code, "line " + std::to_string(line) + ": " + msg), line_(line) {}

  int line() const noexcept { return line_; }

private:
  int line_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace freqprint
