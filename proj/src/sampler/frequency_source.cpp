#include "sampler/frequency_source.hpp"

#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <thread>

#include "core/error.hpp"
#include "core/text.hpp"

namespace freqprint {

SysfsFrequencySource::SysfsFrequencySource(std::filesystem::path root)
    : root_(std::move(root)) {}

std::filesystem::path SysfsFrequencySource::attribute_path(int core_id) const {
  return root_ / ("cpu" + std::to_string(core_id)) / "cpufreq" / "scaling_cur_freq";
}

std::int64_t SysfsFrequencySource::read_khz(int core_id) {
  if (core_id < 0) raise(Errc::invalid_argument, "negative core id");
  const std::filesystem::path path = attribute_path(core_id);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec))
    raise(Errc::unsupported_platform,
          "no cpufreq attribute for core " + std::to_string(core_id) + " (" + path.string() + ")");

  std::ifstream in(path);
  if (!in) {
    if (errno == EACCES || errno == EPERM)
      raise(Errc::access_error, "permission denied reading " + path.string());
    raise(Errc::io_error, "cannot open " + path.string());
  }
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) raise(Errc::io_error, "read failed on " + path.string());

  while (!content.empty() && (content.back() == '\n' || content.back() == '\r' ||
                              content.back() == ' ' || content.back() == '\t'))
    content.pop_back();
  std::int64_t khz = 0;
  try {
    khz = parse_int64(content, 0);
  } catch (const ParseError&) {
    raise(Errc::format_error, path.string() + " does not contain an integer: '" + content + "'");
  }
  if (khz < 0) raise(Errc::format_error, path.string() + " reports a negative frequency");
  return khz;
}

namespace {

std::int64_t to_ms(std::chrono::steady_clock::duration d) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(d).count();
}

}  // namespace

std::int64_t SystemClock::now_ms() {
  return to_ms(std::chrono::steady_clock::now().time_since_epoch());
}

std::int64_t SystemClock::wall_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

void SystemClock::sleep_until_ms(std::int64_t deadline_ms) {
  const auto deadline =
      std::chrono::steady_clock::time_point(std::chrono::milliseconds(deadline_ms));
  std::this_thread::sleep_until(deadline);
}

}  // namespace freqprint
