#pragma once

#include <cstdint>
#include <filesystem>

namespace freqprint {

// Where frequency samples come from. Production reads sysfs; tests inject a
// scripted source so the sampling loop's contract is verifiable off-hardware.
class FrequencySource {
public:
  virtual ~FrequencySource() = default;

  // Current frequency of the core in kHz.
  // Errors: unsupported-platform when the attribute is missing, access-error
  // on permission problems, io-error/format-error otherwise.
  virtual std::int64_t read_khz(int core_id) = 0;
};

inline constexpr const char* kDefaultSysfsRoot = "/sys/devices/system/cpu";

class SysfsFrequencySource : public FrequencySource {
public:
  explicit SysfsFrequencySource(std::filesystem::path root = kDefaultSysfsRoot);

  std::int64_t read_khz(int core_id) override;
  std::filesystem::path attribute_path(int core_id) const;

private:
  std::filesystem::path root_;
};

// Scheduling abstraction. now_ms is monotonic and used for deadlines; wall_ms
// stamps traces (ms since the Unix epoch in production).
class Clock {
public:
  virtual ~Clock() = default;

  virtual std::int64_t now_ms() = 0;
  virtual std::int64_t wall_ms() = 0;
  virtual void sleep_until_ms(std::int64_t deadline_ms) = 0;
};

class SystemClock : public Clock {
public:
  std::int64_t now_ms() override;
  std::int64_t wall_ms() override;
  void sleep_until_ms(std::int64_t deadline_ms) override;
};

}  // namespace freqprint
