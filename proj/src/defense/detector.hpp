#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace freqprint {

struct SyscallEvent {
  std::int64_t timestamp_ms = 0;
  std::int64_t pid = 0;
  std::string name;
  std::optional<std::string> path_arg;

  bool operator==(const SyscallEvent&) const = default;
};

// Sampling-loop signature: the cpufreq read shows up as an ordered quadruple
// of syscalls on the same scaling_cur_freq path, repeated at the sampling rate.
struct DetectorConfig {
  std::vector<std::string> pattern = {"fstat", "fadvise64", "read", "close"};
  std::string path_substring = "cpufreq";
  std::size_t min_repetitions = 50;
  double window_s = 10.0;
  std::int64_t max_intra_pattern_gap_ms = 50;
};

struct Detection {
  std::int64_t pid = 0;
  std::int64_t first_flag_time_ms = 0;
  std::size_t repetitions = 0;  // complete occurrences over the whole stream

  bool operator==(const Detection&) const = default;
};

// Parses `<seconds[.millis]> <pid> <syscall> [path]` lines (whitespace
// separated, at most 3 fractional digits, blank lines skipped). Timestamps
// must be non-decreasing per pid; violations raise order-error with the line.
std::vector<SyscallEvent> parse_event_stream(const std::string& text);

// Canonical matching semantics, implemented identically by the test oracle:
// per pid, candidate events are those whose path contains path_substring and
// whose name appears in the pattern; everything else is ignored entirely.
// Candidates feed an in-order matcher: a candidate matching the next expected
// pattern element advances the match if it is the first element or follows
// the previous matched event within max_intra_pattern_gap_ms; otherwise the
// matcher resets and reconsiders the same candidate as a pattern start. A
// completed occurrence is stamped with its last event's time. A pid is
// flagged once >= min_repetitions occurrences fall within some closed window
// of window_s seconds; detections report the first time that happened and
// the total occurrence count, ordered by pid.
std::vector<Detection> detect(const std::vector<SyscallEvent>& events,
                              const DetectorConfig& config);

}  // namespace freqprint
