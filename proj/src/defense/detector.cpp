#include "defense/detector.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>

#include "core/error.hpp"
#include "core/text.hpp"

namespace freqprint {

namespace {

std::int64_t parse_timestamp_ms(const std::string& token, int line_no) {
  const std::size_t dot = token.find('.');
  const std::string whole = dot == std::string::npos ? token : token.substr(0, dot);
  std::int64_t seconds = parse_int64(whole, line_no);
  if (seconds < 0) throw ParseError(line_no, "negative timestamp");
  std::int64_t millis = 0;
  if (dot != std::string::npos) {
    std::string frac = token.substr(dot + 1);
    if (frac.empty() || frac.size() > 3)
      throw ParseError(line_no, "timestamp fraction must have 1 to 3 digits");
    while (frac.size() < 3) frac += '0';
    millis = parse_int64(frac, line_no);
  }
  return seconds * 1000 + millis;
}

std::vector<std::string> whitespace_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  std::string token;
  while (in >> token) fields.push_back(token);
  return fields;
}

}  // namespace

std::vector<SyscallEvent> parse_event_stream(const std::string& text) {
  std::vector<SyscallEvent> events;
  std::map<std::int64_t, std::int64_t> last_seen;  // pid -> timestamp
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> fields = whitespace_fields(line);
    if (fields.empty()) continue;
    if (fields.size() < 3 || fields.size() > 4)
      throw ParseError(line_no, "expected '<time> <pid> <syscall> [path]', got " +
                                    std::to_string(fields.size()) + " fields");
    SyscallEvent event;
    event.timestamp_ms = parse_timestamp_ms(fields[0], line_no);
    event.pid = parse_int64(fields[1], line_no);
    if (event.pid < 0) throw ParseError(line_no, "negative pid");
    event.name = fields[2];
    if (fields.size() == 4) event.path_arg = fields[3];

    auto [it, inserted] = last_seen.try_emplace(event.pid, event.timestamp_ms);
    if (!inserted) {
      if (event.timestamp_ms < it->second)
        throw ParseError(line_no,
                         "timestamp goes backwards for pid " + std::to_string(event.pid),
                         Errc::order_error);
      it->second = event.timestamp_ms;
    }
    events.push_back(std::move(event));
  }
  return events;
}

std::vector<Detection> detect(const std::vector<SyscallEvent>& events,
                              const DetectorConfig& config) {
  if (config.pattern.empty()) raise(Errc::invalid_argument, "empty detector pattern");
  if (config.min_repetitions == 0)
    raise(Errc::invalid_argument, "min_repetitions must be at least 1");
  if (config.window_s <= 0.0) raise(Errc::invalid_argument, "window_s must be positive");
  if (config.max_intra_pattern_gap_ms < 0)
    raise(Errc::invalid_argument, "max_intra_pattern_gap_ms must be non-negative");
  const std::int64_t window_ms = std::llround(config.window_s * 1000.0);

  struct PidState {
    std::size_t next = 0;                    // index into pattern
    std::int64_t last_match_ms = 0;
    std::deque<std::int64_t> recent;         // occurrence times inside the window
    std::size_t total = 0;
    std::optional<std::int64_t> flagged_at;
  };
  std::map<std::int64_t, PidState> pids;

  for (const SyscallEvent& event : events) {
    if (!event.path_arg ||
        event.path_arg->find(config.path_substring) == std::string::npos)
      continue;
    if (std::find(config.pattern.begin(), config.pattern.end(), event.name) ==
        config.pattern.end())
      continue;

    PidState& state = pids[event.pid];
    bool consumed = false;
    while (!consumed) {
      const bool gap_ok =
          state.next == 0 || event.timestamp_ms - state.last_match_ms <= config.max_intra_pattern_gap_ms;
      if (gap_ok && event.name == config.pattern[state.next]) {
        state.last_match_ms = event.timestamp_ms;
        ++state.next;
        consumed = true;
        if (state.next == config.pattern.size()) {
          state.next = 0;
          ++state.total;
          state.recent.push_back(event.timestamp_ms);
          while (!state.recent.empty() &&
                 state.recent.front() < event.timestamp_ms - window_ms)
            state.recent.pop_front();
          if (!state.flagged_at && state.recent.size() >= config.min_repetitions)
            state.flagged_at = event.timestamp_ms;
        }
      } else if (state.next != 0) {
        state.next = 0;  // reset, then reconsider this event as a pattern start
      } else {
        consumed = true;  // does not start a pattern either
      }
    }
  }

  std::vector<Detection> out;
  for (const auto& [pid, state] : pids)
    if (state.flagged_at) out.push_back({pid, *state.flagged_at, state.total});
  return out;
}

}  // namespace freqprint
