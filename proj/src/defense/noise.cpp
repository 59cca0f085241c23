#include "defense/noise.hpp"

#include <sched.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <thread>

#include "core/error.hpp"
#include "core/text.hpp"

namespace freqprint {

void validate_noise_config(const NoiseConfig& config) {
  if (config.n_repeat_lo > config.n_repeat_hi)
    raise(Errc::invalid_argument, "n_repeat range is empty");
  if (config.t_sleep_lo_ms > config.t_sleep_hi_ms || config.t_sleep_lo_ms < 0)
    raise(Errc::invalid_argument, "t_sleep range is invalid");
  if (config.kernel_iterations == 0)
    raise(Errc::invalid_argument, "kernel_iterations must be at least 1");
  if (config.duration_s < 0.0) raise(Errc::invalid_argument, "duration_s must be non-negative");
  if (config.burst_unit_ms <= 0)
    raise(Errc::invalid_argument, "burst_unit_ms must be positive");
}

NoiseScheduler::NoiseScheduler(const NoiseConfig& config, std::uint64_t seed)
    : config_(config), rng_(derive_seed(seed, 0x01f5)) {
  validate_noise_config(config);
}

std::pair<std::uint64_t, std::int64_t> NoiseScheduler::next() {
  std::uint64_t n_repeat = std::uniform_int_distribution<std::uint64_t>(
      config_.n_repeat_lo, config_.n_repeat_hi)(rng_);
  std::int64_t t_sleep = std::uniform_int_distribution<std::int64_t>(
      config_.t_sleep_lo_ms, config_.t_sleep_hi_ms)(rng_);
  return {n_repeat, t_sleep};
}

namespace {
volatile double fp_kernel_sink;
}

void fp_kernel(std::uint64_t iterations) {
  // Mirrors the load/add/multiply/store obfuscation loop: a serial dependency
  // chain the compiler cannot collapse or vectorize.
  double a = 1.0000001;
  double b = 0.9999999;
  double c = 1.0;
  for (std::uint64_t i = 0; i < iterations; ++i) {
    c = (c + a) * b;
    if (c > 4.0) c = 1.0;
  }
  fp_kernel_sink = c;
}

BurstLog run_noise_injector(const NoiseConfig& config, const std::atomic<bool>& stop) {
  validate_noise_config(config);
  const long n_cpus = sysconf(_SC_NPROCESSORS_CONF);
  if (config.core_id < 0 || config.core_id >= n_cpus)
    raise(Errc::invalid_argument, "core " + std::to_string(config.core_id) + " does not exist");

  cpu_set_t mask;
  CPU_ZERO(&mask);
  CPU_SET(config.core_id, &mask);
  if (sched_setaffinity(0, sizeof(mask), &mask) != 0)
    raise(Errc::platform_error,
          std::string("cannot pin to core: ") + std::strerror(errno));

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed_ms = [&]() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
  };
  const std::int64_t duration_ms = static_cast<std::int64_t>(config.duration_s * 1000.0);

  NoiseScheduler scheduler(config, config.seed);
  BurstLog log;
  log.config = config;
  while (!stop.load(std::memory_order_relaxed)) {
    if (duration_ms > 0 && elapsed_ms() >= duration_ms) break;
    auto [n_repeat, t_sleep] = scheduler.next();
    BurstEntry entry{elapsed_ms(), n_repeat, t_sleep};
    for (std::uint64_t r = 0; r < n_repeat && !stop.load(std::memory_order_relaxed); ++r)
      fp_kernel(config.kernel_iterations);
    log.bursts.push_back(entry);
    if (t_sleep > 0) {
      auto wake = Clock::now() + std::chrono::milliseconds(t_sleep);
      while (!stop.load(std::memory_order_relaxed) && Clock::now() < wake)
        std::this_thread::sleep_for(std::chrono::milliseconds(
            std::min<std::int64_t>(t_sleep, 20)));
    }
  }
  return log;
}

FrequencyTrace augment_with_noise(const FrequencyTrace& trace, const NoiseConfig& config,
                                  std::int64_t max_khz, std::uint64_t seed) {
  validate_noise_config(config);
  const std::int64_t trace_max = *std::max_element(trace.samples().begin(),
                                                   trace.samples().end());
  if (max_khz <= trace_max)
    raise(Errc::invalid_argument, "max_khz must exceed the trace maximum of " +
                                      std::to_string(trace_max) + " kHz");
  if (config.n_repeat_hi == 0 && config.t_sleep_hi_ms == 0)
    raise(Errc::invalid_argument, "noise schedule never advances time");

  const std::int64_t interval = trace.interval_ms();
  const std::int64_t end_ms = static_cast<std::int64_t>(trace.size()) * interval;
  std::vector<std::int64_t> samples = trace.samples();

  NoiseScheduler scheduler(config, seed);
  std::int64_t t = 0;
  while (t < end_ms) {
    auto [n_repeat, t_sleep] = scheduler.next();
    const std::int64_t burst_ms = static_cast<std::int64_t>(n_repeat) * config.burst_unit_ms;
    if (burst_ms > 0) {
      // Sample i is taken at instant i * interval; raise those inside the burst.
      const std::int64_t first = (t + interval - 1) / interval;
      const std::int64_t last = (t + burst_ms - 1) / interval;
      for (std::int64_t i = std::max<std::int64_t>(first, 0);
           i <= last && i < static_cast<std::int64_t>(samples.size()); ++i)
        samples[static_cast<std::size_t>(i)] = max_khz;
    }
    t += burst_ms + t_sleep;
  }

  MetaMap meta = trace.meta();
  meta["noise_augmented"] = "1";
  return FrequencyTrace(std::move(samples), trace.interval_ms(), trace.core_id(),
                        trace.start_time_ms(), std::move(meta));
}

std::string burst_log_to_string(const BurstLog& log) {
  std::ostringstream out;
  out << "freqprint-burstlog v1\n";
  out << "core_id=" << log.config.core_id << "\n";
  out << "n_repeat_lo=" << log.config.n_repeat_lo << "\n";
  out << "n_repeat_hi=" << log.config.n_repeat_hi << "\n";
  out << "t_sleep_lo_ms=" << log.config.t_sleep_lo_ms << "\n";
  out << "t_sleep_hi_ms=" << log.config.t_sleep_hi_ms << "\n";
  out << "kernel_iterations=" << log.config.kernel_iterations << "\n";
  char duration[32];
  std::snprintf(duration, sizeof(duration), "%.17g", log.config.duration_s);
  out << "duration_s=" << duration << "\n";
  out << "seed=" << log.config.seed << "\n";
  out << "burst_unit_ms=" << log.config.burst_unit_ms << "\n";
  for (const BurstEntry& b : log.bursts)
    out << "burst=" << b.start_ms << "|" << b.n_repeat << "|" << b.t_sleep_ms << "\n";
  return out.str();
}

BurstLog burst_log_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    return true;
  };
  if (!next_line() || line != "freqprint-burstlog v1")
    throw ParseError(1, "expected 'freqprint-burstlog v1'");

  BurstLog log;
  while (next_line()) {
    if (line.empty()) continue;
    auto [key, value] = split_key_value(line, line_no);
    if (key == "burst") {
      std::vector<std::string> fields = split_on(value, '|');
      if (fields.size() != 3)
        throw ParseError(line_no, "burst must be start_ms|n_repeat|t_sleep_ms");
      BurstEntry entry;
      entry.start_ms = parse_int64(fields[0], line_no);
      entry.n_repeat = static_cast<std::uint64_t>(parse_int64(fields[1], line_no));
      entry.t_sleep_ms = parse_int64(fields[2], line_no);
      log.bursts.push_back(entry);
    } else if (key == "core_id") {
      log.config.core_id = parse_int(value, line_no);
    } else if (key == "n_repeat_lo") {
      log.config.n_repeat_lo = static_cast<std::uint64_t>(parse_int64(value, line_no));
    } else if (key == "n_repeat_hi") {
      log.config.n_repeat_hi = static_cast<std::uint64_t>(parse_int64(value, line_no));
    } else if (key == "t_sleep_lo_ms") {
      log.config.t_sleep_lo_ms = parse_int64(value, line_no);
    } else if (key == "t_sleep_hi_ms") {
      log.config.t_sleep_hi_ms = parse_int64(value, line_no);
    } else if (key == "kernel_iterations") {
      log.config.kernel_iterations = static_cast<std::uint64_t>(parse_int64(value, line_no));
    } else if (key == "duration_s") {
      log.config.duration_s = parse_double(value, line_no);
    } else if (key == "seed") {
      log.config.seed = static_cast<std::uint64_t>(parse_int64(value, line_no));
    } else if (key == "burst_unit_ms") {
      log.config.burst_unit_ms = parse_int64(value, line_no);
    } else {
      throw ParseError(line_no, "unknown key '" + key + "'");
    }
  }
  return log;
}

void write_burst_log(const std::string& path, const BurstLog& log) {
  atomic_write_file(path, burst_log_to_string(log));
}

BurstLog read_burst_log(const std::string& path) {
  return burst_log_from_string(read_file(path));
}

}  // namespace freqprint
