#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "core/rng.hpp"
#include "core/trace.hpp"

namespace freqprint {

// Obfuscation workload: bursts of a dependent floating-point kernel on a
// sibling core, separated by randomized idle gaps. `seed` drives the draw
// sequence; `burst_unit_ms` is the modeled wall time of one n_repeat unit and
// is used only by the simulation counterpart (the real injector just runs).
struct NoiseConfig {
  int core_id = 0;
  std::uint64_t n_repeat_lo = 1;
  std::uint64_t n_repeat_hi = 1;
  std::int64_t t_sleep_lo_ms = 100;
  std::int64_t t_sleep_hi_ms = 100;
  std::uint64_t kernel_iterations = 20'000'000;
  double duration_s = 0.0;  // 0 together with a stop flag means "until stopped"
  std::uint64_t seed = 0;
  std::int64_t burst_unit_ms = 10;
};

struct BurstEntry {
  std::int64_t start_ms = 0;  // relative to injector start
  std::uint64_t n_repeat = 0;
  std::int64_t t_sleep_ms = 0;

  bool operator==(const BurstEntry&) const = default;
};

struct BurstLog {
  NoiseConfig config;
  std::vector<BurstEntry> bursts;
};

// One draw stream shared by the injector and the simulation so both see the
// same (n_repeat, t_sleep) sequence for a given config + seed.
class NoiseScheduler {
public:
  NoiseScheduler(const NoiseConfig& config, std::uint64_t seed);

  std::pair<std::uint64_t, std::int64_t> next();  // (n_repeat, t_sleep_ms)

private:
  NoiseConfig config_;
  Rng rng_;
};

void validate_noise_config(const NoiseConfig& config);

// Executes the floating-point kernel `iterations` times; the accumulator is
// consumed by an opaque sink so the loop survives optimization.
void fp_kernel(std::uint64_t iterations);

// Pins the calling thread to config.core_id and runs randomized bursts until
// the stop flag rises or duration_s elapses. Wall-clock timed (steady clock).
BurstLog run_noise_injector(const NoiseConfig& config, const std::atomic<bool>& stop);

// Deterministic stand-in for the injector: replays the same burst schedule on
// a recorded trace, raising every sample whose timestamp falls inside a burst
// to max_khz. Requires max_khz above the trace maximum and a schedule that
// advances time.
FrequencyTrace augment_with_noise(const FrequencyTrace& trace, const NoiseConfig& config,
                                  std::int64_t max_khz, std::uint64_t seed);

std::string burst_log_to_string(const BurstLog& log);
BurstLog burst_log_from_string(const std::string& text);
void write_burst_log(const std::string& path, const BurstLog& log);
BurstLog read_burst_log(const std::string& path);

}  // namespace freqprint
