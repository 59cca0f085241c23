#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/error.hpp"

namespace freqprint {

using MetaMap = std::map<std::string, std::string>;

// One measurement: CPU frequency samples in kHz read from a single core at a
// fixed interval. Immutable after construction; all preprocessing operations
// return new traces and preserve interval_ms / core_id / start_time / meta.
class FrequencyTrace {
public:
  FrequencyTrace(std::vector<std::int64_t> samples, int interval_ms, int core_id,
                 std::int64_t start_time_ms = 0, MetaMap meta = {});

  const std::vector<std::int64_t>& samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  std::int64_t operator[](std::size_t i) const { return samples_[i]; }
  int interval_ms() const noexcept { return interval_ms_; }
  int core_id() const noexcept { return core_id_; }
  std::int64_t start_time_ms() const noexcept { return start_time_ms_; }
  const MetaMap& meta() const noexcept { return meta_; }

  // New trace with the same shape metadata but different samples.
  FrequencyTrace with_samples(std::vector<std::int64_t> samples) const;

  bool operator==(const FrequencyTrace&) const = default;

private:
  std::vector<std::int64_t> samples_;
  int interval_ms_;
  int core_id_;
  std::int64_t start_time_ms_;
  MetaMap meta_;
};

struct ActivityConfig {
  std::int64_t threshold_khz = 1'200'000;  // idle floor plus margin
};

// Centered-window convention shared by gaussian_smooth and moving_max: the
// window at index i spans [i - w/2, i + w - 1 - w/2]. Odd windows are
// symmetric; even windows take the extra sample on the left. Windows are
// clamped at the trace edges.
struct WindowSpan {
  std::size_t lo;  // inclusive
  std::size_t hi;  // inclusive
};
WindowSpan centered_window(std::size_t i, int window, std::size_t length);

// Gaussian-weighted moving average, sigma = window / 4, weights renormalized
// to sum 1 over the clamped window. Output is rounded to whole kHz.
FrequencyTrace gaussian_smooth(const FrequencyTrace& trace, int window);

// Maximum over the centered window at each index.
FrequencyTrace moving_max(const FrequencyTrace& trace, int window);

// Affine map of each sample to (f - f_min) / (f_max - f_min), clipped to [0,1].
std::vector<double> normalize(const FrequencyTrace& trace, std::int64_t f_min,
                              std::int64_t f_max);

// First n samples, metadata preserved.
FrequencyTrace truncate(const FrequencyTrace& trace, std::size_t n);

// Count of samples strictly above the threshold.
std::uint64_t frequency_activity(const FrequencyTrace& trace, const ActivityConfig& cfg);

}  // namespace freqprint
