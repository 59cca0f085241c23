#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/dataset.hpp"

namespace freqprint {

// One burst of elevated frequency within a signature.  `level_index` refers
// into SignatureTemplate::levels.
struct Segment {
  std::size_t start = 0;
  std::size_t length = 0;
  std::size_t level_index = 0;

  bool operator==(const Segment&) const = default;
};

// Optional shared startup phase prepended conceptually to a signature (same
// sample grid; its segments simply come first and may be shared between
// templates to model a common runtime warm-up).
struct PrefixSegment {
  std::string name;
  std::vector<Segment> segments;

  bool operator==(const PrefixSegment&) const = default;
};

struct SignatureTemplate {
  std::string label;
  std::int64_t base_khz = 0;
  std::vector<std::int64_t> levels;  // plateau levels, each >= base_khz
  std::vector<Segment> segments;
  double jitter_khz = 0.0;
  std::optional<PrefixSegment> prefix;

  bool operator==(const SignatureTemplate&) const = default;
};

struct SynthConfig {
  std::vector<SignatureTemplate> templates;
  std::size_t n_samples = 4000;
  std::size_t traces_per_class = 100;
  std::uint64_t seed = 0;
  // Number of simulated co-located workloads adding contention bursts.
  int concurrent_disturbers = 0;
  std::int64_t disturbance_strength_khz = 500'000;
  int interval_ms = 10;
};

// Noise-free plateau for a template: base everywhere, segment levels where
// segments (prefix first, then main) apply.  Later segments win on overlap.
std::vector<std::int64_t> plateau_sequence(const SignatureTemplate& tpl, std::size_t n_samples);

// Per-sample level index of the noise-free plateau: -1 for base, otherwise the
// index into `levels`.  Used for inter-template separation measures.
std::vector<int> level_index_sequence(const SignatureTemplate& tpl, std::size_t n_samples);

// Number of samples whose noise-free plateau sits above base.
std::size_t active_sample_count(const SignatureTemplate& tpl, std::size_t n_samples);

// Generates `traces_per_class` traces per template.  Every trace is derived
// from (seed, class index, trace index) alone, so regeneration with the same
// config is bitwise identical and per-trace work could be parallelized freely.
TraceDataset generate(const SynthConfig& config);

// Builds `n_classes` mutually well-separated templates on a common level grid.
// n_classes must be in [2, 64].
std::vector<SignatureTemplate> default_template_bank(int n_classes, std::size_t n_samples,
                                                     std::uint64_t seed);

std::string template_bank_to_string(const std::vector<SignatureTemplate>& bank);
std::vector<SignatureTemplate> template_bank_from_string(const std::string& text);
void write_template_bank(const std::string& path, const std::vector<SignatureTemplate>& bank);
std::vector<SignatureTemplate> read_template_bank(const std::string& path);

}  // namespace freqprint
