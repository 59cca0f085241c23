#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "core/trace.hpp"
#include "sampler/frequency_source.hpp"

namespace freqprint {

struct SamplerConfig {
  int interval_ms = 10;                    // T_i
  std::size_t num_samples = 4000;          // N_s
  double inter_measurement_sleep_s = 5.0;  // cool-down between measurements
  std::vector<int> cores = {0};
};

struct CampaignTarget {
  std::string label;
  std::string launch;  // opaque shell command, must return after starting the target
  std::string kill;    // empty = nothing to kill
};

struct CampaignSpec {
  std::vector<CampaignTarget> targets;
  std::size_t measurements_per_target = 100;  // N_M
};

// Opaque shell execution, injectable for tests.
class ProcessRunner {
public:
  virtual ~ProcessRunner() = default;
  virtual int run(const std::string& command) = 0;  // exit status, negative on spawn failure
};

class ShellRunner : public ProcessRunner {
public:
  int run(const std::string& command) override;
};

// Mid-measurement read failure: carries whatever each core collected before
// the abort, so callers can decide between discarding and inspecting.
class PartialDataError : public Error {
public:
  PartialDataError(std::string msg, std::vector<FrequencyTrace> partial)
      : Error(Errc::partial_data, std::move(msg)), partial_(std::move(partial)) {}

  const std::vector<FrequencyTrace>& partial() const noexcept { return partial_; }

private:
  std::vector<FrequencyTrace> partial_;
};

void validate_sampler_config(const SamplerConfig& config);
void validate_campaign_spec(const CampaignSpec& spec);

// Production convenience: one sysfs read of the core's current frequency.
std::int64_t read_core_frequency(int core_id);

// Launches the target, samples every configured core concurrently (one thread
// per core, common start barrier, per-step absolute deadlines: the k-th read
// is scheduled at start + k * interval), kills the target, and returns one
// trace per core in the order of config.cores.
std::vector<FrequencyTrace> collect_measurement(const SamplerConfig& config,
                                                const std::string& launch,
                                                const std::string& kill,
                                                FrequencySource& source, Clock& clock,
                                                ProcessRunner& runner);

struct CampaignEntryError {
  std::string label;
  std::size_t measurement = 0;
  std::string message;
};

struct CampaignResult {
  std::filesystem::path manifest_path;
  std::size_t collected = 0;  // newly collected measurements
  std::size_t skipped = 0;    // measurements already present (resume)
  std::vector<CampaignEntryError> failures;
};

// Runs the full campaign into out_dir (trace files plus manifest.tsv).
// Existing manifest entries count as completed measurements and are skipped,
// collection errors are recorded per entry and the campaign moves on; only
// I/O problems abort. Sleeps inter_measurement_sleep_s after every attempt.
CampaignResult run_campaign(const SamplerConfig& config, const CampaignSpec& spec,
                            const std::filesystem::path& out_dir, FrequencySource& source,
                            Clock& clock, ProcessRunner& runner);

// Sampling time only (labels x measurements x N_s x T_i), without cool-downs.
double estimate_campaign_seconds(const SamplerConfig& config, const CampaignSpec& spec);

// Sorted core ids exposing a scaling_cur_freq attribute under root; empty on
// machines without cpufreq.
std::vector<int> discover_cores(const std::filesystem::path& sysfs_root = kDefaultSysfsRoot);

// Campaign spec text format:
//   freqprint-campaign v1
//   measurements_per_target=<N_M>
//   target=<label>|<launch command>|<kill command>
std::string campaign_spec_to_string(const CampaignSpec& spec);
CampaignSpec campaign_spec_from_string(const std::string& text);
CampaignSpec read_campaign_spec(const std::filesystem::path& path);

}  // namespace freqprint
