#include "sampler/sampler.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <atomic>
#include <barrier>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "core/text.hpp"
#include "core/trace_io.hpp"

namespace freqprint {

int ShellRunner::run(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status < 0) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void validate_sampler_config(const SamplerConfig& config) {
  if (config.interval_ms < 1) raise(Errc::invalid_argument, "interval_ms must be at least 1");
  if (config.num_samples < 1) raise(Errc::invalid_argument, "num_samples must be at least 1");
  if (config.inter_measurement_sleep_s < 0.0)
    raise(Errc::invalid_argument, "inter_measurement_sleep_s must be non-negative");
  if (config.cores.empty()) raise(Errc::invalid_argument, "no cores configured");
  std::vector<int> cores = config.cores;
  std::sort(cores.begin(), cores.end());
  if (std::adjacent_find(cores.begin(), cores.end()) != cores.end())
    raise(Errc::invalid_argument, "duplicate core ids");
  for (int core : cores)
    if (core < 0) raise(Errc::invalid_argument, "negative core id");
}

void validate_campaign_spec(const CampaignSpec& spec) {
  if (spec.targets.empty()) raise(Errc::invalid_argument, "campaign has no targets");
  if (spec.measurements_per_target < 1)
    raise(Errc::invalid_argument, "measurements_per_target must be at least 1");
  std::vector<std::string> labels;
  for (const CampaignTarget& target : spec.targets) {
    if (target.label.empty()) raise(Errc::invalid_argument, "campaign target without a label");
    if (target.launch.empty())
      raise(Errc::invalid_argument, "target '" + target.label + "' has no launch command");
    labels.push_back(target.label);
  }
  std::sort(labels.begin(), labels.end());
  if (std::adjacent_find(labels.begin(), labels.end()) != labels.end())
    raise(Errc::invalid_argument, "duplicate campaign labels");
}

std::int64_t read_core_frequency(int core_id) {
  SysfsFrequencySource source;
  return source.read_khz(core_id);
}

std::vector<FrequencyTrace> collect_measurement(const SamplerConfig& config,
                                                const std::string& launch,
                                                const std::string& kill,
                                                FrequencySource& source, Clock& clock,
                                                ProcessRunner& runner) {
  validate_sampler_config(config);
  if (launch.empty()) raise(Errc::invalid_argument, "empty launch command");

  if (const int status = runner.run(launch); status != 0)
    raise(Errc::target_error,
          "launch command failed with status " + std::to_string(status) + ": " + launch);

  const std::size_t n_cores = config.cores.size();
  std::vector<std::vector<std::int64_t>> samples(n_cores);
  std::vector<std::string> errors(n_cores);
  std::atomic<bool> abort{false};
  std::barrier sync(static_cast<std::ptrdiff_t>(n_cores) + 1);

  const std::int64_t start_wall = clock.wall_ms();
  std::int64_t start_ms = 0;

  {
    std::vector<std::jthread> threads;
    threads.reserve(n_cores);
    for (std::size_t t = 0; t < n_cores; ++t) {
      threads.emplace_back([&, t] {
        const int core = config.cores[t];
        samples[t].reserve(config.num_samples);
        sync.arrive_and_wait();
        for (std::size_t k = 0; k < config.num_samples; ++k) {
          clock.sleep_until_ms(start_ms + static_cast<std::int64_t>(k) * config.interval_ms);
          if (abort.load(std::memory_order_relaxed)) break;
          try {
            samples[t].push_back(source.read_khz(core));
          } catch (const std::exception& e) {
            errors[t] = e.what();
            abort.store(true, std::memory_order_relaxed);
            break;
          }
        }
      });
    }
    start_ms = clock.now_ms();
    sync.arrive_and_wait();
  }  // joins all sampling threads

  if (!kill.empty()) runner.run(kill);  // best effort, even after an abort

  auto make_trace = [&](std::size_t t) {
    return FrequencyTrace(std::move(samples[t]), config.interval_ms, config.cores[t],
                          start_wall);
  };

  if (abort.load()) {
    std::string message = "measurement aborted:";
    for (std::size_t t = 0; t < n_cores; ++t)
      if (!errors[t].empty())
        message += " core " + std::to_string(config.cores[t]) + ": " + errors[t];
    std::vector<FrequencyTrace> partial;
    for (std::size_t t = 0; t < n_cores; ++t)
      if (!samples[t].empty()) partial.push_back(make_trace(t));
    throw PartialDataError(message, std::move(partial));
  }

  std::vector<FrequencyTrace> traces;
  traces.reserve(n_cores);
  for (std::size_t t = 0; t < n_cores; ++t) traces.push_back(make_trace(t));
  return traces;
}

double estimate_campaign_seconds(const SamplerConfig& config, const CampaignSpec& spec) {
  validate_sampler_config(config);
  validate_campaign_spec(spec);
  return static_cast<double>(spec.targets.size()) *
         static_cast<double>(spec.measurements_per_target) *
         static_cast<double>(config.num_samples) * static_cast<double>(config.interval_ms) /
         1000.0;
}

CampaignResult run_campaign(const SamplerConfig& config, const CampaignSpec& spec,
                            const std::filesystem::path& out_dir, FrequencySource& source,
                            Clock& clock, ProcessRunner& runner) {
  validate_sampler_config(config);
  validate_campaign_spec(spec);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) raise(Errc::io_error, "cannot create " + out_dir.string() + ": " + ec.message());

  CampaignResult result;
  result.manifest_path = out_dir / "manifest.tsv";

  // Completed measurements per label: manifest rows divided by core count,
  // rounded up so a half-written measurement is redone in place.
  std::map<std::string, std::size_t> done;
  if (std::filesystem::exists(result.manifest_path)) {
    for (const ManifestEntry& entry : read_manifest_entries(result.manifest_path))
      ++done[entry.label];
    for (auto& [label, rows] : done)
      rows = rows / config.cores.size();
  }

  const std::int64_t sleep_ms =
      static_cast<std::int64_t>(config.inter_measurement_sleep_s * 1000.0);

  for (const CampaignTarget& target : spec.targets) {
    const std::string safe = sanitize_label(target.label);
    const std::filesystem::path label_dir = out_dir / safe;
    std::filesystem::create_directories(label_dir, ec);
    if (ec) raise(Errc::io_error, "cannot create " + label_dir.string() + ": " + ec.message());

    const std::size_t already = std::min(done[target.label], spec.measurements_per_target);
    result.skipped += already;

    for (std::size_t m = already; m < spec.measurements_per_target; ++m) {
      try {
        std::vector<FrequencyTrace> traces =
            collect_measurement(config, target.launch, target.kill, source, clock, runner);

        std::ostringstream manifest_lines;
        for (const FrequencyTrace& trace : traces) {
          const std::string name =
              safe + "_" + std::to_string(m) + "_core" + std::to_string(trace.core_id()) +
              ".trace";
          MetaMap meta = trace.meta();
          meta["label"] = target.label;
          meta["measurement"] = std::to_string(m);
          FrequencyTrace stamped(trace.samples(), trace.interval_ms(), trace.core_id(),
                                 trace.start_time_ms(), std::move(meta));
          write_trace_file(stamped, label_dir / name);
          manifest_lines << target.label << '\t' << safe << '/' << name << '\t'
                         << split_name(Split::unassigned) << '\n';
        }
        std::ofstream manifest(result.manifest_path, std::ios::app);
        manifest << manifest_lines.str();
        manifest.close();
        if (!manifest)
          raise(Errc::io_error, "cannot append to " + result.manifest_path.string());
        ++result.collected;
      } catch (const Error& e) {
        if (e.code() == Errc::io_error) throw;
        result.failures.push_back({target.label, m, e.what()});
      }
      if (sleep_ms > 0) clock.sleep_until_ms(clock.now_ms() + sleep_ms);
    }
  }
  return result;
}

std::vector<int> discover_cores(const std::filesystem::path& sysfs_root) {
  std::vector<int> cores;
  std::error_code ec;
  std::filesystem::directory_iterator it(sysfs_root, ec);
  if (ec) return cores;
  for (const auto& entry : it) {
    const std::string name = entry.path().filename().string();
    if (name.size() <= 3 || name.compare(0, 3, "cpu") != 0) continue;
    const std::string digits = name.substr(3);
    if (!std::all_of(digits.begin(), digits.end(),
                     [](unsigned char c) { return std::isdigit(c); }))
      continue;
    if (std::filesystem::exists(entry.path() / "cpufreq" / "scaling_cur_freq", ec))
      cores.push_back(std::stoi(digits));
  }
  std::sort(cores.begin(), cores.end());
  return cores;
}

std::string campaign_spec_to_string(const CampaignSpec& spec) {
  std::ostringstream out;
  out << "freqprint-campaign v1\n";
  out << "measurements_per_target=" << spec.measurements_per_target << "\n";
  for (const CampaignTarget& target : spec.targets) {
    if (target.label.find('|') != std::string::npos ||
        target.launch.find('|') != std::string::npos ||
        target.kill.find('|') != std::string::npos)
      raise(Errc::invalid_argument, "campaign fields must not contain '|'");
    out << "target=" << target.label << "|" << target.launch << "|" << target.kill << "\n";
  }
  return out.str();
}

CampaignSpec campaign_spec_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    return true;
  };
  if (!next_line() || line != "freqprint-campaign v1")
    throw ParseError(1, "expected 'freqprint-campaign v1'");

  CampaignSpec spec;
  while (next_line()) {
    if (line.empty() || line[0] == '#') continue;
    auto [key, value] = split_key_value(line, line_no);
    if (key == "measurements_per_target") {
      const std::int64_t n = parse_int64(value, line_no);
      if (n < 1) throw ParseError(line_no, "measurements_per_target must be at least 1");
      spec.measurements_per_target = static_cast<std::size_t>(n);
    } else if (key == "target") {
      const std::vector<std::string> fields = split_on(value, '|');
      if (fields.size() != 3)
        throw ParseError(line_no, "target must be <label>|<launch>|<kill>");
      spec.targets.push_back({fields[0], fields[1], fields[2]});
    } else {
      throw ParseError(line_no, "unknown key '" + key + "'");
    }
  }
  validate_campaign_spec(spec);
  return spec;
}

CampaignSpec read_campaign_spec(const std::filesystem::path& path) {
  return campaign_spec_from_string(read_file(path));
}

}  // namespace freqprint
