#pragma once

#include <filesystem>
#include <string>

#include "core/dataset.hpp"
#include "core/trace.hpp"

namespace freqprint {

// Trace file format (UTF-8 text):
//   freqprint-trace v1
//   interval_ms=<int>
//   core_id=<int>
//   start_time=<int64, ms since epoch>
//   meta.<key>=<value>          (optional, repeated)
//   <blank line>
//   <one integer kHz sample per line>
inline constexpr std::string_view kTraceMagic = "freqprint-trace v1";

FrequencyTrace read_trace_file(const std::filesystem::path& path);
void write_trace_file(const FrequencyTrace& trace, const std::filesystem::path& path);

std::string trace_to_string(const FrequencyTrace& trace);
FrequencyTrace trace_from_string(const std::string& text, const std::string& origin = "<string>");

// Dataset manifest: one line per item, `<label>\t<relative trace path>\t<split>`.
// Trace paths are resolved relative to the manifest's directory.
TraceDataset read_manifest(const std::filesystem::path& manifest_path);

struct ManifestEntry {
  std::string label;
  std::string relative_path;
  Split split = Split::unassigned;

  bool operator==(const ManifestEntry&) const = default;
};

// Manifest lines only, without loading any trace (campaign resume, listings).
std::vector<ManifestEntry> read_manifest_entries(const std::filesystem::path& manifest_path);

// Writes the manifest only; trace files are expected to exist already.
void write_manifest(const TraceDataset& ds, const std::vector<std::string>& relative_paths,
                    const std::filesystem::path& manifest_path);

// Writes every trace under dir (one file per item, grouped by label) plus
// dir/manifest.tsv. Returns the manifest path.
std::filesystem::path write_dataset(const TraceDataset& ds, const std::filesystem::path& dir);

// File-system friendly rendition of a label (used for trace file names).
std::string sanitize_label(const std::string& label);

}  // namespace freqprint
