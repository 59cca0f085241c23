#include "core/trace_io.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

#include "core/text.hpp"

namespace freqprint {

namespace {

std::vector<std::string> to_lines(const std::string& text) {
  std::vector<std::string> lines = split_on(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();  // trailing newline
  for (auto& line : lines) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
  }
  return lines;
}

}  // namespace

std::string trace_to_string(const FrequencyTrace& trace) {
  std::ostringstream out;
  out << kTraceMagic << '\n';
  out << "interval_ms=" << trace.interval_ms() << '\n';
  out << "core_id=" << trace.core_id() << '\n';
  out << "start_time=" << trace.start_time_ms() << '\n';
  for (const auto& [key, value] : trace.meta()) out << "meta." << key << '=' << value << '\n';
  out << '\n';
  for (std::int64_t s : trace.samples()) out << s << '\n';
  return std::move(out).str();
}

FrequencyTrace trace_from_string(const std::string& text, const std::string& origin) {
  const std::vector<std::string> lines = to_lines(text);
  if (lines.empty() || lines[0] != kTraceMagic)
    throw ParseError(1, origin + ": missing '" + std::string(kTraceMagic) + "' header");

  std::optional<int> interval_ms;
  std::optional<int> core_id;
  std::optional<std::int64_t> start_time;
  MetaMap meta;

  std::size_t i = 1;
  for (; i < lines.size() && !lines[i].empty(); ++i) {
    const int line_no = static_cast<int>(i + 1);
    auto [key, value] = split_key_value(lines[i], line_no);
    if (key == "interval_ms") {
      interval_ms = parse_int(value, line_no);
    } else if (key == "core_id") {
      core_id = parse_int(value, line_no);
    } else if (key == "start_time") {
      start_time = parse_int64(value, line_no);
    } else if (key.starts_with("meta.")) {
      meta[key.substr(5)] = value;
    } else {
      throw ParseError(line_no, origin + ": unknown header key '" + key + "'");
    }
  }

  const int header_end = static_cast<int>(i + 1);
  if (!interval_ms) throw ParseError(header_end, origin + ": missing required key interval_ms");
  if (!core_id) throw ParseError(header_end, origin + ": missing required key core_id");
  if (!start_time) throw ParseError(header_end, origin + ": missing required key start_time");
  if (i >= lines.size())
    throw ParseError(header_end, origin + ": missing blank line before samples");
  ++i;  // skip the blank separator

  std::vector<std::int64_t> samples;
  for (; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i + 1);
    if (lines[i].empty()) throw ParseError(line_no, origin + ": blank line inside samples");
    const std::int64_t v = parse_int64(lines[i], line_no);
    if (v < 0) throw ParseError(line_no, origin + ": negative sample");
    samples.push_back(v);
  }
  if (samples.empty())
    throw ParseError(static_cast<int>(lines.size() + 1), origin + ": empty samples section");

  try {
    return FrequencyTrace(std::move(samples), *interval_ms, *core_id, *start_time,
                          std::move(meta));
  } catch (const Error& e) {
    throw ParseError(header_end, origin + ": " + e.what());
  }
}

FrequencyTrace read_trace_file(const std::filesystem::path& path) {
  return trace_from_string(read_file(path), path.string());
}

void write_trace_file(const FrequencyTrace& trace, const std::filesystem::path& path) {
  atomic_write_file(path, trace_to_string(trace));
}

std::vector<ManifestEntry> read_manifest_entries(const std::filesystem::path& manifest_path) {
  const std::vector<std::string> lines = to_lines(read_file(manifest_path));
  std::vector<ManifestEntry> entries;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i + 1);
    if (lines[i].empty()) continue;
    const std::vector<std::string> fields = split_on(lines[i], '\t');
    if (fields.size() != 3)
      throw ParseError(line_no, manifest_path.string() + ": expected 3 tab-separated fields");
    ManifestEntry entry;
    entry.label = fields[0];
    if (entry.label.empty()) throw ParseError(line_no, manifest_path.string() + ": empty label");
    entry.relative_path = fields[1];
    try {
      entry.split = split_from_name(fields[2]);
    } catch (const Error& e) {
      throw ParseError(line_no, manifest_path.string() + ": " + e.what());
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

TraceDataset read_manifest(const std::filesystem::path& manifest_path) {
  const std::filesystem::path base = manifest_path.parent_path();
  TraceDataset ds;
  for (const ManifestEntry& entry : read_manifest_entries(manifest_path))
    ds.add(read_trace_file(base / entry.relative_path), entry.label, entry.split);
  return ds;
}

void write_manifest(const TraceDataset& ds, const std::vector<std::string>& relative_paths,
                    const std::filesystem::path& manifest_path) {
  if (relative_paths.size() != ds.size())
    raise(Errc::invalid_argument, "manifest path count does not match dataset size");
  std::ostringstream out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << ds.items()[i].label << '\t' << relative_paths[i] << '\t'
        << split_name(ds.split_assignment()[i]) << '\n';
  }
  atomic_write_file(manifest_path, std::move(out).str());
}

std::string sanitize_label(const std::string& label) {
  std::string out = label;
  std::replace_if(
      out.begin(), out.end(),
      [](char c) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
        return !ok;
      },
      '_');
  return out;
}

std::filesystem::path write_dataset(const TraceDataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> rel_paths;
  rel_paths.reserve(ds.size());
  std::map<std::string, std::size_t> per_label_counter;
  for (const auto& item : ds.items()) {
    const std::string safe = sanitize_label(item.label);
    const std::size_t idx = per_label_counter[item.label]++;
    const std::filesystem::path rel =
        std::filesystem::path(safe) / (safe + "_" + std::to_string(idx) + ".trace");
    std::filesystem::create_directories(dir / rel.parent_path());
    write_trace_file(item.trace, dir / rel);
    rel_paths.push_back(rel.generic_string());
  }
  const std::filesystem::path manifest = dir / "manifest.tsv";
  write_manifest(ds, rel_paths, manifest);
  return manifest;
}

}  // namespace freqprint
