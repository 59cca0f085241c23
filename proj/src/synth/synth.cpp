#include "synth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "core/text.hpp"

namespace freqprint {

namespace {

void validate_segments(const std::vector<Segment>& segments, std::size_t n_samples,
                       std::size_t n_levels, const std::string& label) {
  for (const Segment& seg : segments) {
    if (seg.length == 0)
      raise(Errc::invalid_argument, "template '" + label + "': zero-length segment");
    if (seg.start >= n_samples || seg.start + seg.length > n_samples)
      raise(Errc::invalid_argument,
            "template '" + label + "': segment exceeds " + std::to_string(n_samples) + " samples");
    if (seg.level_index >= n_levels)
      raise(Errc::invalid_argument, "template '" + label + "': level index out of range");
  }
}

void validate_template(const SignatureTemplate& tpl, std::size_t n_samples) {
  if (tpl.label.empty()) raise(Errc::invalid_argument, "template label must not be empty");
  if (tpl.base_khz <= 0)
    raise(Errc::invalid_argument, "template '" + tpl.label + "': base_khz must be positive");
  for (std::int64_t level : tpl.levels)
    if (level < tpl.base_khz)
      raise(Errc::invalid_argument, "template '" + tpl.label + "': level below base");
  if (tpl.jitter_khz < 0.0)
    raise(Errc::invalid_argument, "template '" + tpl.label + "': negative jitter");
  validate_segments(tpl.segments, n_samples, tpl.levels.size(), tpl.label);
  if (tpl.prefix) validate_segments(tpl.prefix->segments, n_samples, tpl.levels.size(), tpl.label);
}

void apply_segments(const std::vector<Segment>& segments, const std::vector<std::int64_t>& levels,
                    std::vector<std::int64_t>& out) {
  for (const Segment& seg : segments)
    for (std::size_t i = seg.start; i < seg.start + seg.length; ++i)
      out[i] = levels[seg.level_index];
}

}  // namespace

std::vector<std::int64_t> plateau_sequence(const SignatureTemplate& tpl, std::size_t n_samples) {
  validate_template(tpl, n_samples);
  std::vector<std::int64_t> out(n_samples, tpl.base_khz);
  if (tpl.prefix) apply_segments(tpl.prefix->segments, tpl.levels, out);
  apply_segments(tpl.segments, tpl.levels, out);
  return out;
}

std::vector<int> level_index_sequence(const SignatureTemplate& tpl, std::size_t n_samples) {
  validate_template(tpl, n_samples);
  std::vector<int> out(n_samples, -1);
  auto mark = [&](const std::vector<Segment>& segments) {
    for (const Segment& seg : segments)
      for (std::size_t i = seg.start; i < seg.start + seg.length; ++i)
        out[i] = static_cast<int>(seg.level_index);
  };
  if (tpl.prefix) mark(tpl.prefix->segments);
  mark(tpl.segments);
  return out;
}

std::size_t active_sample_count(const SignatureTemplate& tpl, std::size_t n_samples) {
  std::vector<std::int64_t> plateau = plateau_sequence(tpl, n_samples);
  std::size_t count = 0;
  for (std::int64_t v : plateau)
    if (v > tpl.base_khz) ++count;
  return count;
}

TraceDataset generate(const SynthConfig& config) {
  if (config.templates.size() < 2) raise(Errc::invalid_argument, "need at least 2 templates");
  if (config.n_samples == 0) raise(Errc::invalid_argument, "n_samples must be positive");
  if (config.traces_per_class < 5)
    raise(Errc::invalid_argument, "traces_per_class must be at least 5");
  if (config.concurrent_disturbers < 0)
    raise(Errc::invalid_argument, "concurrent_disturbers must be non-negative");
  if (config.disturbance_strength_khz < 0)
    raise(Errc::invalid_argument, "disturbance_strength_khz must be non-negative");
  if (config.interval_ms <= 0) raise(Errc::invalid_argument, "interval_ms must be positive");
  {
    std::vector<std::string> labels;
    for (const SignatureTemplate& tpl : config.templates) {
      validate_template(tpl, config.n_samples);
      labels.push_back(tpl.label);
    }
    std::sort(labels.begin(), labels.end());
    if (std::adjacent_find(labels.begin(), labels.end()) != labels.end())
      raise(Errc::invalid_argument, "duplicate template labels");
  }

  const std::size_t n = config.n_samples;
  TraceDataset ds;
  for (std::size_t class_idx = 0; class_idx < config.templates.size(); ++class_idx) {
    const SignatureTemplate& tpl = config.templates[class_idx];
    const std::vector<std::int64_t> plateau = plateau_sequence(tpl, n);
    const std::int64_t cap =
        tpl.levels.empty() ? tpl.base_khz : *std::max_element(tpl.levels.begin(), tpl.levels.end());

    for (std::size_t trace_idx = 0; trace_idx < config.traces_per_class; ++trace_idx) {
      std::vector<std::int64_t> seq = plateau;

      // Disturbance draws come from their own stream and are consumed one
      // disturber at a time, so a run with more disturbers reproduces the
      // bursts of a run with fewer ones and merely adds to them.
      Rng disturb_rng(derive_seed(config.seed, class_idx, trace_idx, 1));
      const std::size_t len_lo = std::max<std::size_t>(1, n / 50);
      const std::size_t len_hi = std::max(len_lo, n * 2 / 25);
      for (int d = 0; d < config.concurrent_disturbers; ++d) {
        std::size_t start =
            std::uniform_int_distribution<std::size_t>(0, n - 1)(disturb_rng);
        std::size_t length =
            std::uniform_int_distribution<std::size_t>(len_lo, len_hi)(disturb_rng);
        std::size_t end = std::min(n, start + length);
        for (std::size_t i = start; i < end; ++i)
          seq[i] = std::min(cap, seq[i] + config.disturbance_strength_khz);
      }

      Rng jitter_rng(derive_seed(config.seed, class_idx, trace_idx, 0));
      std::vector<std::int64_t> samples(n);
      std::normal_distribution<double> noise(0.0, tpl.jitter_khz);
      for (std::size_t i = 0; i < n; ++i) {
        double v = static_cast<double>(seq[i]);
        if (tpl.jitter_khz > 0.0) {
          double d = noise(jitter_rng);
          d = std::clamp(d, -4.0 * tpl.jitter_khz, 4.0 * tpl.jitter_khz);
          v += d;
        }
        // Snap back to the closest plateau when the excursion is small: real
        // governors report discrete P-states far more often than in-between
        // values.
        std::int64_t nearest = tpl.base_khz;
        double best = std::abs(v - static_cast<double>(tpl.base_khz));
        for (std::int64_t level : tpl.levels) {
          double dist = std::abs(v - static_cast<double>(level));
          if (dist < best) {
            best = dist;
            nearest = level;
          }
        }
        if (best <= tpl.jitter_khz) v = static_cast<double>(nearest);
        if (v < static_cast<double>(tpl.base_khz)) v = static_cast<double>(tpl.base_khz);
        samples[i] = std::llround(v);
      }

      MetaMap meta;
      meta["source"] = "synth";
      meta["template"] = tpl.label;
      meta["disturbers"] = std::to_string(config.concurrent_disturbers);
      ds.add(FrequencyTrace(std::move(samples), config.interval_ms, 0, 0, std::move(meta)),
             tpl.label);
    }
  }
  return ds;
}

std::vector<SignatureTemplate> default_template_bank(int n_classes, std::size_t n_samples,
                                                     std::uint64_t seed) {
  if (n_classes < 2 || n_classes > 64)
    raise(Errc::invalid_argument, "n_classes must be in [2, 64]");
  if (n_samples < 32) raise(Errc::invalid_argument, "n_samples must be at least 32");

  const std::int64_t base = 1'000'000;
  const std::vector<std::int64_t> levels = {1'600'000, 2'200'000, 2'800'000};
  const double jitter = 50'000.0;
  const std::size_t len_lo = std::max<std::size_t>(1, (n_samples * 3 + 50) / 100);
  const std::size_t len_hi = std::max(len_lo, (n_samples * 8 + 50) / 100);
  // Keep the earliest tenth of each signature quiet; very short captures then
  // genuinely carry less evidence than full ones.
  const std::size_t min_start = n_samples / 10;
  const std::size_t min_separation = (n_samples * 15 + 50) / 100;

  Rng rng(derive_seed(seed, 0xbab5ull, n_samples, static_cast<std::uint64_t>(n_classes)));
  std::vector<SignatureTemplate> bank;
  std::vector<std::vector<int>> index_seqs;

  for (int c = 0; c < n_classes; ++c) {
    SignatureTemplate tpl;
    char label[16];
    std::snprintf(label, sizeof(label), "class%02d", c);
    tpl.label = label;
    tpl.base_khz = base;
    tpl.levels = levels;
    tpl.jitter_khz = jitter;

    bool accepted = false;
    for (int attempt = 0; attempt < 500 && !accepted; ++attempt) {
      tpl.segments.clear();
      int n_segments = std::uniform_int_distribution<int>(4, 7)(rng);
      for (int s = 0; s < n_segments; ++s) {
        for (int placement = 0; placement < 200; ++placement) {
          Segment seg;
          seg.length = std::uniform_int_distribution<std::size_t>(len_lo, len_hi)(rng);
          seg.start = std::uniform_int_distribution<std::size_t>(
              min_start, n_samples - seg.length)(rng);
          seg.level_index =
              std::uniform_int_distribution<std::size_t>(0, levels.size() - 1)(rng);
          bool overlaps = std::any_of(
              tpl.segments.begin(), tpl.segments.end(), [&](const Segment& other) {
                return seg.start < other.start + other.length &&
                       other.start < seg.start + seg.length;
              });
          if (!overlaps) {
            tpl.segments.push_back(seg);
            break;
          }
        }
      }
      std::sort(tpl.segments.begin(), tpl.segments.end(),
                [](const Segment& a, const Segment& b) { return a.start < b.start; });

      std::vector<int> seq = level_index_sequence(tpl, n_samples);
      accepted = std::all_of(index_seqs.begin(), index_seqs.end(), [&](const auto& other) {
        std::size_t hamming = 0;
        for (std::size_t i = 0; i < n_samples; ++i)
          if (seq[i] != other[i]) ++hamming;
        return hamming >= min_separation;
      });
      if (accepted) index_seqs.push_back(std::move(seq));
    }
    if (!accepted)
      raise(Errc::invalid_argument, "could not build a separated template bank; "
                                    "fewer classes or more samples needed");
    bank.push_back(std::move(tpl));
  }
  return bank;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string segments_to_string(const std::vector<Segment>& segments) {
  std::string out;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(segments[i].start) + ':' + std::to_string(segments[i].length) + ':' +
           std::to_string(segments[i].level_index);
  }
  return out;
}

std::vector<Segment> segments_from_string(const std::string& text, int line_no) {
  std::vector<Segment> segments;
  if (text.empty()) return segments;
  for (const std::string& part : split_on(text, ',')) {
    std::vector<std::string> fields = split_on(part, ':');
    if (fields.size() != 3)
      throw ParseError(line_no, "segment must be start:length:level_index");
    Segment seg;
    seg.start = static_cast<std::size_t>(parse_int64(fields[0], line_no));
    seg.length = static_cast<std::size_t>(parse_int64(fields[1], line_no));
    seg.level_index = static_cast<std::size_t>(parse_int64(fields[2], line_no));
    segments.push_back(seg);
  }
  return segments;
}

}  // namespace

std::string template_bank_to_string(const std::vector<SignatureTemplate>& bank) {
  std::ostringstream out;
  out << "freqprint-templates v1\n";
  out << "count=" << bank.size() << "\n";
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const SignatureTemplate& tpl = bank[i];
    const std::string prefix = "template." + std::to_string(i) + ".";
    out << prefix << "label=" << tpl.label << "\n";
    out << prefix << "base_khz=" << tpl.base_khz << "\n";
    out << prefix << "levels=";
    for (std::size_t j = 0; j < tpl.levels.size(); ++j)
      out << (j ? "," : "") << tpl.levels[j];
    out << "\n";
    out << prefix << "jitter_khz=" << format_double(tpl.jitter_khz) << "\n";
    out << prefix << "segments=" << segments_to_string(tpl.segments) << "\n";
    if (tpl.prefix) {
      out << prefix << "prefix.name=" << tpl.prefix->name << "\n";
      out << prefix << "prefix.segments=" << segments_to_string(tpl.prefix->segments) << "\n";
    }
  }
  return out.str();
}

std::vector<SignatureTemplate> template_bank_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;

  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    return true;
  };

  if (!next_line() || line != "freqprint-templates v1")
    throw ParseError(1, "expected 'freqprint-templates v1'");

  struct Entry {
    std::string value;
    int line_no;
  };
  std::map<std::string, Entry> entries;
  while (next_line()) {
    if (line.empty()) continue;
    auto [key, value] = split_key_value(line, line_no);
    if (entries.count(key)) throw ParseError(line_no, "duplicate key '" + key + "'");
    entries[key] = Entry{value, line_no};
  }

  auto take = [&](const std::string& key) -> std::optional<Entry> {
    auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    Entry e = it->second;
    entries.erase(it);
    return e;
  };
  auto require = [&](const std::string& key) -> Entry {
    auto e = take(key);
    if (!e) raise(Errc::parse_error, "missing key '" + key + "'");
    return *e;
  };

  Entry count_entry = require("count");
  std::int64_t count = parse_int64(count_entry.value, count_entry.line_no);
  if (count < 0) throw ParseError(count_entry.line_no, "negative template count");

  std::vector<SignatureTemplate> bank;
  for (std::int64_t i = 0; i < count; ++i) {
    const std::string prefix = "template." + std::to_string(i) + ".";
    SignatureTemplate tpl;
    tpl.label = require(prefix + "label").value;
    Entry base = require(prefix + "base_khz");
    tpl.base_khz = parse_int64(base.value, base.line_no);
    Entry levels = require(prefix + "levels");
    if (!levels.value.empty())
      for (const std::string& part : split_on(levels.value, ','))
        tpl.levels.push_back(parse_int64(part, levels.line_no));
    Entry jitter = require(prefix + "jitter_khz");
    tpl.jitter_khz = parse_double(jitter.value, jitter.line_no);
    Entry segments = require(prefix + "segments");
    tpl.segments = segments_from_string(segments.value, segments.line_no);
    auto prefix_name = take(prefix + "prefix.name");
    auto prefix_segments = take(prefix + "prefix.segments");
    if (prefix_name.has_value() != prefix_segments.has_value())
      raise(Errc::parse_error, "prefix.name and prefix.segments must appear together");
    if (prefix_name) {
      PrefixSegment ps;
      ps.name = prefix_name->value;
      ps.segments = segments_from_string(prefix_segments->value, prefix_segments->line_no);
      tpl.prefix = std::move(ps);
    }
    bank.push_back(std::move(tpl));
  }
  if (!entries.empty())
    throw ParseError(entries.begin()->second.line_no,
                     "unexpected key '" + entries.begin()->first + "'");
  return bank;
}

void write_template_bank(const std::string& path, const std::vector<SignatureTemplate>& bank) {
  atomic_write_file(path, template_bank_to_string(bank));
}

std::vector<SignatureTemplate> read_template_bank(const std::string& path) {
  return template_bank_from_string(read_file(path));
}

}  // namespace freqprint
