#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "doctest.h"
#include "support/checks.hpp"
#include "support/tmpdir.hpp"
#include "synth/synth.hpp"

using freqprint::Errc;
using freqprint::PrefixSegment;
using freqprint::Segment;
using freqprint::SignatureTemplate;
using freqprint::SynthConfig;
using freqprint::TraceDataset;
using testsupport::thrown_code;

namespace {

SignatureTemplate small_template(const std::string& label) {
  SignatureTemplate tpl;
  tpl.label = label;
  tpl.base_khz = 1'000'000;
  tpl.levels = {1'500'000, 2'000'000};
  tpl.segments = {{2, 3, 0}, {4, 2, 1}};
  tpl.jitter_khz = 0.0;
  return tpl;
}

}  // namespace

TEST_CASE("plateau sequence applies segments in order, later wins") {
  SignatureTemplate tpl = small_template("a");
  auto plateau = freqprint::plateau_sequence(tpl, 8);
  CHECK_EQ(plateau, std::vector<std::int64_t>{1'000'000, 1'000'000, 1'500'000, 1'500'000,
                                              2'000'000, 2'000'000, 1'000'000, 1'000'000});
  auto idx = freqprint::level_index_sequence(tpl, 8);
  CHECK_EQ(idx, std::vector<int>{-1, -1, 0, 0, 1, 1, -1, -1});
  CHECK_EQ(freqprint::active_sample_count(tpl, 8), 4);
}

TEST_CASE("prefix segments apply before the main ones") {
  SignatureTemplate tpl = small_template("a");
  tpl.prefix = PrefixSegment{"warmup", {{0, 4, 1}}};
  auto plateau = freqprint::plateau_sequence(tpl, 8);
  // prefix raises [0,4), main overrides [2,6)
  CHECK_EQ(plateau, std::vector<std::int64_t>{2'000'000, 2'000'000, 1'500'000, 1'500'000,
                                              2'000'000, 2'000'000, 1'000'000, 1'000'000});
}

TEST_CASE("template validation") {
  auto plateau_code = [](SignatureTemplate tpl, std::size_t n) {
    return thrown_code([&] { freqprint::plateau_sequence(tpl, n); });
  };
  SignatureTemplate tpl = small_template("a");

  SignatureTemplate bad = tpl;
  bad.label.clear();
  CHECK_EQ(plateau_code(bad, 8), Errc::invalid_argument);
  bad = tpl;
  bad.base_khz = 0;
  CHECK_EQ(plateau_code(bad, 8), Errc::invalid_argument);
  bad = tpl;
  bad.levels[0] = 999'999;  // below base
  CHECK_EQ(plateau_code(bad, 8), Errc::invalid_argument);
  bad = tpl;
  bad.jitter_khz = -1.0;
  CHECK_EQ(plateau_code(bad, 8), Errc::invalid_argument);
  bad = tpl;
  bad.segments[0].length = 0;
  CHECK_EQ(plateau_code(bad, 8), Errc::invalid_argument);
  bad = tpl;
  bad.segments[0] = {6, 3, 0};  // runs past the end
  CHECK_EQ(plateau_code(bad, 8), Errc::invalid_argument);
  bad = tpl;
  bad.segments[0].level_index = 2;
  CHECK_EQ(plateau_code(bad, 8), Errc::invalid_argument);
}

TEST_CASE("generate validates its config") {
  SynthConfig cfg;
  cfg.templates = {small_template("a")};
  cfg.n_samples = 64;
  cfg.traces_per_class = 5;
  CHECK_EQ(thrown_code([&] { freqprint::generate(cfg); }), Errc::invalid_argument);

  cfg.templates = {small_template("a"), small_template("a")};
  CHECK_EQ(thrown_code([&] { freqprint::generate(cfg); }), Errc::invalid_argument);

  cfg.templates = {small_template("a"), small_template("b")};
  cfg.traces_per_class = 4;
  CHECK_EQ(thrown_code([&] { freqprint::generate(cfg); }), Errc::invalid_argument);

  cfg.traces_per_class = 5;
  cfg.concurrent_disturbers = -1;
  CHECK_EQ(thrown_code([&] { freqprint::generate(cfg); }), Errc::invalid_argument);
}

TEST_CASE("generation is deterministic and per-trace streams are stable") {
  SynthConfig cfg;
  cfg.templates = {small_template("a"), small_template("b")};
  for (auto& tpl : cfg.templates) tpl.jitter_khz = 30'000.0;
  cfg.n_samples = 64;
  cfg.traces_per_class = 6;
  cfg.seed = 42;

  TraceDataset first = freqprint::generate(cfg);
  TraceDataset second = freqprint::generate(cfg);
  REQUIRE_EQ(first.size(), 12);
  for (std::size_t i = 0; i < first.size(); ++i)
    CHECK_EQ(first.items()[i].trace, second.items()[i].trace);

  // more traces per class must not disturb the existing ones
  cfg.traces_per_class = 8;
  TraceDataset larger = freqprint::generate(cfg);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t t = 0; t < 6; ++t)
      CHECK_EQ(larger.items()[c * 8 + t].trace, first.items()[c * 6 + t].trace);

  cfg.traces_per_class = 6;
  cfg.seed = 43;
  TraceDataset reseeded = freqprint::generate(cfg);
  bool any_difference = false;
  for (std::size_t i = 0; i < first.size(); ++i)
    if (!(reseeded.items()[i].trace == first.items()[i].trace)) any_difference = true;
  CHECK(any_difference);
}

TEST_CASE("zero jitter reproduces the plateau exactly") {
  SynthConfig cfg;
  cfg.templates = {small_template("a"), small_template("b")};
  cfg.n_samples = 32;
  cfg.traces_per_class = 5;
  TraceDataset ds = freqprint::generate(cfg);
  auto plateau = freqprint::plateau_sequence(cfg.templates[0], 32);
  for (std::size_t t = 0; t < 5; ++t) CHECK_EQ(ds.items()[t].trace.samples(), plateau);
}

TEST_CASE("jittered samples stay above base and mostly snap to plateaus") {
  SynthConfig cfg;
  cfg.templates = {small_template("a"), small_template("b")};
  for (auto& tpl : cfg.templates) tpl.jitter_khz = 50'000.0;
  cfg.n_samples = 400;
  cfg.traces_per_class = 5;
  cfg.seed = 7;
  TraceDataset ds = freqprint::generate(cfg);

  std::vector<std::int64_t> plateaus = {1'000'000, 1'500'000, 2'000'000};
  std::size_t snapped = 0, total = 0;
  for (const auto& item : ds.items()) {
    for (std::int64_t s : item.trace.samples()) {
      CHECK_GE(s, 1'000'000);
      if (std::find(plateaus.begin(), plateaus.end(), s) != plateaus.end()) ++snapped;
      ++total;
    }
  }
  // |N(0, sigma)| <= sigma has probability ~0.68; demand a loose majority
  CHECK_GT(double(snapped) / double(total), 0.5);
}

TEST_CASE("trace metadata names the generator") {
  SynthConfig cfg;
  cfg.templates = {small_template("a"), small_template("b")};
  cfg.n_samples = 32;
  cfg.traces_per_class = 5;
  cfg.interval_ms = 20;
  cfg.concurrent_disturbers = 1;
  cfg.disturbance_strength_khz = 200'000;
  TraceDataset ds = freqprint::generate(cfg);
  CHECK_EQ(ds.classes(), std::vector<std::string>{"a", "b"});
  const auto& item = ds.items()[7];
  CHECK_EQ(item.label, "b");
  CHECK_EQ(item.trace.interval_ms(), 20);
  CHECK_EQ(item.trace.meta().at("source"), "synth");
  CHECK_EQ(item.trace.meta().at("template"), "b");
  CHECK_EQ(item.trace.meta().at("disturbers"), "1");
}

TEST_CASE("disturbance bursts nest as the disturber count grows") {
  SynthConfig cfg;
  cfg.templates = {small_template("a"), small_template("b")};
  cfg.n_samples = 200;
  cfg.traces_per_class = 5;
  cfg.seed = 5;
  cfg.disturbance_strength_khz = 300'000;

  cfg.concurrent_disturbers = 2;
  TraceDataset with2 = freqprint::generate(cfg);
  cfg.concurrent_disturbers = 4;
  TraceDataset with4 = freqprint::generate(cfg);

  std::size_t equal = 0, total = 0;
  for (std::size_t i = 0; i < with2.size(); ++i) {
    const auto& s2 = with2.items()[i].trace.samples();
    const auto& s4 = with4.items()[i].trace.samples();
    for (std::size_t j = 0; j < s2.size(); ++j) {
      // the first two bursts are drawn identically, extra ones only add
      CHECK_GE(s4[j], s2[j]);
      if (s4[j] == s2[j]) ++equal;
      ++total;
    }
  }
  CHECK_GT(equal, total / 4);  // bursts cover a minority of the trace
}

TEST_CASE("disturbance saturates at the top level") {
  SynthConfig cfg;
  cfg.templates = {small_template("a"), small_template("b")};
  cfg.n_samples = 64;
  cfg.traces_per_class = 5;
  cfg.concurrent_disturbers = 8;
  cfg.disturbance_strength_khz = 5'000'000;
  TraceDataset ds = freqprint::generate(cfg);
  for (const auto& item : ds.items())
    for (std::int64_t s : item.trace.samples()) CHECK_LE(s, 2'000'000);
}

TEST_CASE("default template bank is valid, separated, and deterministic") {
  const std::size_t n = 500;
  auto bank = freqprint::default_template_bank(6, n, 3);
  REQUIRE_EQ(bank.size(), 6);

  std::vector<std::vector<int>> seqs;
  for (std::size_t c = 0; c < bank.size(); ++c) {
    const auto& tpl = bank[c];
    CHECK_EQ(tpl.label, "class0" + std::to_string(c));
    CHECK_EQ(tpl.base_khz, 1'000'000);
    CHECK_EQ(tpl.levels, std::vector<std::int64_t>{1'600'000, 2'200'000, 2'800'000});
    CHECK_GE(tpl.segments.size(), 4);
    CHECK_LE(tpl.segments.size(), 7);
    for (std::size_t s = 0; s < tpl.segments.size(); ++s) {
      const auto& seg = tpl.segments[s];
      CHECK_GE(seg.start, n / 10);  // quiet early tenth
      CHECK_LE(seg.start + seg.length, n);
      CHECK_GE(seg.length, (n * 3 + 50) / 100);
      CHECK_LE(seg.length, (n * 8 + 50) / 100);
      if (s > 0) CHECK_GE(seg.start, tpl.segments[s - 1].start + tpl.segments[s - 1].length);
    }
    seqs.push_back(freqprint::level_index_sequence(tpl, n));
  }
  for (std::size_t a = 0; a < seqs.size(); ++a) {
    for (std::size_t b = a + 1; b < seqs.size(); ++b) {
      std::size_t hamming = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (seqs[a][i] != seqs[b][i]) ++hamming;
      CHECK_GE(hamming, (n * 15 + 50) / 100);
    }
  }

  CHECK_EQ(freqprint::default_template_bank(6, n, 3), bank);
  CHECK_NE(freqprint::default_template_bank(6, n, 4), bank);
}

TEST_CASE("default template bank rejects out-of-range requests") {
  CHECK_EQ(thrown_code([] { freqprint::default_template_bank(1, 500, 0); }),
           Errc::invalid_argument);
  CHECK_EQ(thrown_code([] { freqprint::default_template_bank(65, 500, 0); }),
           Errc::invalid_argument);
  CHECK_EQ(thrown_code([] { freqprint::default_template_bank(4, 31, 0); }),
           Errc::invalid_argument);
}

TEST_CASE("template bank text round-trip") {
  auto bank = freqprint::default_template_bank(3, 200, 9);
  bank[1].prefix = PrefixSegment{"warmup", {{0, 10, 2}, {15, 5, 0}}};
  bank[2].jitter_khz = 12345.6789;

  std::string text = freqprint::template_bank_to_string(bank);
  CHECK(text.starts_with("freqprint-templates v1\n"));
  CHECK_EQ(freqprint::template_bank_from_string(text), bank);

  testsupport::TempDir dir;
  auto path = (dir / "bank.tpl").string();
  freqprint::write_template_bank(path, bank);
  CHECK_EQ(freqprint::read_template_bank(path), bank);
}

TEST_CASE("template bank parser rejects malformed inputs") {
  auto code_of = [](const std::string& text) {
    return thrown_code([&] { freqprint::template_bank_from_string(text); });
  };
  CHECK_EQ(code_of("wrong v1\ncount=0\n"), Errc::parse_error);
  CHECK_EQ(code_of("freqprint-templates v1\n"), Errc::parse_error);  // missing count
  CHECK_EQ(code_of("freqprint-templates v1\ncount=1\n"), Errc::parse_error);  // missing body
  const std::string one =
      "freqprint-templates v1\ncount=1\n"
      "template.0.label=a\ntemplate.0.base_khz=1000000\ntemplate.0.levels=1600000\n"
      "template.0.jitter_khz=0\ntemplate.0.segments=10:5:0\n";
  CHECK_EQ(freqprint::template_bank_from_string(one).size(), 1);
  CHECK_EQ(code_of(one + "stray=1\n"), Errc::parse_error);
  CHECK_EQ(code_of(one + "template.0.prefix.name=w\n"), Errc::parse_error);
  CHECK_EQ(code_of(one + "template.0.label=b\n"), Errc::parse_error);  // duplicate
  std::string bad_segment = one;
  bad_segment.replace(bad_segment.find("10:5:0"), 6, "10:5");
  CHECK_EQ(code_of(bad_segment), Errc::parse_error);
}
