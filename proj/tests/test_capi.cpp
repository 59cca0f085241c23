#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "freqprint.h"
#include "support/tmpdir.hpp"

using testsupport::TempDir;

namespace {

// Owns a char* returned through an out-parameter.
struct CStr {
  char* p = nullptr;
  ~CStr() { fp_string_free(p); }
  std::string str() const { return p != nullptr ? std::string(p) : std::string(); }
};

struct TraceHandle {
  fp_trace* p = nullptr;
  ~TraceHandle() { fp_trace_free(p); }
};

struct DatasetHandle {
  fp_dataset* p = nullptr;
  ~DatasetHandle() { fp_dataset_free(p); }
};

struct ModelHandle {
  fp_model* p = nullptr;
  ~ModelHandle() { fp_model_free(p); }
};

TraceHandle make_trace(const std::vector<int64_t>& samples, int interval_ms = 10,
                       int core = 0) {
  TraceHandle t;
  REQUIRE_EQ(fp_trace_create(samples.data(), samples.size(), interval_ms, core, 0, &t.p),
             FP_OK);
  return t;
}

std::vector<int64_t> samples_of(const fp_trace* t) {
  std::vector<int64_t> out(fp_trace_len(t));
  fp_trace_samples(t, out.data());
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

// Shared synthetic dataset + trained model for the heavier cases.
struct Trained {
  fp_dataset* ds = nullptr;
  fp_dataset* split = nullptr;
  fp_model* model = nullptr;
};

const Trained& trained() {
  static Trained t = [] {
    Trained out;
    fp_templates* bank = nullptr;
    REQUIRE_EQ(fp_templates_default(3, 96, 11, &bank), FP_OK);
    fp_synth_config cfg;
    fp_synth_config_init(&cfg);
    cfg.n_samples = 96;
    cfg.traces_per_class = 10;
    cfg.seed = 11;
    REQUIRE_EQ(fp_synth_generate(bank, &cfg, &out.ds), FP_OK);
    fp_templates_free(bank);

    fp_fit_options opt;
    fp_fit_options_init(&opt);
    opt.batch_size = 8;
    opt.max_epochs = 10;
    opt.patience = 0;
    opt.seed = 7;
    REQUIRE_EQ(fp_fit(out.ds, &opt, nullptr, nullptr, &out.model, &out.split), FP_OK);
    return out;
  }();
  return t;
}

}  // namespace

TEST_CASE("status names, version, and error text") {
  CHECK_EQ(std::string(fp_status_name(FP_OK)), "ok");
  CHECK_EQ(std::string(fp_status_name(FP_ERR_INVALID_ARGUMENT)), "invalid_argument");
  CHECK_EQ(std::string(fp_status_name(FP_ERR_PARTIAL_DATA)), "partial_data");
  CHECK_EQ(std::string(fp_status_name(static_cast<fp_status>(1234))), "unknown");
  CHECK(std::string(fp_version()).find("freqprint") != std::string::npos);

  fp_trace* out = nullptr;
  CHECK_EQ(fp_trace_create(nullptr, 4, 10, 0, 0, &out), FP_ERR_INVALID_ARGUMENT);
  CHECK_GT(std::strlen(fp_last_error()), 0);

  // frees tolerate NULL
  fp_trace_free(nullptr);
  fp_dataset_free(nullptr);
  fp_model_free(nullptr);
  fp_report_free(nullptr);
  fp_ranking_free(nullptr);
  fp_templates_free(nullptr);
  fp_burstlog_free(nullptr);
  fp_detections_free(nullptr);
  fp_sweep_free(nullptr);
  fp_activity_report_free(nullptr);
  fp_string_free(nullptr);
  fp_cores_free(nullptr);
  fp_trace_array_free(nullptr, 3);
}

TEST_CASE("traces round-trip with preprocessing through the C API") {
  TraceHandle t = make_trace({1, 5, 1, 1, 1}, 10, 2);
  CHECK_EQ(fp_trace_len(t.p), 5);
  CHECK_EQ(fp_trace_interval_ms(t.p), 10);
  CHECK_EQ(fp_trace_core_id(t.p), 2);
  CHECK_EQ(fp_trace_start_time_ms(t.p), 0);
  CHECK_EQ(samples_of(t.p), std::vector<int64_t>{1, 5, 1, 1, 1});

  TraceHandle mm;
  REQUIRE_EQ(fp_trace_movmax(t.p, 3, &mm.p), FP_OK);
  CHECK_EQ(samples_of(mm.p), std::vector<int64_t>{5, 5, 5, 1, 1});

  TraceHandle sm;
  REQUIRE_EQ(fp_trace_smooth(t.p, 1, &sm.p), FP_OK);
  CHECK_EQ(samples_of(sm.p), samples_of(t.p));  // window 1 is the identity

  TraceHandle cut;
  REQUIRE_EQ(fp_trace_truncate(t.p, 2, &cut.p), FP_OK);
  CHECK_EQ(samples_of(cut.p), std::vector<int64_t>{1, 5});

  uint64_t active = 0;
  REQUIRE_EQ(fp_trace_activity(t.p, 1, &active), FP_OK);
  CHECK_EQ(active, 1);  // only the 5 is strictly above 1

  TempDir dir;
  const std::string path = (dir / "t.trace").string();
  REQUIRE_EQ(fp_trace_write(t.p, path.c_str()), FP_OK);
  TraceHandle back;
  REQUIRE_EQ(fp_trace_read(path.c_str(), &back.p), FP_OK);
  CHECK_EQ(samples_of(back.p), samples_of(t.p));
  CHECK_EQ(fp_trace_core_id(back.p), 2);

  fp_trace* none = nullptr;
  CHECK_EQ(fp_trace_read((dir / "missing.trace").string().c_str(), &none), FP_ERR_IO);
  CHECK_EQ(fp_trace_movmax(t.p, 0, &none), FP_ERR_INVALID_ARGUMENT);
  CHECK_EQ(fp_trace_truncate(t.p, 9, &none), FP_ERR_INVALID_ARGUMENT);
  CHECK_EQ(fp_trace_write(nullptr, path.c_str()), FP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("datasets build, split, and round-trip through the C API") {
  DatasetHandle ds;
  REQUIRE_EQ(fp_dataset_create(&ds.p), FP_OK);
  CHECK_EQ(fp_dataset_size(ds.p), 0);

  for (int i = 0; i < 5; ++i) {
    TraceHandle a = make_trace({100, 200, 300, 400});
    TraceHandle b = make_trace({900, 800, 700, 600});
    REQUIRE_EQ(fp_dataset_add(ds.p, a.p, "idle"), FP_OK);
    REQUIRE_EQ(fp_dataset_add(ds.p, b.p, "busy"), FP_OK);
  }
  CHECK_EQ(fp_dataset_size(ds.p), 10);
  CHECK_EQ(fp_dataset_num_classes(ds.p), 2);
  CHECK_EQ(std::string(fp_dataset_class_name(ds.p, 0)), "idle");
  CHECK_EQ(std::string(fp_dataset_class_name(ds.p, 1)), "busy");
  CHECK_EQ(fp_dataset_class_name(ds.p, 2), nullptr);
  CHECK_EQ(fp_dataset_has_split(ds.p), 0);

  REQUIRE_EQ(fp_dataset_split(ds.p, 4), FP_OK);
  CHECK_EQ(fp_dataset_has_split(ds.p), 1);

  TempDir dir;
  CStr manifest;
  REQUIRE_EQ(fp_dataset_write(ds.p, (dir / "out").string().c_str(), &manifest.p), FP_OK);
  CHECK(manifest.str().find("manifest.tsv") != std::string::npos);

  DatasetHandle back;
  REQUIRE_EQ(fp_dataset_read(manifest.p, &back.p), FP_OK);
  CHECK_EQ(fp_dataset_size(back.p), 10);
  CHECK_EQ(fp_dataset_num_classes(back.p), 2);
  CHECK_EQ(fp_dataset_has_split(back.p), 1);

  // fewer than 5 traces per class cannot be split
  DatasetHandle tiny;
  REQUIRE_EQ(fp_dataset_create(&tiny.p), FP_OK);
  TraceHandle t = make_trace({1, 2, 3});
  REQUIRE_EQ(fp_dataset_add(tiny.p, t.p, "only"), FP_OK);
  CHECK_EQ(fp_dataset_split(tiny.p, 0), FP_ERR_INVALID_DATASET);

  fp_dataset* none = nullptr;
  CHECK_EQ(fp_dataset_read((dir / "nope.tsv").string().c_str(), &none), FP_ERR_IO);
  CHECK_EQ(fp_dataset_add(ds.p, nullptr, "x"), FP_ERR_INVALID_ARGUMENT);
  CHECK_EQ(fp_dataset_add(ds.p, t.p, nullptr), FP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("template banks generate deterministic synthetic datasets") {
  fp_templates* bank = nullptr;
  REQUIRE_EQ(fp_templates_default(4, 96, 3, &bank), FP_OK);
  CHECK_EQ(fp_templates_len(bank), 4);
  CHECK_EQ(std::string(fp_templates_label(bank, 0)), "class00");
  CHECK_EQ(std::string(fp_templates_label(bank, 3)), "class03");
  CHECK_EQ(fp_templates_label(bank, 4), nullptr);
  REQUIRE_EQ(fp_templates_set_jitter(bank, 10'000.0), FP_OK);

  TempDir dir;
  const std::string path = (dir / "bank.txt").string();
  REQUIRE_EQ(fp_templates_write(bank, path.c_str()), FP_OK);
  fp_templates* reread = nullptr;
  REQUIRE_EQ(fp_templates_read(path.c_str(), &reread), FP_OK);
  CHECK_EQ(fp_templates_len(reread), 4);

  fp_synth_config cfg;
  fp_synth_config_init(&cfg);
  CHECK_EQ(cfg.n_samples, 4000);
  CHECK_EQ(cfg.traces_per_class, 100);
  cfg.n_samples = 96;
  cfg.traces_per_class = 6;
  cfg.seed = 5;

  DatasetHandle a, b;
  REQUIRE_EQ(fp_synth_generate(bank, &cfg, &a.p), FP_OK);
  REQUIRE_EQ(fp_synth_generate(reread, &cfg, &b.p), FP_OK);
  CHECK_EQ(fp_dataset_size(a.p), 24);
  CHECK_EQ(fp_dataset_num_classes(a.p), 4);
  CHECK_EQ(fp_dataset_size(b.p), 24);
  fp_templates_free(bank);
  fp_templates_free(reread);

  fp_templates* none = nullptr;
  CHECK_EQ(fp_templates_default(1, 96, 0, &none), FP_ERR_INVALID_ARGUMENT);
  CHECK_EQ(fp_templates_default(3, 8, 0, &none), FP_ERR_INVALID_ARGUMENT);
  CHECK_EQ(fp_synth_generate(nullptr, &cfg, &a.p), FP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("fit, evaluate, and predict through the C API") {
  const Trained& t = trained();
  REQUIRE(t.model != nullptr);
  REQUIRE(t.split != nullptr);
  CHECK_EQ(fp_dataset_has_split(t.split), 1);
  CHECK_EQ(fp_model_num_classes(t.model), 3);
  CHECK_EQ(fp_model_input_length(t.model), 96);

  CStr desc;
  REQUIRE_EQ(fp_model_describe(t.model, &desc.p), FP_OK);
  CHECK(desc.str().find("conv1d") != std::string::npos);
  CHECK(desc.str().find("softmax") != std::string::npos);

  fp_report* report = nullptr;
  REQUIRE_EQ(fp_evaluate(t.model, t.split, 0, &report), FP_OK);
  CHECK_EQ(fp_report_n_test(report), 6);
  CHECK_GE(fp_report_top1(report), 0.0);
  CHECK_LE(fp_report_top1(report), fp_report_top3(report));
  CHECK_LE(fp_report_top3(report), fp_report_top5(report));
  CHECK_LE(fp_report_top5(report), 1.0);

  CStr text;
  REQUIRE_EQ(fp_report_to_string(report, &text.p), FP_OK);
  CHECK_EQ(text.str().rfind("freqprint-report v1\n", 0), 0);

  TempDir dir;
  const std::string rpath = (dir / "report.txt").string();
  REQUIRE_EQ(fp_report_write(report, rpath.c_str()), FP_OK);
  CHECK(std::filesystem::exists(rpath));

  fp_activity_report* activity = nullptr;
  REQUIRE_EQ(fp_activity(report, t.split, 0, &activity), FP_OK);
  CStr atext;
  REQUIRE_EQ(fp_activity_to_string(activity, &atext.p), FP_OK);
  CHECK(atext.str().find("spearman=") != std::string::npos);
  double rho = 0.0;
  const int has_rho = fp_activity_spearman(activity, &rho);
  if (has_rho == 1) {
    CHECK_GE(rho, -1.0);
    CHECK_LE(rho, 1.0);
  }
  fp_activity_report_free(activity);
  fp_report_free(report);

  // model files round-trip
  const std::string mpath = (dir / "model.fpnn").string();
  REQUIRE_EQ(fp_model_save(t.model, mpath.c_str()), FP_OK);
  ModelHandle loaded;
  REQUIRE_EQ(fp_model_load(mpath.c_str(), &loaded.p), FP_OK);
  CHECK_EQ(fp_model_num_classes(loaded.p), 3);

  // prediction ranks all classes with descending probabilities
  fp_ranking* ranking = nullptr;
  TraceHandle probe;
  {
    // reuse a trace from the synthetic dataset via file round trip
    CStr manifest;
    REQUIRE_EQ(fp_dataset_write(t.split, (dir / "ds").string().c_str(), &manifest.p), FP_OK);
    std::ifstream in(manifest.p);
    std::string label, rel, split;
    REQUIRE(static_cast<bool>(in >> label >> rel >> split));
    const std::string tpath =
        (std::filesystem::path(manifest.p).parent_path() / rel).string();
    REQUIRE_EQ(fp_trace_read(tpath.c_str(), &probe.p), FP_OK);
  }
  REQUIRE_EQ(fp_predict(loaded.p, probe.p, &ranking), FP_OK);
  REQUIRE_EQ(fp_ranking_len(ranking), 3);
  double prev = 1.1;
  double sum = 0.0;
  for (size_t i = 0; i < 3; ++i) {
    CHECK(fp_ranking_label(ranking, i) != nullptr);
    const double p = fp_ranking_probability(ranking, i);
    CHECK_LE(p, prev);
    prev = p;
    sum += p;
  }
  CHECK_EQ(sum, doctest::Approx(1.0));
  CHECK_EQ(fp_ranking_label(ranking, 3), nullptr);
  fp_ranking_free(ranking);

  // evaluating an unsplit dataset fails cleanly
  fp_report* bad = nullptr;
  CHECK_EQ(fp_evaluate(t.model, t.ds, 0, &bad), FP_ERR_INVALID_DATASET);
  CHECK_GT(std::strlen(fp_last_error()), 0);

  fp_model* none = nullptr;
  CHECK_EQ(fp_model_load((dir / "missing.fpnn").string().c_str(), &none), FP_ERR_IO);
  CHECK_EQ(fp_fit(nullptr, nullptr, nullptr, nullptr, &none, nullptr),
           FP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("epoch callbacks observe every epoch") {
  const Trained& t = trained();
  fp_fit_options opt;
  fp_fit_options_init(&opt);
  CHECK_EQ(std::string(opt.preset), "native");
  CHECK_EQ(opt.max_epochs, 100);
  opt.batch_size = 8;
  opt.max_epochs = 2;
  opt.patience = 0;
  opt.seed = 7;

  struct Counter {
    int calls = 0;
    int last_epoch = 0;
  } counter;
  auto cb = [](int epoch, double, double, double, void* user) {
    auto* c = static_cast<Counter*>(user);
    ++c->calls;
    c->last_epoch = epoch;
  };
  ModelHandle model;
  REQUIRE_EQ(fp_fit(t.ds, &opt, cb, &counter, &model.p, nullptr), FP_OK);
  CHECK_EQ(counter.calls, 2);
  CHECK_EQ(counter.last_epoch, 2);
}

TEST_CASE("sample size sweeps run per size") {
  const Trained& t = trained();
  fp_fit_options opt;
  fp_fit_options_init(&opt);
  opt.batch_size = 8;
  opt.max_epochs = 2;
  opt.patience = 0;
  opt.seed = 7;

  const size_t sizes[] = {64, 96};
  fp_sweep* sweep = nullptr;
  REQUIRE_EQ(fp_sample_size_sweep(t.split, sizes, 2, &opt, &sweep), FP_OK);
  CHECK_EQ(fp_sweep_len(sweep), 2);
  CHECK_EQ(fp_sweep_size_at(sweep, 0), 64);
  CHECK_EQ(fp_sweep_size_at(sweep, 1), 96);
  const fp_report* r = fp_sweep_report_at(sweep, 1);
  REQUIRE(r != nullptr);
  CHECK_EQ(fp_report_n_test(r), 6);
  CHECK_EQ(fp_sweep_report_at(sweep, 2), nullptr);
  fp_sweep_free(sweep);

  fp_sweep* none = nullptr;
  CHECK_EQ(fp_sample_size_sweep(t.split, nullptr, 2, &opt, &none),
           FP_ERR_INVALID_ARGUMENT);
  const size_t huge[] = {4000};
  CHECK_EQ(fp_sample_size_sweep(t.split, huge, 1, &opt, &none), FP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("noise simulation and injection through the C API") {
  fp_noise_config cfg;
  fp_noise_config_init(&cfg);
  CHECK_EQ(cfg.n_repeat_lo, 1);
  CHECK_EQ(cfg.burst_unit_ms, 10);

  // same hand-computed overlay as the library-level test
  cfg.n_repeat_lo = cfg.n_repeat_hi = 2;
  cfg.t_sleep_lo_ms = cfg.t_sleep_hi_ms = 30;
  TraceHandle flat = make_trace(std::vector<int64_t>(10, 500));
  TraceHandle noisy;
  REQUIRE_EQ(fp_trace_augment_noise(flat.p, &cfg, 9000, 1, &noisy.p), FP_OK);
  std::vector<int64_t> expected(10, 500);
  for (size_t i : {0u, 1u, 5u, 6u}) expected[i] = 9000;
  CHECK_EQ(samples_of(noisy.p), expected);

  TraceHandle none;
  CHECK_EQ(fp_trace_augment_noise(flat.p, &cfg, 400, 1, &none.p), FP_ERR_INVALID_ARGUMENT);
  fp_noise_config bad = cfg;
  bad.duration_s = -1.0;
  CHECK_EQ(fp_trace_augment_noise(flat.p, &bad, 9000, 1, &none.p),
           FP_ERR_INVALID_ARGUMENT);

  // a short real injection run on core 0
  fp_noise_config run_cfg;
  fp_noise_config_init(&run_cfg);
  run_cfg.core_id = 0;
  run_cfg.n_repeat_lo = run_cfg.n_repeat_hi = 1;
  run_cfg.t_sleep_lo_ms = 5;
  run_cfg.t_sleep_hi_ms = 10;
  run_cfg.kernel_iterations = 10'000;
  run_cfg.duration_s = 0.08;
  fp_burstlog* log = nullptr;
  REQUIRE_EQ(fp_noise_inject(&run_cfg, nullptr, &log), FP_OK);
  CHECK_GE(fp_burstlog_len(log), 1);

  TempDir dir;
  const std::string lpath = (dir / "bursts.txt").string();
  REQUIRE_EQ(fp_burstlog_write(log, lpath.c_str()), FP_OK);
  std::ifstream in(lpath);
  std::string first;
  std::getline(in, first);
  CHECK_EQ(first, "freqprint-burstlog v1");
  fp_burstlog_free(log);

  // a raised stop flag ends an unbounded run
  run_cfg.duration_s = 0.0;
  volatile int stop = 1;
  fp_burstlog* stopped = nullptr;
  REQUIRE_EQ(fp_noise_inject(&run_cfg, &stop, &stopped), FP_OK);
  fp_burstlog_free(stopped);

  CHECK_EQ(fp_noise_inject(&run_cfg, nullptr, &log), FP_ERR_INVALID_ARGUMENT);
  CHECK_EQ(fp_noise_inject(nullptr, &stop, &log), FP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("detection through the C API") {
  fp_detector_config cfg;
  fp_detector_config_init(&cfg);
  CHECK_EQ(cfg.pattern, nullptr);
  CHECK_EQ(cfg.min_repetitions, 50);
  CHECK_EQ(cfg.window_s, 10.0);
  CHECK_EQ(cfg.max_intra_pattern_gap_ms, 50);

  const char* pattern[] = {"read"};
  cfg.pattern = pattern;
  cfg.pattern_len = 1;
  cfg.min_repetitions = 2;
  cfg.window_s = 0.05;

  const char* text = "1.0 7 read /cpufreq/x\n1.05 7 read /cpufreq/x\n";
  fp_detections* hits = nullptr;
  REQUIRE_EQ(fp_detect_text(text, &cfg, &hits), FP_OK);
  REQUIRE_EQ(fp_detections_len(hits), 1);
  CHECK_EQ(fp_detections_pid(hits, 0), 7);
  CHECK_EQ(fp_detections_first_flag_ms(hits, 0), 1050);
  CHECK_EQ(fp_detections_repetitions(hits, 0), 2);
  fp_detections_free(hits);

  TempDir dir;
  const std::string path = (dir / "events.log").string();
  write_text(path, text);
  fp_detections* from_file = nullptr;
  REQUIRE_EQ(fp_detect_file(path.c_str(), &cfg, &from_file), FP_OK);
  CHECK_EQ(fp_detections_len(from_file), 1);
  fp_detections_free(from_file);

  fp_detections* none = nullptr;
  CHECK_EQ(fp_detect_text("broken line\n", &cfg, &none), FP_ERR_PARSE);
  CHECK_EQ(fp_detect_text("2.0 1 read /x\n1.0 1 read /x\n", &cfg, &none), FP_ERR_ORDER);
  CHECK_EQ(fp_detect_file((dir / "nope.log").string().c_str(), &cfg, &none), FP_ERR_IO);
  CHECK_EQ(fp_detect_text(nullptr, &cfg, &none), FP_ERR_INVALID_ARGUMENT);

  fp_detector_config bad = cfg;
  bad.min_repetitions = 0;
  CHECK_EQ(fp_detect_text(text, &bad, &none), FP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("sampler entry points degrade gracefully off-hardware") {
  fp_sampler_config cfg;
  fp_sampler_config_init(&cfg);
  CHECK_EQ(cfg.interval_ms, 10);
  CHECK_EQ(cfg.num_samples, 4000);
  CHECK_EQ(cfg.inter_measurement_sleep_s, 5.0);
  CHECK_EQ(cfg.cores, nullptr);

  int64_t khz = 0;
  const fp_status rs = fp_read_core_frequency(0, &khz);
  if (rs == FP_OK) {
    CHECK_GT(khz, 0);
  } else {
    CHECK_EQ(rs, FP_ERR_UNSUPPORTED_PLATFORM);
  }

  int* cores = nullptr;
  size_t n_cores = 0;
  REQUIRE_EQ(fp_discover_cores(&cores, &n_cores), FP_OK);
  for (size_t i = 0; i < n_cores; ++i) CHECK_GE(cores[i], 0);
  fp_cores_free(cores);

  TempDir dir;
  const std::string spec = (dir / "spec.txt").string();
  write_text(spec,
             "freqprint-campaign v1\nmeasurements_per_target=2\ntarget=idle|true|\n");

  double seconds = 0.0;
  cfg.interval_ms = 10;
  cfg.num_samples = 250;
  REQUIRE_EQ(fp_estimate_campaign_seconds(&cfg, spec.c_str(), &seconds), FP_OK);
  CHECK_EQ(seconds, doctest::Approx(2 * 250 * 10 / 1000.0));
  CHECK_EQ(fp_estimate_campaign_seconds(&cfg, (dir / "no.txt").string().c_str(), &seconds),
           FP_ERR_IO);

  // runs everywhere: collects on cpufreq machines, records failures elsewhere
  fp_sampler_config quick = cfg;
  quick.interval_ms = 1;
  quick.num_samples = 2;
  quick.inter_measurement_sleep_s = 0.0;
  CStr manifest, summary;
  REQUIRE_EQ(fp_run_campaign(&quick, spec.c_str(), (dir / "out").string().c_str(),
                             &manifest.p, &summary.p),
             FP_OK);
  CHECK(manifest.str().find("manifest.tsv") != std::string::npos);
  CHECK_EQ(summary.str().rfind("collected=", 0), 0);
  const bool collected = summary.str().rfind("collected=2 skipped=0 failures=0", 0) == 0;
  const bool failed = summary.str().find("failures=2") != std::string::npos;
  CHECK((collected || failed));

  fp_trace** traces = nullptr;
  size_t n_traces = 0;
  CHECK_EQ(fp_collect(nullptr, "true", nullptr, &traces, &n_traces),
           FP_ERR_INVALID_ARGUMENT);
  const fp_status cs = fp_collect(&quick, "true", nullptr, &traces, &n_traces);
  if (cs == FP_OK) {
    CHECK_GT(n_traces, 0);
    fp_trace_array_free(traces, n_traces);
  } else {
    CHECK_EQ(cs, FP_ERR_PARTIAL_DATA);
  }
}
