#include "freqprint.h"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "classifier/classifier.hpp"
#include "core/dataset.hpp"
#include "core/error.hpp"
#include "core/text.hpp"
#include "core/trace.hpp"
#include "core/trace_io.hpp"
#include "defense/detector.hpp"
#include "defense/noise.hpp"
#include "nn/network.hpp"
#include "sampler/sampler.hpp"
#include "synth/synth.hpp"

using namespace freqprint;

struct fp_trace {
  FrequencyTrace t;
};
struct fp_dataset {
  TraceDataset ds;
};
struct fp_templates {
  std::vector<SignatureTemplate> bank;
};
struct fp_model {
  Network net;
};
struct fp_report {
  EvalReport r;
};
struct fp_ranking {
  std::vector<std::pair<std::string, double>> ranked;
};
struct fp_activity_report {
  ActivityReport r;
};
struct fp_sweep {
  std::vector<std::size_t> sizes;
  std::vector<std::unique_ptr<fp_report>> reports;
};
struct fp_burstlog {
  BurstLog log;
};
struct fp_detections {
  std::vector<Detection> d;
};

namespace {

thread_local std::string g_last_error;

fp_status status_from(Errc c) {
  switch (c) {
    case Errc::invalid_argument: return FP_ERR_INVALID_ARGUMENT;
    case Errc::parse_error: return FP_ERR_PARSE;
    case Errc::io_error: return FP_ERR_IO;
    case Errc::format_error: return FP_ERR_FORMAT;
    case Errc::shape_error: return FP_ERR_SHAPE;
    case Errc::state_error: return FP_ERR_STATE;
    case Errc::invalid_dataset: return FP_ERR_INVALID_DATASET;
    case Errc::unsupported_platform: return FP_ERR_UNSUPPORTED_PLATFORM;
    case Errc::access_error: return FP_ERR_ACCESS;
    case Errc::target_error: return FP_ERR_TARGET;
    case Errc::partial_data: return FP_ERR_PARTIAL_DATA;
    case Errc::order_error: return FP_ERR_ORDER;
    case Errc::platform_error: return FP_ERR_PLATFORM;
  }
  return FP_ERR_UNKNOWN;
}

fp_status fail(fp_status s, const char* msg) {
  g_last_error = msg;
  return s;
}

// Runs fn, translating exceptions into status codes + fp_last_error.
template <typename Fn>
fp_status guarded(Fn&& fn) {
  try {
    fn();
    return FP_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_from(e.code());
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return FP_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FP_ERR_UNKNOWN;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

fp_status string_out(const std::string& s, char** out) {
  if (out == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null out-parameter");
  char* dup = dup_string(s);
  if (dup == nullptr) return fail(FP_ERR_UNKNOWN, "out of memory");
  *out = dup;
  return FP_OK;
}

SamplerConfig sampler_config_from(const fp_sampler_config& c) {
  SamplerConfig cfg;
  cfg.interval_ms = c.interval_ms;
  cfg.num_samples = c.num_samples;
  cfg.inter_measurement_sleep_s = c.inter_measurement_sleep_s;
  if (c.cores != nullptr && c.n_cores > 0) cfg.cores.assign(c.cores, c.cores + c.n_cores);
  return cfg;
}

NoiseConfig noise_config_from(const fp_noise_config& c) {
  NoiseConfig cfg;
  cfg.core_id = c.core_id;
  cfg.n_repeat_lo = c.n_repeat_lo;
  cfg.n_repeat_hi = c.n_repeat_hi;
  cfg.t_sleep_lo_ms = c.t_sleep_lo_ms;
  cfg.t_sleep_hi_ms = c.t_sleep_hi_ms;
  cfg.kernel_iterations = c.kernel_iterations;
  cfg.duration_s = c.duration_s;
  cfg.seed = c.seed;
  cfg.burst_unit_ms = c.burst_unit_ms;
  return cfg;
}

DetectorConfig detector_config_from(const fp_detector_config& c) {
  DetectorConfig cfg;
  if (c.pattern != nullptr && c.pattern_len > 0) {
    cfg.pattern.assign(c.pattern, c.pattern + c.pattern_len);
  }
  if (c.path_substring != nullptr) cfg.path_substring = c.path_substring;
  cfg.min_repetitions = c.min_repetitions;
  cfg.window_s = c.window_s;
  cfg.max_intra_pattern_gap_ms = c.max_intra_pattern_gap_ms;
  return cfg;
}

FitOptions fit_options_from(const fp_fit_options& o) {
  FitOptions opt;
  if (o.preset != nullptr) opt.preset = o.preset;
  opt.train.learning_rate = o.learning_rate;
  opt.train.batch_size = o.batch_size;
  opt.train.max_epochs = o.max_epochs;
  opt.train.patience = o.patience;
  opt.train.seed = o.seed;
  opt.truncate_len = o.truncate_len;
  opt.smooth_window = o.smooth_window;
  opt.movmax_window = o.movmax_window;
  return opt;
}

}  // namespace

extern "C" {

const char* fp_status_name(fp_status status) {
  switch (status) {
    case FP_OK: return "ok";
    case FP_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case FP_ERR_PARSE: return "parse_error";
    case FP_ERR_IO: return "io_error";
    case FP_ERR_FORMAT: return "format_error";
    case FP_ERR_SHAPE: return "shape_error";
    case FP_ERR_STATE: return "state_error";
    case FP_ERR_INVALID_DATASET: return "invalid_dataset";
    case FP_ERR_UNSUPPORTED_PLATFORM: return "unsupported_platform";
    case FP_ERR_ACCESS: return "access_error";
    case FP_ERR_TARGET: return "target_error";
    case FP_ERR_PARTIAL_DATA: return "partial_data";
    case FP_ERR_ORDER: return "order_error";
    case FP_ERR_PLATFORM: return "platform_error";
    case FP_ERR_UNKNOWN: break;
  }
  return "unknown";
}

const char* fp_last_error(void) { return g_last_error.c_str(); }

const char* fp_version(void) { return "freqprint 1.0.0"; }

void fp_string_free(char* s) { std::free(s); }

/* ---------------------------------------------------------------- traces */

fp_status fp_trace_create(const int64_t* samples_khz, size_t n_samples, int interval_ms,
                          int core_id, int64_t start_time_ms, fp_trace** out) {
  if (samples_khz == nullptr && n_samples > 0)
    return fail(FP_ERR_INVALID_ARGUMENT, "null samples");
  if (out == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null out-parameter");
  return guarded([&] {
    std::vector<std::int64_t> samples(samples_khz, samples_khz + n_samples);
    *out = new fp_trace{FrequencyTrace(std::move(samples), interval_ms, core_id, start_time_ms)};
  });
}

fp_status fp_trace_read(const char* path, fp_trace** out) {
  if (path == nullptr || out == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new fp_trace{read_trace_file(path)}; });
}

fp_status fp_trace_write(const fp_trace* trace, const char* path) {
  if (trace == nullptr || path == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { write_trace_file(trace->t, path); });
}

void fp_trace_free(fp_trace* trace) { delete trace; }

size_t fp_trace_len(const fp_trace* trace) { return trace->t.size(); }
int fp_trace_interval_ms(const fp_trace* trace) { return trace->t.interval_ms(); }
int fp_trace_core_id(const fp_trace* trace) { return trace->t.core_id(); }
int64_t fp_trace_start_time_ms(const fp_trace* trace) { return trace->t.start_time_ms(); }

void fp_trace_samples(const fp_trace* trace, int64_t* buf) {
  const auto& s = trace->t.samples();
  std::memcpy(buf, s.data(), s.size() * sizeof(int64_t));
}

fp_status fp_trace_smooth(const fp_trace* trace, int window, fp_trace** out) {
  if (trace == nullptr || out == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new fp_trace{gaussian_smooth(trace->t, window)}; });
}

fp_status fp_trace_movmax(const fp_trace* trace, int window, fp_trace** out) {
  if (trace == nullptr || out == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new fp_trace{moving_max(trace->t, window)}; });
}

fp_status fp_trace_truncate(const fp_trace* trace, size_t n, fp_trace** out) {
  if (trace == nullptr || out == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new fp_trace{truncate(trace->t, n)}; });
}

fp_status fp_trace_activity(const fp_trace* trace, int64_t threshold_khz, uint64_t* out) {
  if (trace == nullptr || out == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    ActivityConfig cfg;
    if (threshold_khz > 0) cfg.threshold_khz = threshold_khz;
    *out = frequency_activity(trace->t, cfg);
  });
}

/* --------------------------------------------------------------- dataset */

fp_status fp_dataset_create(fp_dataset** out) {
  if (out == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null out-parameter");
  *out = new fp_dataset{};
  return FP_OK;
}

fp_status fp_dataset_add(fp_dataset* ds, const fp_trace* trace, const char* label) {
  if (ds == nullptr || trace == nullptr || label == nullptr)
    return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { ds->ds.add(trace->t, label); });
}

fp_status fp_dataset_read(const char* manifest_path, fp_dataset** out) {
  if (manifest_path == nullptr || out == nullptr)
    return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new fp_dataset{read_manifest(manifest_path)}; });
}

fp_status fp_dataset_write(const fp_dataset* ds, const char* dir, char** manifest_path_out) {
  if (ds == nullptr || dir == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  std::string manifest;
  fp_status s = guarded([&] { manifest = write_dataset(ds->ds, dir).string(); });
  if (s != FP_OK) return s;
  if (manifest_path_out != nullptr) return string_out(manifest, manifest_path_out);
  return FP_OK;
}

void fp_dataset_free(fp_dataset* ds) { delete ds; }

size_t fp_dataset_size(const fp_dataset* ds) { return ds->ds.size(); }
size_t fp_dataset_num_classes(const fp_dataset* ds) { return ds->ds.classes().size(); }

const char* fp_dataset_class_name(const fp_dataset* ds, size_t index) {
  if (ds == nullptr || index >= ds->ds.classes().size()) return nullptr;
  return ds->ds.classes()[index].c_str();
}

int fp_dataset_has_split(const fp_dataset* ds) { return ds->ds.has_split() ? 1 : 0; }

fp_status fp_dataset_split(fp_dataset* ds, uint64_t seed) {
  if (ds == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null dataset");
  return guarded([&] { ds->ds = split_dataset(ds->ds, seed); });
}

/* ----------------------------------------------------------------- synth */

void fp_synth_config_init(fp_synth_config* config) {
  if (config == nullptr) return;
  SynthConfig d;
  config->n_samples = d.n_samples;
  config->traces_per_class = d.traces_per_class;
  config->seed = d.seed;
  config->concurrent_disturbers = d.concurrent_disturbers;
  config->disturbance_strength_khz = d.disturbance_strength_khz;
  config->interval_ms = d.interval_ms;
}

fp_status fp_templates_default(int n_classes, size_t n_samples, uint64_t seed,
                               fp_templates** out) {
  if (out == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null out-parameter");
  return guarded([&] {
    *out = new fp_templates{default_template_bank(n_classes, n_samples, seed)};
  });
}

fp_status fp_templates_read(const char* path, fp_templates** out) {
  if (path == nullptr || out == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new fp_templates{read_template_bank(path)}; });
}

fp_status fp_templates_write(const fp_templates* bank, const char* path) {
  if (bank == nullptr || path == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { write_template_bank(path, bank->bank); });
}

void fp_templates_free(fp_templates* bank) { delete bank; }

size_t fp_templates_len(const fp_templates* bank) { return bank->bank.size(); }

const char* fp_templates_label(const fp_templates* bank, size_t index) {
  if (bank == nullptr || index >= bank->bank.size()) return nullptr;
  return bank->bank[index].label.c_str();
}

fp_status fp_templates_set_jitter(fp_templates* bank, double jitter_khz) {
  if (bank == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null bank");
  if (!(jitter_khz >= 0.0)) return fail(FP_ERR_INVALID_ARGUMENT, "jitter_khz must be >= 0");
  for (auto& tpl : bank->bank) tpl.jitter_khz = jitter_khz;
  return FP_OK;
}

fp_status fp_synth_generate(const fp_templates* bank, const fp_synth_config* config,
                            fp_dataset** out) {
  if (bank == nullptr || config == nullptr || out == nullptr)
    return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    SynthConfig cfg;
    cfg.templates = bank->bank;
    cfg.n_samples = config->n_samples;
    cfg.traces_per_class = config->traces_per_class;
    cfg.seed = config->seed;
    cfg.concurrent_disturbers = config->concurrent_disturbers;
    cfg.disturbance_strength_khz = config->disturbance_strength_khz;
    cfg.interval_ms = config->interval_ms;
    *out = new fp_dataset{generate(cfg)};
  });
}

/* -------------------------------------------------------------- training */

void fp_fit_options_init(fp_fit_options* options) {
  if (options == nullptr) return;
  FitOptions d;
  options->preset = "native";
  options->learning_rate = d.train.learning_rate;
  options->batch_size = d.train.batch_size;
  options->max_epochs = d.train.max_epochs;
  options->patience = d.train.patience;
  options->seed = d.train.seed;
  options->truncate_len = d.truncate_len;
  options->smooth_window = d.smooth_window;
  options->movmax_window = d.movmax_window;
}

fp_status fp_fit(const fp_dataset* ds, const fp_fit_options* options, fp_epoch_callback on_epoch,
                 void* user, fp_model** out, fp_dataset** split_out) {
  if (ds == nullptr || options == nullptr || out == nullptr)
    return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    FitOptions opt = fit_options_from(*options);
    EpochCallback cb;
    if (on_epoch != nullptr) {
      cb = [on_epoch, user](const EpochMetrics& m) {
        on_epoch(m.epoch, m.train_loss, m.train_accuracy, m.val_accuracy, user);
      };
    }
    TraceDataset used;
    FitResult result = fit(ds->ds, opt, cb, split_out != nullptr ? &used : nullptr);
    *out = new fp_model{std::move(result.net)};
    if (split_out != nullptr) *split_out = new fp_dataset{std::move(used)};
  });
}

fp_status fp_model_load(const char* path, fp_model** out) {
  if (path == nullptr || out == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new fp_model{Network::load(path)}; });
}

fp_status fp_model_save(const fp_model* model, const char* path) {
  if (model == nullptr || path == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { model->net.save(path); });
}

void fp_model_free(fp_model* model) { delete model; }

fp_status fp_model_describe(const fp_model* model, char** out) {
  if (model == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null model");
  return string_out(model->net.describe(), out);
}

size_t fp_model_num_classes(const fp_model* model) { return model->net.num_classes(); }
size_t fp_model_input_length(const fp_model* model) { return model->net.input_length(); }

/* ---------------------------------------------------- evaluation, predict */

fp_status fp_evaluate(fp_model* model, const fp_dataset* ds, int64_t threshold_khz,
                      fp_report** out) {
  if (model == nullptr || ds == nullptr || out == nullptr)
    return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    ActivityConfig cfg;
    if (threshold_khz > 0) cfg.threshold_khz = threshold_khz;
    *out = new fp_report{evaluate(model->net, ds->ds, cfg)};
  });
}

void fp_report_free(fp_report* report) { delete report; }

double fp_report_top1(const fp_report* report) { return report->r.top1; }
double fp_report_top3(const fp_report* report) { return report->r.top3; }
double fp_report_top5(const fp_report* report) { return report->r.top5; }
size_t fp_report_n_test(const fp_report* report) { return report->r.n_test; }

fp_status fp_report_to_string(const fp_report* report, char** out) {
  if (report == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null report");
  return string_out(report_to_string(report->r), out);
}

fp_status fp_report_write(const fp_report* report, const char* path) {
  if (report == nullptr || path == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { write_report(path, report->r); });
}

fp_status fp_predict(fp_model* model, const fp_trace* trace, fp_ranking** out) {
  if (model == nullptr || trace == nullptr || out == nullptr)
    return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new fp_ranking{predict(model->net, trace->t)}; });
}

void fp_ranking_free(fp_ranking* ranking) { delete ranking; }

size_t fp_ranking_len(const fp_ranking* ranking) { return ranking->ranked.size(); }

const char* fp_ranking_label(const fp_ranking* ranking, size_t index) {
  if (ranking == nullptr || index >= ranking->ranked.size()) return nullptr;
  return ranking->ranked[index].first.c_str();
}

double fp_ranking_probability(const fp_ranking* ranking, size_t index) {
  if (ranking == nullptr || index >= ranking->ranked.size()) return 0.0;
  return ranking->ranked[index].second;
}

fp_status fp_activity(const fp_report* report, const fp_dataset* ds, int64_t threshold_khz,
                      fp_activity_report** out) {
  if (report == nullptr || ds == nullptr || out == nullptr)
    return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    ActivityConfig cfg;
    if (threshold_khz > 0) cfg.threshold_khz = threshold_khz;
    *out = new fp_activity_report{activity_report(report->r, ds->ds, cfg)};
  });
}

void fp_activity_report_free(fp_activity_report* report) { delete report; }

fp_status fp_activity_to_string(const fp_activity_report* report, char** out) {
  if (report == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null report");
  return string_out(activity_report_to_string(report->r), out);
}

int fp_activity_spearman(const fp_activity_report* report, double* out) {
  if (report == nullptr || !report->r.spearman.has_value()) return 0;
  if (out != nullptr) *out = *report->r.spearman;
  return 1;
}

fp_status fp_sample_size_sweep(const fp_dataset* ds, const size_t* sizes, size_t n_sizes,
                               const fp_fit_options* options, fp_sweep** out) {
  if (ds == nullptr || sizes == nullptr || n_sizes == 0 || options == nullptr || out == nullptr)
    return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<std::size_t> size_vec(sizes, sizes + n_sizes);
    auto results = sample_size_sweep(ds->ds, size_vec, fit_options_from(*options));
    auto sweep = std::make_unique<fp_sweep>();
    for (auto& [size, report] : results) {
      sweep->sizes.push_back(size);
      sweep->reports.push_back(std::make_unique<fp_report>(fp_report{std::move(report)}));
    }
    *out = sweep.release();
  });
}

void fp_sweep_free(fp_sweep* sweep) { delete sweep; }

size_t fp_sweep_len(const fp_sweep* sweep) { return sweep->sizes.size(); }

size_t fp_sweep_size_at(const fp_sweep* sweep, size_t index) {
  if (sweep == nullptr || index >= sweep->sizes.size()) return 0;
  return sweep->sizes[index];
}

const fp_report* fp_sweep_report_at(const fp_sweep* sweep, size_t index) {
  if (sweep == nullptr || index >= sweep->reports.size()) return nullptr;
  return sweep->reports[index].get();
}

/* --------------------------------------------------------------- defense */

void fp_noise_config_init(fp_noise_config* config) {
  if (config == nullptr) return;
  NoiseConfig d;
  config->core_id = d.core_id;
  config->n_repeat_lo = d.n_repeat_lo;
  config->n_repeat_hi = d.n_repeat_hi;
  config->t_sleep_lo_ms = d.t_sleep_lo_ms;
  config->t_sleep_hi_ms = d.t_sleep_hi_ms;
  config->kernel_iterations = d.kernel_iterations;
  config->duration_s = d.duration_s;
  config->seed = d.seed;
  config->burst_unit_ms = d.burst_unit_ms;
}

fp_status fp_noise_inject(const fp_noise_config* config, const volatile int* stop_flag,
                          fp_burstlog** out) {
  if (config == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null config");
  if (stop_flag == nullptr && config->duration_s <= 0.0)
    return fail(FP_ERR_INVALID_ARGUMENT, "need a stop flag or a positive duration");
  return guarded([&] {
    NoiseConfig cfg = noise_config_from(*config);
    std::atomic<bool> stop{false};
    std::atomic<bool> done{false};
    BurstLog log;
    std::exception_ptr error;
    // The injector pins its calling thread, so it runs on a worker while this
    // thread mirrors the C stop flag into the atomic it polls.
    std::thread worker([&] {
      try {
        log = run_noise_injector(cfg, stop);
      } catch (...) {
        error = std::current_exception();
      }
      done.store(true);
    });
    while (!done.load()) {
      if (stop_flag != nullptr && *stop_flag != 0) stop.store(true);
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    worker.join();
    if (error) std::rethrow_exception(error);
    if (out != nullptr) *out = new fp_burstlog{std::move(log)};
  });
}

void fp_burstlog_free(fp_burstlog* log) { delete log; }

size_t fp_burstlog_len(const fp_burstlog* log) { return log->log.bursts.size(); }

fp_status fp_burstlog_write(const fp_burstlog* log, const char* path) {
  if (log == nullptr || path == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { write_burst_log(path, log->log); });
}

fp_status fp_trace_augment_noise(const fp_trace* trace, const fp_noise_config* config,
                                 int64_t max_khz, uint64_t seed, fp_trace** out) {
  if (trace == nullptr || config == nullptr || out == nullptr)
    return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new fp_trace{augment_with_noise(trace->t, noise_config_from(*config), max_khz, seed)};
  });
}

void fp_detector_config_init(fp_detector_config* config) {
  if (config == nullptr) return;
  DetectorConfig d;
  config->pattern = nullptr;
  config->pattern_len = 0;
  config->path_substring = nullptr;
  config->min_repetitions = d.min_repetitions;
  config->window_s = d.window_s;
  config->max_intra_pattern_gap_ms = d.max_intra_pattern_gap_ms;
}

fp_status fp_detect_text(const char* text, const fp_detector_config* config,
                         fp_detections** out) {
  if (text == nullptr || config == nullptr || out == nullptr)
    return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto events = parse_event_stream(text);
    *out = new fp_detections{detect(events, detector_config_from(*config))};
  });
}

fp_status fp_detect_file(const char* path, const fp_detector_config* config,
                         fp_detections** out) {
  if (path == nullptr || config == nullptr || out == nullptr)
    return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto events = parse_event_stream(read_file(path));
    *out = new fp_detections{detect(events, detector_config_from(*config))};
  });
}

void fp_detections_free(fp_detections* detections) { delete detections; }

size_t fp_detections_len(const fp_detections* detections) { return detections->d.size(); }

int64_t fp_detections_pid(const fp_detections* detections, size_t index) {
  if (detections == nullptr || index >= detections->d.size()) return -1;
  return detections->d[index].pid;
}

int64_t fp_detections_first_flag_ms(const fp_detections* detections, size_t index) {
  if (detections == nullptr || index >= detections->d.size()) return -1;
  return detections->d[index].first_flag_time_ms;
}

size_t fp_detections_repetitions(const fp_detections* detections, size_t index) {
  if (detections == nullptr || index >= detections->d.size()) return 0;
  return detections->d[index].repetitions;
}

/* --------------------------------------------------------------- sampler */

void fp_sampler_config_init(fp_sampler_config* config) {
  if (config == nullptr) return;
  SamplerConfig d;
  config->interval_ms = d.interval_ms;
  config->num_samples = d.num_samples;
  config->inter_measurement_sleep_s = d.inter_measurement_sleep_s;
  config->cores = nullptr;
  config->n_cores = 0;
}

fp_status fp_read_core_frequency(int core_id, int64_t* khz) {
  if (khz == nullptr) return fail(FP_ERR_INVALID_ARGUMENT, "null out-parameter");
  return guarded([&] { *khz = read_core_frequency(core_id); });
}

fp_status fp_discover_cores(int** cores_out, size_t* n_out) {
  if (cores_out == nullptr || n_out == nullptr)
    return fail(FP_ERR_INVALID_ARGUMENT, "null out-parameter");
  return guarded([&] {
    auto cores = discover_cores();
    int* arr = nullptr;
    if (!cores.empty()) {
      arr = static_cast<int*>(std::malloc(cores.size() * sizeof(int)));
      if (arr == nullptr) raise(Errc::platform_error, "out of memory");
      std::memcpy(arr, cores.data(), cores.size() * sizeof(int));
    }
    *cores_out = arr;
    *n_out = cores.size();
  });
}

void fp_cores_free(int* cores) { std::free(cores); }

fp_status fp_collect(const fp_sampler_config* config, const char* launch, const char* kill,
                     fp_trace*** traces_out, size_t* n_out) {
  if (config == nullptr || launch == nullptr || traces_out == nullptr || n_out == nullptr)
    return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    SamplerConfig cfg = sampler_config_from(*config);
    SysfsFrequencySource source;
    SystemClock clock;
    ShellRunner runner;
    auto traces =
        collect_measurement(cfg, launch, kill != nullptr ? kill : "", source, clock, runner);
    auto** arr = static_cast<fp_trace**>(std::malloc(traces.size() * sizeof(fp_trace*)));
    if (arr == nullptr) raise(Errc::platform_error, "out of memory");
    for (std::size_t i = 0; i < traces.size(); ++i) arr[i] = new fp_trace{std::move(traces[i])};
    *traces_out = arr;
    *n_out = traces.size();
  });
}

void fp_trace_array_free(fp_trace** traces, size_t n) {
  if (traces == nullptr) return;
  for (size_t i = 0; i < n; ++i) delete traces[i];
  std::free(traces);
}

fp_status fp_run_campaign(const fp_sampler_config* config, const char* spec_path,
                          const char* out_dir, char** manifest_path_out, char** summary_out) {
  if (config == nullptr || spec_path == nullptr || out_dir == nullptr)
    return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  std::string manifest;
  std::string summary;
  fp_status s = guarded([&] {
    SamplerConfig cfg = sampler_config_from(*config);
    CampaignSpec spec = read_campaign_spec(spec_path);
    SysfsFrequencySource source;
    SystemClock clock;
    ShellRunner runner;
    CampaignResult result = run_campaign(cfg, spec, out_dir, source, clock, runner);
    manifest = result.manifest_path.string();
    summary = "collected=" + std::to_string(result.collected) +
              " skipped=" + std::to_string(result.skipped) +
              " failures=" + std::to_string(result.failures.size());
    for (const auto& f : result.failures) {
      summary += "\nfailed " + f.label + " measurement " + std::to_string(f.measurement) + ": " +
                 f.message;
    }
  });
  if (s != FP_OK) return s;
  if (manifest_path_out != nullptr) {
    fp_status rs = string_out(manifest, manifest_path_out);
    if (rs != FP_OK) return rs;
  }
  if (summary_out != nullptr) {
    fp_status rs = string_out(summary, summary_out);
    if (rs != FP_OK) {
      if (manifest_path_out != nullptr) {
        fp_string_free(*manifest_path_out);
        *manifest_path_out = nullptr;
      }
      return rs;
    }
  }
  return FP_OK;
}

fp_status fp_estimate_campaign_seconds(const fp_sampler_config* config, const char* spec_path,
                                       double* seconds_out) {
  if (config == nullptr || spec_path == nullptr || seconds_out == nullptr)
    return fail(FP_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *seconds_out =
        estimate_campaign_seconds(sampler_config_from(*config), read_campaign_spec(spec_path));
  });
}

}  // extern "C"
