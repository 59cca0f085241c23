/* freqprint - workload fingerprinting from CPU frequency traces.
 *
 * C API over the C++ core. Conventions:
 *   - Functions returning fp_status report failure details via fp_last_error()
 *     (thread-local, valid until the next failing call on the same thread).
 *   - Out-parameters are written only on FP_OK.
 *   - Every handle type has a matching _free function; freeing NULL is a no-op.
 *   - Strings returned through char** out-parameters are heap-allocated and
 *     must be released with fp_string_free.
 */
#ifndef FREQPRINT_H
#define FREQPRINT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef FP_API
#if defined(_WIN32)
#define FP_API
#else
#define FP_API __attribute__((visibility("default")))
#endif
#endif

typedef enum fp_status {
  FP_OK = 0,
  FP_ERR_INVALID_ARGUMENT = 1,
  FP_ERR_PARSE = 2,
  FP_ERR_IO = 3,
  FP_ERR_FORMAT = 4,
  FP_ERR_SHAPE = 5,
  FP_ERR_STATE = 6,
  FP_ERR_INVALID_DATASET = 7,
  FP_ERR_UNSUPPORTED_PLATFORM = 8,
  FP_ERR_ACCESS = 9,
  FP_ERR_TARGET = 10,
  FP_ERR_PARTIAL_DATA = 11,
  FP_ERR_ORDER = 12,
  FP_ERR_PLATFORM = 13,
  FP_ERR_UNKNOWN = 99
} fp_status;

FP_API const char* fp_status_name(fp_status status);
FP_API const char* fp_last_error(void);
FP_API const char* fp_version(void);
FP_API void fp_string_free(char* s);

/* ---------------------------------------------------------------- traces */

typedef struct fp_trace fp_trace;

FP_API fp_status fp_trace_create(const int64_t* samples_khz, size_t n_samples, int interval_ms,
                                 int core_id, int64_t start_time_ms, fp_trace** out);
FP_API fp_status fp_trace_read(const char* path, fp_trace** out);
FP_API fp_status fp_trace_write(const fp_trace* trace, const char* path);
FP_API void fp_trace_free(fp_trace* trace);

FP_API size_t fp_trace_len(const fp_trace* trace);
FP_API int fp_trace_interval_ms(const fp_trace* trace);
FP_API int fp_trace_core_id(const fp_trace* trace);
FP_API int64_t fp_trace_start_time_ms(const fp_trace* trace);
/* Copies all samples into buf, which must hold fp_trace_len entries. */
FP_API void fp_trace_samples(const fp_trace* trace, int64_t* buf);

/* Preprocessing; each returns a new trace. Window/threshold semantics follow
 * the library defaults: centered windows clamped at the edges, activity =
 * count of samples strictly above the threshold. */
FP_API fp_status fp_trace_smooth(const fp_trace* trace, int window, fp_trace** out);
FP_API fp_status fp_trace_movmax(const fp_trace* trace, int window, fp_trace** out);
FP_API fp_status fp_trace_truncate(const fp_trace* trace, size_t n, fp_trace** out);
FP_API fp_status fp_trace_activity(const fp_trace* trace, int64_t threshold_khz,
                                   uint64_t* out);

/* --------------------------------------------------------------- dataset */

typedef struct fp_dataset fp_dataset;

FP_API fp_status fp_dataset_create(fp_dataset** out);
FP_API fp_status fp_dataset_add(fp_dataset* ds, const fp_trace* trace, const char* label);
/* Reads a manifest.tsv and every trace it references. */
FP_API fp_status fp_dataset_read(const char* manifest_path, fp_dataset** out);
/* Writes trace files plus manifest.tsv under dir; returns the manifest path. */
FP_API fp_status fp_dataset_write(const fp_dataset* ds, const char* dir, char** manifest_path_out);
FP_API void fp_dataset_free(fp_dataset* ds);

FP_API size_t fp_dataset_size(const fp_dataset* ds);
FP_API size_t fp_dataset_num_classes(const fp_dataset* ds);
FP_API const char* fp_dataset_class_name(const fp_dataset* ds, size_t index);
FP_API int fp_dataset_has_split(const fp_dataset* ds);
/* Deterministic per-class 60/20/20 split; replaces any existing assignment. */
FP_API fp_status fp_dataset_split(fp_dataset* ds, uint64_t seed);

/* ----------------------------------------------------------------- synth */

typedef struct fp_templates fp_templates;

typedef struct fp_synth_config {
  size_t n_samples;
  size_t traces_per_class;
  uint64_t seed;
  int concurrent_disturbers;
  int64_t disturbance_strength_khz;
  int interval_ms;
} fp_synth_config;

FP_API void fp_synth_config_init(fp_synth_config* config);

FP_API fp_status fp_templates_default(int n_classes, size_t n_samples, uint64_t seed,
                                      fp_templates** out);
FP_API fp_status fp_templates_read(const char* path, fp_templates** out);
FP_API fp_status fp_templates_write(const fp_templates* bank, const char* path);
FP_API void fp_templates_free(fp_templates* bank);
FP_API size_t fp_templates_len(const fp_templates* bank);
FP_API const char* fp_templates_label(const fp_templates* bank, size_t index);
FP_API fp_status fp_templates_set_jitter(fp_templates* bank, double jitter_khz);

FP_API fp_status fp_synth_generate(const fp_templates* bank, const fp_synth_config* config,
                                   fp_dataset** out);

/* -------------------------------------------------------------- training */

typedef struct fp_model fp_model;

typedef struct fp_fit_options {
  const char* preset;  /* "native" or "sandbox" */
  double learning_rate;
  size_t batch_size;
  int max_epochs;
  int patience;
  uint64_t seed;
  size_t truncate_len;  /* 0 = shortest trace */
  int smooth_window;    /* 0 = off */
  int movmax_window;    /* 0 = off */
} fp_fit_options;

FP_API void fp_fit_options_init(fp_fit_options* options);

typedef void (*fp_epoch_callback)(int epoch, double train_loss, double train_accuracy,
                                  double val_accuracy, void* user);

/* Trains a preset model. Splits the dataset first when it has no assignment
 * (with options->seed); pass split_out to receive the dataset as trained on. */
FP_API fp_status fp_fit(const fp_dataset* ds, const fp_fit_options* options,
                        fp_epoch_callback on_epoch, void* user, fp_model** out,
                        fp_dataset** split_out);

FP_API fp_status fp_model_load(const char* path, fp_model** out);
FP_API fp_status fp_model_save(const fp_model* model, const char* path);
FP_API void fp_model_free(fp_model* model);
FP_API fp_status fp_model_describe(const fp_model* model, char** out);
FP_API size_t fp_model_num_classes(const fp_model* model);
FP_API size_t fp_model_input_length(const fp_model* model);

/* ---------------------------------------------------- evaluation, predict */

typedef struct fp_report fp_report;

/* Evaluates the dataset's test split (threshold_khz <= 0 uses the 1.2 GHz
 * default for the per-class activity column). */
FP_API fp_status fp_evaluate(fp_model* model, const fp_dataset* ds, int64_t threshold_khz,
                             fp_report** out);
FP_API void fp_report_free(fp_report* report);
FP_API double fp_report_top1(const fp_report* report);
FP_API double fp_report_top3(const fp_report* report);
FP_API double fp_report_top5(const fp_report* report);
FP_API size_t fp_report_n_test(const fp_report* report);
FP_API fp_status fp_report_to_string(const fp_report* report, char** out);
FP_API fp_status fp_report_write(const fp_report* report, const char* path);

typedef struct fp_ranking fp_ranking;

FP_API fp_status fp_predict(fp_model* model, const fp_trace* trace, fp_ranking** out);
FP_API void fp_ranking_free(fp_ranking* ranking);
FP_API size_t fp_ranking_len(const fp_ranking* ranking);
FP_API const char* fp_ranking_label(const fp_ranking* ranking, size_t index);
FP_API double fp_ranking_probability(const fp_ranking* ranking, size_t index);

typedef struct fp_activity_report fp_activity_report;

FP_API fp_status fp_activity(const fp_report* report, const fp_dataset* ds,
                             int64_t threshold_khz, fp_activity_report** out);
FP_API void fp_activity_report_free(fp_activity_report* report);
FP_API fp_status fp_activity_to_string(const fp_activity_report* report, char** out);
/* 1 when a Spearman coefficient exists, 0 when it is undefined. */
FP_API int fp_activity_spearman(const fp_activity_report* report, double* out);

typedef struct fp_sweep fp_sweep;

/* Retrains per size with the same options and evaluates each model. */
FP_API fp_status fp_sample_size_sweep(const fp_dataset* ds, const size_t* sizes, size_t n_sizes,
                                      const fp_fit_options* options, fp_sweep** out);
FP_API void fp_sweep_free(fp_sweep* sweep);
FP_API size_t fp_sweep_len(const fp_sweep* sweep);
FP_API size_t fp_sweep_size_at(const fp_sweep* sweep, size_t index);
/* Borrowed reference, valid while the sweep handle lives. */
FP_API const fp_report* fp_sweep_report_at(const fp_sweep* sweep, size_t index);

/* --------------------------------------------------------------- defense */

typedef struct fp_noise_config {
  int core_id;
  uint64_t n_repeat_lo, n_repeat_hi;
  int64_t t_sleep_lo_ms, t_sleep_hi_ms;
  uint64_t kernel_iterations;
  double duration_s;
  uint64_t seed;
  int64_t burst_unit_ms;  /* modeled burst-unit wall time, simulation only */
} fp_noise_config;

FP_API void fp_noise_config_init(fp_noise_config* config);

typedef struct fp_burstlog fp_burstlog;

/* Pins to config->core_id and runs the randomized floating-point bursts until
 * duration_s elapses or *stop_flag becomes nonzero (the flag may be set from
 * another thread or a signal handler). */
FP_API fp_status fp_noise_inject(const fp_noise_config* config, const volatile int* stop_flag,
                                 fp_burstlog** out);
FP_API void fp_burstlog_free(fp_burstlog* log);
FP_API size_t fp_burstlog_len(const fp_burstlog* log);
FP_API fp_status fp_burstlog_write(const fp_burstlog* log, const char* path);

/* Simulation counterpart: overlays the same burst schedule on a recorded
 * trace, raising covered samples to max_khz. */
FP_API fp_status fp_trace_augment_noise(const fp_trace* trace, const fp_noise_config* config,
                                        int64_t max_khz, uint64_t seed, fp_trace** out);

typedef struct fp_detector_config {
  const char* const* pattern;  /* NULL = fstat, fadvise64, read, close */
  size_t pattern_len;
  const char* path_substring;  /* NULL = "cpufreq" */
  size_t min_repetitions;
  double window_s;
  int64_t max_intra_pattern_gap_ms;
} fp_detector_config;

FP_API void fp_detector_config_init(fp_detector_config* config);

typedef struct fp_detections fp_detections;

/* Parses an event stream (`<seconds[.millis]> <pid> <syscall> [path]` lines)
 * and reports every pid whose cpufreq access pattern repeats fast enough. */
FP_API fp_status fp_detect_text(const char* text, const fp_detector_config* config,
                                fp_detections** out);
FP_API fp_status fp_detect_file(const char* path, const fp_detector_config* config,
                                fp_detections** out);
FP_API void fp_detections_free(fp_detections* detections);
FP_API size_t fp_detections_len(const fp_detections* detections);
FP_API int64_t fp_detections_pid(const fp_detections* detections, size_t index);
FP_API int64_t fp_detections_first_flag_ms(const fp_detections* detections, size_t index);
FP_API size_t fp_detections_repetitions(const fp_detections* detections, size_t index);

/* --------------------------------------------------------------- sampler */

typedef struct fp_sampler_config {
  int interval_ms;
  size_t num_samples;
  double inter_measurement_sleep_s;
  const int* cores;
  size_t n_cores;
} fp_sampler_config;

FP_API void fp_sampler_config_init(fp_sampler_config* config);

FP_API fp_status fp_read_core_frequency(int core_id, int64_t* khz);
/* Returns a malloc'd array of core ids; free with fp_cores_free. n may be 0. */
FP_API fp_status fp_discover_cores(int** cores_out, size_t* n_out);
FP_API void fp_cores_free(int* cores);

/* One measurement: launch, sample all configured cores, kill. Traces are
 * returned through a malloc'd array of handles; release each trace and then
 * the array with fp_trace_array_free. On FP_ERR_PARTIAL_DATA no traces are
 * returned; fp_last_error names the failing core. */
FP_API fp_status fp_collect(const fp_sampler_config* config, const char* launch,
                            const char* kill, fp_trace*** traces_out, size_t* n_out);
FP_API void fp_trace_array_free(fp_trace** traces, size_t n);

/* Full campaign from a campaign-spec file into out_dir (resumable). Returns
 * the manifest path and a human-readable summary of counts and failures. */
FP_API fp_status fp_run_campaign(const fp_sampler_config* config, const char* spec_path,
                                 const char* out_dir, char** manifest_path_out,
                                 char** summary_out);
FP_API fp_status fp_estimate_campaign_seconds(const fp_sampler_config* config,
                                              const char* spec_path, double* seconds_out);

#ifdef __cplusplus
}
#endif

#endif /* FREQPRINT_H */
