// freqprint command-line tool. Talks to the library through the public C API
// only; reports go to stdout, progress and diagnostics to stderr.
#include <csignal>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "freqprint.h"

namespace {

int fail(const std::string& what) {
  std::fprintf(stderr, "freqprint: %s: %s\n", what.c_str(), fp_last_error());
  return 1;
}

int fail_msg(const std::string& msg) {
  std::fprintf(stderr, "freqprint: %s\n", msg.c_str());
  return 1;
}

struct StringOut {
  char* s = nullptr;
  ~StringOut() { fp_string_free(s); }
};

volatile sig_atomic_t g_stop = 0;
void on_sigint(int) { g_stop = 1; }

struct SynthArgs {
  int classes = 10;
  std::size_t samples = 4000;
  std::size_t traces = 100;
  std::uint64_t seed = 0;
  int disturbers = 0;
  std::int64_t strength = 500'000;
  int interval = 10;
  double jitter = -1.0;
  std::string templates_path;
  std::string save_templates;
  std::string out_dir;
};

int run_synth(const SynthArgs& a) {
  fp_templates* bank = nullptr;
  fp_status s;
  if (!a.templates_path.empty()) {
    s = fp_templates_read(a.templates_path.c_str(), &bank);
  } else {
    s = fp_templates_default(a.classes, a.samples, a.seed, &bank);
  }
  if (s != FP_OK) return fail("building templates");
  std::unique_ptr<fp_templates, decltype(&fp_templates_free)> bank_guard(bank,
                                                                         fp_templates_free);
  if (a.jitter >= 0.0 && fp_templates_set_jitter(bank, a.jitter) != FP_OK)
    return fail("setting jitter");
  if (!a.save_templates.empty() &&
      fp_templates_write(bank, a.save_templates.c_str()) != FP_OK)
    return fail("writing templates");

  fp_synth_config cfg;
  fp_synth_config_init(&cfg);
  cfg.n_samples = a.samples;
  cfg.traces_per_class = a.traces;
  cfg.seed = a.seed;
  cfg.concurrent_disturbers = a.disturbers;
  cfg.disturbance_strength_khz = a.strength;
  cfg.interval_ms = a.interval;

  fp_dataset* ds = nullptr;
  if (fp_synth_generate(bank, &cfg, &ds) != FP_OK) return fail("generating dataset");
  std::unique_ptr<fp_dataset, decltype(&fp_dataset_free)> ds_guard(ds, fp_dataset_free);
  StringOut manifest;
  if (fp_dataset_write(ds, a.out_dir.c_str(), &manifest.s) != FP_OK)
    return fail("writing dataset");
  std::fprintf(stderr, "generated %zu traces in %zu classes\n", fp_dataset_size(ds),
               fp_dataset_num_classes(ds));
  std::printf("%s\n", manifest.s);
  return 0;
}

struct TrainArgs {
  std::string data;
  std::string model;
  std::string preset = "native";
  int epochs = 100;
  std::size_t batch = 32;
  double lr = 1e-3;
  int patience = 10;
  std::uint64_t seed = 0;
  std::size_t truncate = 0;
  int smooth = 0;
  int movmax = 0;
  bool quiet = false;
  bool no_record_split = false;
};

void fill_fit_options(fp_fit_options& opt, const TrainArgs& a) {
  fp_fit_options_init(&opt);
  opt.preset = a.preset.c_str();
  opt.learning_rate = a.lr;
  opt.batch_size = a.batch;
  opt.max_epochs = a.epochs;
  opt.patience = a.patience;
  opt.seed = a.seed;
  opt.truncate_len = a.truncate;
  opt.smooth_window = a.smooth;
  opt.movmax_window = a.movmax;
}

void epoch_logger(int epoch, double loss, double train_acc, double val_acc, void*) {
  std::fprintf(stderr, "epoch %3d  loss %.4f  train_acc %.4f  val_acc %.4f\n", epoch, loss,
               train_acc, val_acc);
}

int run_train(const TrainArgs& a) {
  fp_dataset* ds = nullptr;
  if (fp_dataset_read(a.data.c_str(), &ds) != FP_OK) return fail("reading dataset");
  std::unique_ptr<fp_dataset, decltype(&fp_dataset_free)> ds_guard(ds, fp_dataset_free);

  fp_fit_options opt;
  fill_fit_options(opt, a);
  fp_model* model = nullptr;
  fp_dataset* used = nullptr;
  fp_status s = fp_fit(ds, &opt, a.quiet ? nullptr : epoch_logger, nullptr, &model, &used);
  if (s != FP_OK) return fail("training");
  std::unique_ptr<fp_model, decltype(&fp_model_free)> model_guard(model, fp_model_free);
  std::unique_ptr<fp_dataset, decltype(&fp_dataset_free)> used_guard(used, fp_dataset_free);

  if (fp_model_save(model, a.model.c_str()) != FP_OK) return fail("saving model");
  if (!a.no_record_split) {
    auto dir = std::filesystem::path(a.data).parent_path();
    if (fp_dataset_write(used, dir.string().c_str(), nullptr) != FP_OK)
      return fail("recording split");
  }
  std::printf("%s\n", a.model.c_str());
  return 0;
}

struct EvalArgs {
  std::string data;
  std::string model;
  std::int64_t threshold = 0;
  std::string report_path;
};

int run_eval(const EvalArgs& a) {
  fp_dataset* ds = nullptr;
  if (fp_dataset_read(a.data.c_str(), &ds) != FP_OK) return fail("reading dataset");
  std::unique_ptr<fp_dataset, decltype(&fp_dataset_free)> ds_guard(ds, fp_dataset_free);
  fp_model* model = nullptr;
  if (fp_model_load(a.model.c_str(), &model) != FP_OK) return fail("loading model");
  std::unique_ptr<fp_model, decltype(&fp_model_free)> model_guard(model, fp_model_free);

  fp_report* report = nullptr;
  if (fp_evaluate(model, ds, a.threshold, &report) != FP_OK) return fail("evaluating");
  std::unique_ptr<fp_report, decltype(&fp_report_free)> report_guard(report, fp_report_free);
  StringOut text;
  if (fp_report_to_string(report, &text.s) != FP_OK) return fail("formatting report");
  std::fputs(text.s, stdout);
  if (!a.report_path.empty() && fp_report_write(report, a.report_path.c_str()) != FP_OK)
    return fail("writing report");
  return 0;
}

struct SweepArgs {
  TrainArgs train;
  std::vector<std::size_t> sizes;
};

int run_sweep(const SweepArgs& a) {
  fp_dataset* ds = nullptr;
  if (fp_dataset_read(a.train.data.c_str(), &ds) != FP_OK) return fail("reading dataset");
  std::unique_ptr<fp_dataset, decltype(&fp_dataset_free)> ds_guard(ds, fp_dataset_free);

  fp_fit_options opt;
  fill_fit_options(opt, a.train);
  fp_sweep* sweep = nullptr;
  if (fp_sample_size_sweep(ds, a.sizes.data(), a.sizes.size(), &opt, &sweep) != FP_OK)
    return fail("running sweep");
  std::unique_ptr<fp_sweep, decltype(&fp_sweep_free)> sweep_guard(sweep, fp_sweep_free);

  std::printf("size\ttop1\ttop3\ttop5\n");
  for (std::size_t i = 0; i < fp_sweep_len(sweep); ++i) {
    const fp_report* r = fp_sweep_report_at(sweep, i);
    std::printf("%zu\t%.6f\t%.6f\t%.6f\n", fp_sweep_size_at(sweep, i), fp_report_top1(r),
                fp_report_top3(r), fp_report_top5(r));
  }
  return 0;
}

struct PredictArgs {
  std::string model;
  std::string trace;
  std::size_t top = 5;
};

int run_predict(const PredictArgs& a) {
  fp_model* model = nullptr;
  if (fp_model_load(a.model.c_str(), &model) != FP_OK) return fail("loading model");
  std::unique_ptr<fp_model, decltype(&fp_model_free)> model_guard(model, fp_model_free);
  fp_trace* trace = nullptr;
  if (fp_trace_read(a.trace.c_str(), &trace) != FP_OK) return fail("reading trace");
  std::unique_ptr<fp_trace, decltype(&fp_trace_free)> trace_guard(trace, fp_trace_free);

  fp_ranking* ranking = nullptr;
  if (fp_predict(model, trace, &ranking) != FP_OK) return fail("predicting");
  std::unique_ptr<fp_ranking, decltype(&fp_ranking_free)> ranking_guard(ranking,
                                                                        fp_ranking_free);
  std::size_t n = fp_ranking_len(ranking);
  if (a.top < n) n = a.top;
  for (std::size_t i = 0; i < n; ++i) {
    std::printf("%s\t%.6f\n", fp_ranking_label(ranking, i),
                fp_ranking_probability(ranking, i));
  }
  return 0;
}

struct ActivityArgs {
  std::string data;
  std::string model;
  std::int64_t threshold = 0;
  std::string out_path;
};

int run_report_activity(const ActivityArgs& a) {
  fp_dataset* ds = nullptr;
  if (fp_dataset_read(a.data.c_str(), &ds) != FP_OK) return fail("reading dataset");
  std::unique_ptr<fp_dataset, decltype(&fp_dataset_free)> ds_guard(ds, fp_dataset_free);
  fp_model* model = nullptr;
  if (fp_model_load(a.model.c_str(), &model) != FP_OK) return fail("loading model");
  std::unique_ptr<fp_model, decltype(&fp_model_free)> model_guard(model, fp_model_free);

  fp_report* report = nullptr;
  if (fp_evaluate(model, ds, a.threshold, &report) != FP_OK) return fail("evaluating");
  std::unique_ptr<fp_report, decltype(&fp_report_free)> report_guard(report, fp_report_free);
  fp_activity_report* activity = nullptr;
  if (fp_activity(report, ds, a.threshold, &activity) != FP_OK)
    return fail("computing activity");
  std::unique_ptr<fp_activity_report, decltype(&fp_activity_report_free)> activity_guard(
      activity, fp_activity_report_free);

  StringOut text;
  if (fp_activity_to_string(activity, &text.s) != FP_OK) return fail("formatting report");
  std::fputs(text.s, stdout);
  if (!a.out_path.empty()) {
    std::ofstream out(a.out_path);
    out << text.s;
    if (!out) return fail_msg("cannot write " + a.out_path);
  }
  return 0;
}

struct CollectArgs {
  std::string spec;
  std::string out_dir;
  std::vector<int> cores;
  int interval = 10;
  std::size_t samples = 4000;
  double sleep_s = 5.0;
  bool estimate = false;
};

int run_collect(const CollectArgs& a) {
  fp_sampler_config cfg;
  fp_sampler_config_init(&cfg);
  cfg.interval_ms = a.interval;
  cfg.num_samples = a.samples;
  cfg.inter_measurement_sleep_s = a.sleep_s;

  std::vector<int> cores = a.cores;
  int* discovered = nullptr;
  std::size_t n_discovered = 0;
  if (cores.empty()) {
    if (fp_discover_cores(&discovered, &n_discovered) != FP_OK)
      return fail("discovering cores");
    cores.assign(discovered, discovered + n_discovered);
    fp_cores_free(discovered);
    if (cores.empty()) return fail_msg("no cpufreq-capable cores found; use --cores");
  }
  cfg.cores = cores.data();
  cfg.n_cores = cores.size();

  if (a.estimate) {
    double seconds = 0.0;
    if (fp_estimate_campaign_seconds(&cfg, a.spec.c_str(), &seconds) != FP_OK)
      return fail("estimating campaign");
    std::printf("estimated sampling time: %.1f s\n", seconds);
    return 0;
  }
  if (a.out_dir.empty()) return fail_msg("--out is required unless --estimate is given");

  StringOut manifest;
  StringOut summary;
  if (fp_run_campaign(&cfg, a.spec.c_str(), a.out_dir.c_str(), &manifest.s, &summary.s) !=
      FP_OK)
    return fail("running campaign");
  std::fprintf(stderr, "%s\n", summary.s);
  std::printf("%s\n", manifest.s);
  return 0;
}

struct NoiseArgs {
  int core = 0;
  std::uint64_t n_repeat_lo = 8;
  std::uint64_t n_repeat_hi = 20;
  std::int64_t t_sleep_lo = 100;
  std::int64_t t_sleep_hi = 300;
  std::uint64_t iterations = 20'000'000;
  double duration = 0.0;
  std::uint64_t seed = 0;
  std::string log_path;
};

int run_noise_inject(const NoiseArgs& a) {
  fp_noise_config cfg;
  fp_noise_config_init(&cfg);
  cfg.core_id = a.core;
  cfg.n_repeat_lo = a.n_repeat_lo;
  cfg.n_repeat_hi = a.n_repeat_hi;
  cfg.t_sleep_lo_ms = a.t_sleep_lo;
  cfg.t_sleep_hi_ms = a.t_sleep_hi;
  cfg.kernel_iterations = a.iterations;
  cfg.duration_s = a.duration;
  cfg.seed = a.seed;

  std::signal(SIGINT, on_sigint);
  std::signal(SIGTERM, on_sigint);
  if (a.duration <= 0.0) std::fprintf(stderr, "injecting noise until interrupted...\n");

  fp_burstlog* log = nullptr;
  static_assert(sizeof(sig_atomic_t) == sizeof(int));
  if (fp_noise_inject(&cfg, reinterpret_cast<const volatile int*>(&g_stop), &log) != FP_OK)
    return fail("injecting noise");
  std::unique_ptr<fp_burstlog, decltype(&fp_burstlog_free)> log_guard(log, fp_burstlog_free);
  if (!a.log_path.empty() && fp_burstlog_write(log, a.log_path.c_str()) != FP_OK)
    return fail("writing burst log");
  std::printf("bursts=%zu\n", fp_burstlog_len(log));
  return 0;
}

struct DetectArgs {
  std::string events = "-";
  std::vector<std::string> pattern;
  std::string path_substring;
  std::size_t min_reps = 50;
  double window_s = 10.0;
  std::int64_t gap_ms = 50;
};

int run_detect(const DetectArgs& a) {
  fp_detector_config cfg;
  fp_detector_config_init(&cfg);
  std::vector<const char*> pattern_ptrs;
  if (!a.pattern.empty()) {
    for (const auto& p : a.pattern) pattern_ptrs.push_back(p.c_str());
    cfg.pattern = pattern_ptrs.data();
    cfg.pattern_len = pattern_ptrs.size();
  }
  if (!a.path_substring.empty()) cfg.path_substring = a.path_substring.c_str();
  cfg.min_repetitions = a.min_reps;
  cfg.window_s = a.window_s;
  cfg.max_intra_pattern_gap_ms = a.gap_ms;

  fp_detections* detections = nullptr;
  fp_status s;
  if (a.events == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    std::string text = buf.str();
    s = fp_detect_text(text.c_str(), &cfg, &detections);
  } else {
    s = fp_detect_file(a.events.c_str(), &cfg, &detections);
  }
  if (s != FP_OK) return fail("detecting");
  std::unique_ptr<fp_detections, decltype(&fp_detections_free)> det_guard(detections,
                                                                          fp_detections_free);

  std::printf("pid\tfirst_flag_ms\trepetitions\n");
  for (std::size_t i = 0; i < fp_detections_len(detections); ++i) {
    std::printf("%lld\t%lld\t%zu\n",
                static_cast<long long>(fp_detections_pid(detections, i)),
                static_cast<long long>(fp_detections_first_flag_ms(detections, i)),
                fp_detections_repetitions(detections, i));
  }
  return 0;
}

void add_train_flags(CLI::App* cmd, TrainArgs& a, bool with_model) {
  cmd->add_option("--data", a.data, "dataset manifest path")->required();
  if (with_model) cmd->add_option("--model", a.model, "output model path")->required();
  cmd->add_option("--preset", a.preset, "network preset: native or sandbox")
      ->capture_default_str();
  cmd->add_option("--epochs", a.epochs, "maximum training epochs")->capture_default_str();
  cmd->add_option("--batch", a.batch, "mini-batch size")->capture_default_str();
  cmd->add_option("--lr", a.lr, "Adam learning rate")->capture_default_str();
  cmd->add_option("--patience", a.patience, "early stopping patience, <= 0 disables")
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "RNG seed")->capture_default_str();
  cmd->add_option("--truncate", a.truncate, "input length, 0 = shortest trace")
      ->capture_default_str();
  cmd->add_option("--smooth", a.smooth, "Gaussian smoothing window, 0 = off")
      ->capture_default_str();
  cmd->add_option("--movmax", a.movmax, "moving-max window, 0 = off")->capture_default_str();
  cmd->add_flag("--quiet", a.quiet, "suppress per-epoch progress");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"freqprint: workload fingerprinting from CPU frequency traces"};
  app.require_subcommand(1);
  app.set_version_flag("--version", fp_version());

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "generate a synthetic labeled dataset");
  synth->add_option("--out", synth_args.out_dir, "output dataset directory")->required();
  synth->add_option("--classes", synth_args.classes, "number of synthetic classes")
      ->capture_default_str();
  synth->add_option("--samples", synth_args.samples, "samples per trace")
      ->capture_default_str();
  synth->add_option("--traces", synth_args.traces, "traces per class")->capture_default_str();
  synth->add_option("--seed", synth_args.seed, "RNG seed")->capture_default_str();
  synth->add_option("--disturbers", synth_args.disturbers,
                    "simulated concurrent workloads adding contention bursts")
      ->capture_default_str();
  synth->add_option("--strength", synth_args.strength, "disturbance strength in kHz")
      ->capture_default_str();
  synth->add_option("--interval", synth_args.interval, "sampling interval in ms")
      ->capture_default_str();
  synth->add_option("--jitter", synth_args.jitter, "override template jitter in kHz");
  synth->add_option("--templates", synth_args.templates_path,
                    "template bank file (default: generated bank)");
  synth->add_option("--save-templates", synth_args.save_templates,
                    "write the template bank used");

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "train a classifier on a dataset");
  add_train_flags(train, train_args, true);
  train->add_flag("--no-record-split", train_args.no_record_split,
                  "do not rewrite the dataset with the split used");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "evaluate a model on the dataset's test split");
  eval->add_option("--data", eval_args.data, "dataset manifest path")->required();
  eval->add_option("--model", eval_args.model, "model path")->required();
  eval->add_option("--threshold", eval_args.threshold,
                   "activity threshold in kHz, 0 = default");
  eval->add_option("--report", eval_args.report_path, "also write the report to this file");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "accuracy as a function of trace length");
  add_train_flags(sweep, sweep_args.train, false);
  sweep->add_option("--sizes", sweep_args.sizes, "comma-separated sample counts")
      ->required()
      ->delimiter(',');

  PredictArgs predict_args;
  auto* predict = app.add_subcommand("predict", "rank classes for a single trace");
  predict->add_option("--model", predict_args.model, "model path")->required();
  predict->add_option("--trace", predict_args.trace, "trace file")->required();
  predict->add_option("--top", predict_args.top, "ranks to print")->capture_default_str();

  ActivityArgs activity_args;
  auto* activity =
      app.add_subcommand("report-activity", "per-class misprediction vs frequency activity");
  activity->add_option("--data", activity_args.data, "dataset manifest path")->required();
  activity->add_option("--model", activity_args.model, "model path")->required();
  activity->add_option("--threshold", activity_args.threshold,
                       "activity threshold in kHz, 0 = default");
  activity->add_option("--out", activity_args.out_path, "also write the table to this file");

  CollectArgs collect_args;
  auto* collect = app.add_subcommand("collect", "run a sampling campaign from a spec file");
  collect->add_option("--spec", collect_args.spec, "campaign spec file")->required();
  collect->add_option("--out", collect_args.out_dir, "output dataset directory");
  collect->add_option("--cores", collect_args.cores,
                      "comma-separated core ids (default: all cpufreq cores)")
      ->delimiter(',');
  collect->add_option("--interval", collect_args.interval, "sampling interval in ms")
      ->capture_default_str();
  collect->add_option("--samples", collect_args.samples, "samples per measurement")
      ->capture_default_str();
  collect->add_option("--sleep", collect_args.sleep_s, "cool-down between measurements in s")
      ->capture_default_str();
  collect->add_flag("--estimate", collect_args.estimate,
                    "print the sampling time estimate and exit");

  NoiseArgs noise_args;
  auto* noise = app.add_subcommand("noise-inject", "run the frequency noise injector");
  noise->add_option("--core", noise_args.core, "core to pin to")->capture_default_str();
  noise->add_option("--n-repeat-lo", noise_args.n_repeat_lo, "min kernel repetitions")
      ->capture_default_str();
  noise->add_option("--n-repeat-hi", noise_args.n_repeat_hi, "max kernel repetitions")
      ->capture_default_str();
  noise->add_option("--t-sleep-lo", noise_args.t_sleep_lo, "min inter-burst sleep in ms")
      ->capture_default_str();
  noise->add_option("--t-sleep-hi", noise_args.t_sleep_hi, "max inter-burst sleep in ms")
      ->capture_default_str();
  noise->add_option("--iterations", noise_args.iterations, "kernel iterations per repetition")
      ->capture_default_str();
  noise->add_option("--duration", noise_args.duration,
                    "run time in seconds, 0 = until interrupted")
      ->capture_default_str();
  noise->add_option("--seed", noise_args.seed, "RNG seed")->capture_default_str();
  noise->add_option("--log", noise_args.log_path, "write the burst log to this file");

  DetectArgs detect_args;
  auto* detect = app.add_subcommand("detect", "flag processes polling cpufreq attributes");
  detect->add_option("--events", detect_args.events, "event stream file, - = stdin")
      ->capture_default_str();
  detect->add_option("--pattern", detect_args.pattern, "comma-separated syscall pattern")
      ->delimiter(',');
  detect->add_option("--path-substring", detect_args.path_substring,
                     "path filter (default: cpufreq)");
  detect->add_option("--min-reps", detect_args.min_reps, "repetitions needed to flag")
      ->capture_default_str();
  detect->add_option("--window", detect_args.window_s, "detection window in seconds")
      ->capture_default_str();
  detect->add_option("--gap", detect_args.gap_ms, "max intra-pattern gap in ms")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*synth) return run_synth(synth_args);
  if (*train) return run_train(train_args);
  if (*eval) return run_eval(eval_args);
  if (*sweep) return run_sweep(sweep_args);
  if (*predict) return run_predict(predict_args);
  if (*activity) return run_report_activity(activity_args);
  if (*collect) return run_collect(collect_args);
  if (*noise) return run_noise_inject(noise_args);
  if (*detect) return run_detect(detect_args);
  return 2;
}
