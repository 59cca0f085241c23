#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "classifier/pipeline.hpp"
#include "core/dataset.hpp"
#include "nn/train.hpp"

namespace freqprint {

struct FitOptions {
  std::string preset = "native";
  TrainOptions train;
  // truncate_len 0 means "shortest trace in the dataset".
  std::size_t truncate_len = 0;
  int smooth_window = 0;
  int movmax_window = 0;
};

struct FitResult {
  Network net;
  TrainResult train_log;
  PipelineParams pipeline;
};

struct EvalReport {
  std::vector<std::string> labels;  // model class order
  double top1 = 0.0;
  double top3 = 0.0;
  double top5 = 0.0;
  std::size_t n_test = 0;
  std::vector<std::size_t> test_count;          // per class
  std::vector<double> misprediction_rate;       // per class, 1 - recall
  std::vector<double> mean_activity;            // per class, over raw test traces
  std::vector<std::size_t> confusion;           // row-major, row = true class
};

struct ActivityRow {
  std::string label;
  double misprediction_rate = 0.0;
  double mean_activity = 0.0;
};

struct ActivityReport {
  std::vector<ActivityRow> rows;            // descending misprediction rate
  std::optional<double> spearman;           // empty when a variable has no variance
};

// Splits the dataset when it has no split yet (seed = options.train.seed),
// fits the preprocessing bounds on the train split, trains a preset network,
// and leaves labels + pipeline in the model metadata. Every class needs at
// least 5 traces. `used_dataset`, when given, receives the dataset with the
// split that was actually used, so callers can persist the assignment.
FitResult fit(const TraceDataset& ds, const FitOptions& options,
              const EpochCallback& on_epoch = nullptr, TraceDataset* used_dataset = nullptr);

// Evaluates the dataset's test split. The dataset must carry a split with a
// non-empty test part, and every label must be known to the model.
EvalReport evaluate(Network& net, const TraceDataset& ds,
                    const ActivityConfig& activity = {});

// Full ranking for one trace: (label, probability) with descending
// probability, ties by ascending class index.
std::vector<std::pair<std::string, double>> predict(Network& net, const FrequencyTrace& trace);

// Joins the report's misprediction rates with mean frequency activity
// computed from the dataset's test traces at cfg's threshold.
ActivityReport activity_report(const EvalReport& report, const TraceDataset& ds,
                               const ActivityConfig& cfg = {});

// Retrains from scratch per size (same seed, truncation override) and
// evaluates each model on the test split. The split is fixed once up front.
std::vector<std::pair<std::size_t, EvalReport>> sample_size_sweep(
    const TraceDataset& ds, const std::vector<std::size_t>& sizes, const FitOptions& options);

// Spearman rank correlation with average ranks for ties; empty when either
// input is constant.
std::optional<double> spearman(const std::vector<double>& a, const std::vector<double>& b);

std::string report_to_string(const EvalReport& report);
std::string activity_report_to_string(const ActivityReport& report);
void write_report(const std::string& path, const EvalReport& report);

}  // namespace freqprint
