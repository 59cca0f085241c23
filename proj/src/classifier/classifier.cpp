#include "classifier/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "core/error.hpp"
#include "core/text.hpp"
#include "nn/presets.hpp"

namespace freqprint {

namespace {

std::size_t min_trace_length(const TraceDataset& ds) {
  std::size_t min_len = SIZE_MAX;
  for (const LabeledTrace& item : ds.items()) min_len = std::min(min_len, item.trace.size());
  return min_len;
}

struct SplitTensors {
  std::vector<Tensor> x;
  std::vector<int> y;
};

SplitTensors tensors_for(const TraceDataset& ds, Split split, const PipelineParams& params) {
  SplitTensors out;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.split_assignment()[i] != split) continue;
    out.x.push_back(apply_pipeline(ds.items()[i].trace, params));
    out.y.push_back(ds.class_index(ds.items()[i].label));
  }
  return out;
}

// Classes ranked by probability descending, index ascending on ties.
std::vector<std::size_t> ranked_classes(const Tensor& probs) {
  std::vector<std::size_t> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return probs.data[a] > probs.data[b];
  });
  return order;
}

}  // namespace

FitResult fit(const TraceDataset& ds, const FitOptions& options, const EpochCallback& on_epoch,
              TraceDataset* used_dataset) {
  if (ds.size() == 0) raise(Errc::invalid_dataset, "empty dataset");
  TraceDataset split_ds = ds.has_split() ? ds : split_dataset(ds, options.train.seed);
  if (used_dataset) *used_dataset = split_ds;

  PipelineParams params;
  params.truncate_len = options.truncate_len ? options.truncate_len : min_trace_length(split_ds);
  params.smooth_window = options.smooth_window;
  params.movmax_window = options.movmax_window;

  // Normalization bounds come from the filtered train split only.
  std::int64_t f_min = INT64_MAX, f_max = INT64_MIN;
  for (std::size_t i = 0; i < split_ds.size(); ++i) {
    if (split_ds.split_assignment()[i] != Split::train) continue;
    FrequencyTrace filtered = apply_filters(split_ds.items()[i].trace, params);
    for (std::int64_t v : filtered.samples()) {
      f_min = std::min(f_min, v);
      f_max = std::max(f_max, v);
    }
  }
  if (f_min > f_max) raise(Errc::invalid_dataset, "dataset has no train split");
  if (f_min == f_max) f_max = f_min + 1;  // degenerate flat split
  params.f_min = f_min;
  params.f_max = f_max;

  SplitTensors train_set = tensors_for(split_ds, Split::train, params);
  SplitTensors val_set = tensors_for(split_ds, Split::validation, params);

  FitResult result{
      make_preset_network(options.preset, params.truncate_len, split_ds.classes().size()),
      {},
      params};
  result.net.init_params(options.train.seed);
  store_pipeline(result.net, params, split_ds.classes());
  result.train_log =
      train(result.net, train_set.x, train_set.y, val_set.x, val_set.y, options.train, on_epoch);
  return result;
}

EvalReport evaluate(Network& net, const TraceDataset& ds, const ActivityConfig& activity) {
  if (!ds.has_split()) raise(Errc::invalid_dataset, "dataset carries no split assignment");
  const std::vector<std::string> labels = labels_from_meta(net.meta());
  const PipelineParams params = pipeline_from_meta(net.meta());
  const std::size_t n_classes = labels.size();
  if (n_classes != net.num_classes())
    raise(Errc::format_error, "model metadata label count disagrees with the network");

  auto class_of = [&](const std::string& label) -> std::size_t {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end())
      raise(Errc::invalid_dataset, "label '" + label + "' was not seen at train time");
    return static_cast<std::size_t>(it - labels.begin());
  };

  EvalReport report;
  report.labels = labels;
  report.test_count.assign(n_classes, 0);
  report.misprediction_rate.assign(n_classes, 0.0);
  report.mean_activity.assign(n_classes, 0.0);
  report.confusion.assign(n_classes * n_classes, 0);

  std::size_t hits1 = 0, hits3 = 0, hits5 = 0;
  std::vector<std::size_t> correct(n_classes, 0);
  std::vector<double> activity_sum(n_classes, 0.0);

  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.split_assignment()[i] != Split::test) continue;
    const LabeledTrace& item = ds.items()[i];
    const std::size_t true_class = class_of(item.label);
    Tensor probs = net.forward_eval(apply_pipeline(item.trace, params));
    std::vector<std::size_t> order = ranked_classes(probs);

    ++report.n_test;
    ++report.test_count[true_class];
    report.confusion[true_class * n_classes + order[0]] += 1;
    activity_sum[true_class] +=
        static_cast<double>(frequency_activity(item.trace, activity));
    for (std::size_t k = 0; k < std::min<std::size_t>(5, order.size()); ++k) {
      if (order[k] != true_class) continue;
      if (k < 1) ++hits1;
      if (k < 3) ++hits3;
      if (k < 5) ++hits5;
      if (k == 0) ++correct[true_class];
      break;
    }
  }
  if (report.n_test == 0) raise(Errc::invalid_dataset, "test split is empty");

  report.top1 = static_cast<double>(hits1) / static_cast<double>(report.n_test);
  report.top3 = static_cast<double>(hits3) / static_cast<double>(report.n_test);
  report.top5 = static_cast<double>(hits5) / static_cast<double>(report.n_test);
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (report.test_count[c] == 0) continue;
    const double n = static_cast<double>(report.test_count[c]);
    report.misprediction_rate[c] = 1.0 - static_cast<double>(correct[c]) / n;
    report.mean_activity[c] = activity_sum[c] / n;
  }
  return report;
}

std::vector<std::pair<std::string, double>> predict(Network& net, const FrequencyTrace& trace) {
  const std::vector<std::string> labels = labels_from_meta(net.meta());
  const PipelineParams params = pipeline_from_meta(net.meta());
  Tensor probs = net.forward_eval(apply_pipeline(trace, params));
  std::vector<std::pair<std::string, double>> out;
  out.reserve(labels.size());
  for (std::size_t c : ranked_classes(probs)) out.emplace_back(labels[c], probs.data[c]);
  return out;
}

std::optional<double> spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) raise(Errc::invalid_argument, "spearman inputs differ in length");
  const std::size_t n = a.size();
  if (n < 2) return std::nullopt;

  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
    std::vector<double> rank(v.size(), 0.0);
    std::size_t i = 0;
    while (i < order.size()) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
      i = j + 1;
    }
    return rank;
  };

  std::vector<double> ra = ranks(a), rb = ranks(b);
  const double mean = (static_cast<double>(n) + 1.0) / 2.0;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (ra[i] - mean) * (rb[i] - mean);
    var_a += (ra[i] - mean) * (ra[i] - mean);
    var_b += (rb[i] - mean) * (rb[i] - mean);
  }
  if (var_a == 0.0 || var_b == 0.0) return std::nullopt;
  return cov / std::sqrt(var_a * var_b);
}

ActivityReport activity_report(const EvalReport& report, const TraceDataset& ds,
                               const ActivityConfig& cfg) {
  const std::size_t n_classes = report.labels.size();
  std::vector<double> activity_sum(n_classes, 0.0);
  std::vector<std::size_t> counts(n_classes, 0);
  const bool use_test = ds.has_split();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (use_test && ds.split_assignment()[i] != Split::test) continue;
    const LabeledTrace& item = ds.items()[i];
    auto it = std::find(report.labels.begin(), report.labels.end(), item.label);
    if (it == report.labels.end())
      raise(Errc::invalid_dataset, "dataset label '" + item.label + "' not in the report");
    const std::size_t c = static_cast<std::size_t>(it - report.labels.begin());
    activity_sum[c] += static_cast<double>(frequency_activity(item.trace, cfg));
    ++counts[c];
  }

  ActivityReport out;
  std::vector<double> rates, activities;
  for (std::size_t c = 0; c < n_classes; ++c) {
    ActivityRow row;
    row.label = report.labels[c];
    row.misprediction_rate = report.misprediction_rate[c];
    row.mean_activity =
        counts[c] ? activity_sum[c] / static_cast<double>(counts[c]) : 0.0;
    rates.push_back(row.misprediction_rate);
    activities.push_back(row.mean_activity);
    out.rows.push_back(std::move(row));
  }
  std::stable_sort(out.rows.begin(), out.rows.end(), [](const auto& x, const auto& y) {
    return x.misprediction_rate > y.misprediction_rate;
  });
  out.spearman = spearman(rates, activities);
  return out;
}

std::vector<std::pair<std::size_t, EvalReport>> sample_size_sweep(
    const TraceDataset& ds, const std::vector<std::size_t>& sizes, const FitOptions& options) {
  std::vector<std::pair<std::size_t, EvalReport>> out;
  if (sizes.empty()) return out;
  if (ds.size() == 0) raise(Errc::invalid_dataset, "empty dataset");

  const std::size_t max_len = min_trace_length(ds);
  for (std::size_t size : sizes) {
    if (size == 0 || size > max_len)
      raise(Errc::invalid_argument,
            "sweep size " + std::to_string(size) + " exceeds the shortest trace (" +
                std::to_string(max_len) + ")");
  }

  // One split for every size so the models face the same test items.
  TraceDataset split_ds = ds.has_split() ? ds : split_dataset(ds, options.train.seed);
  for (std::size_t size : sizes) {
    FitOptions per_size = options;
    per_size.truncate_len = size;
    FitResult fitted = fit(split_ds, per_size);
    out.emplace_back(size, evaluate(fitted.net, split_ds));
  }
  return out;
}

namespace {

std::string format_ratio(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string report_to_string(const EvalReport& report) {
  std::ostringstream out;
  const std::size_t n = report.labels.size();
  out << "freqprint-report v1\n";
  out << "num_classes=" << n << "\n";
  out << "n_test=" << report.n_test << "\n";
  out << "top1=" << format_ratio(report.top1) << "\n";
  out << "top3=" << format_ratio(report.top3) << "\n";
  out << "top5=" << format_ratio(report.top5) << "\n";
  out << "\n";
  out << "label\ttest_count\tmisprediction_rate\tmean_activity\n";
  for (std::size_t c = 0; c < n; ++c) {
    char activity[32];
    std::snprintf(activity, sizeof(activity), "%.3f", report.mean_activity[c]);
    out << report.labels[c] << "\t" << report.test_count[c] << "\t"
        << format_ratio(report.misprediction_rate[c]) << "\t" << activity << "\n";
  }
  out << "\n";
  out << "confusion";
  for (std::size_t c = 0; c < n; ++c) out << "\t" << report.labels[c];
  out << "\n";
  for (std::size_t r = 0; r < n; ++r) {
    out << report.labels[r];
    for (std::size_t c = 0; c < n; ++c) out << "\t" << report.confusion[r * n + c];
    out << "\n";
  }
  return out.str();
}

std::string activity_report_to_string(const ActivityReport& report) {
  std::ostringstream out;
  out << "label\tmisprediction_rate\tmean_activity\n";
  for (const ActivityRow& row : report.rows) {
    char activity[32];
    std::snprintf(activity, sizeof(activity), "%.3f", row.mean_activity);
    out << row.label << "\t" << format_ratio(row.misprediction_rate) << "\t" << activity << "\n";
  }
  if (report.spearman)
    out << "spearman=" << format_ratio(*report.spearman) << "\n";
  else
    out << "spearman=n/a\n";
  return out.str();
}

void write_report(const std::string& path, const EvalReport& report) {
  atomic_write_file(path, report_to_string(report));
}

}  // namespace freqprint
