#include "classifier/pipeline.hpp"

#include "core/error.hpp"
#include "core/text.hpp"

namespace freqprint {

FrequencyTrace apply_filters(const FrequencyTrace& trace, const PipelineParams& params) {
  if (params.truncate_len == 0) raise(Errc::invalid_argument, "pipeline truncate_len unset");
  if (trace.size() < params.truncate_len)
    raise(Errc::shape_error, "trace has " + std::to_string(trace.size()) +
                                 " samples, pipeline needs " +
                                 std::to_string(params.truncate_len));
  FrequencyTrace out = truncate(trace, params.truncate_len);
  if (params.smooth_window > 0) out = gaussian_smooth(out, params.smooth_window);
  if (params.movmax_window > 0) out = moving_max(out, params.movmax_window);
  return out;
}

Tensor apply_pipeline(const FrequencyTrace& trace, const PipelineParams& params) {
  FrequencyTrace filtered = apply_filters(trace, params);
  std::vector<double> values = normalize(filtered, params.f_min, params.f_max);
  Tensor out(1, values.size());
  out.data = std::move(values);
  return out;
}

void store_pipeline(Network& net, const PipelineParams& params,
                    const std::vector<std::string>& labels) {
  MetaMap& meta = net.meta();
  meta["pipeline.truncate_len"] = std::to_string(params.truncate_len);
  meta["pipeline.smooth_window"] = std::to_string(params.smooth_window);
  meta["pipeline.movmax_window"] = std::to_string(params.movmax_window);
  meta["pipeline.f_min"] = std::to_string(params.f_min);
  meta["pipeline.f_max"] = std::to_string(params.f_max);
  std::string joined;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].find('\t') != std::string::npos)
      raise(Errc::invalid_argument, "label contains a tab: '" + labels[i] + "'");
    if (i) joined += '\t';
    joined += labels[i];
  }
  meta["labels"] = joined;
}

namespace {

std::string require_meta(const MetaMap& meta, const std::string& key) {
  auto it = meta.find(key);
  if (it == meta.end())
    raise(Errc::format_error, "model metadata missing '" + key + "'");
  return it->second;
}

std::int64_t meta_int(const MetaMap& meta, const std::string& key) {
  const std::string value = require_meta(meta, key);
  try {
    return parse_int64(value, 0);
  } catch (const ParseError&) {
    raise(Errc::format_error, "model metadata '" + key + "' is not numeric: '" + value + "'");
  }
}

}  // namespace

PipelineParams pipeline_from_meta(const MetaMap& meta) {
  PipelineParams params;
  params.truncate_len = static_cast<std::size_t>(meta_int(meta, "pipeline.truncate_len"));
  params.smooth_window = static_cast<int>(meta_int(meta, "pipeline.smooth_window"));
  params.movmax_window = static_cast<int>(meta_int(meta, "pipeline.movmax_window"));
  params.f_min = meta_int(meta, "pipeline.f_min");
  params.f_max = meta_int(meta, "pipeline.f_max");
  return params;
}

std::vector<std::string> labels_from_meta(const MetaMap& meta) {
  std::vector<std::string> labels = split_on(require_meta(meta, "labels"), '\t');
  if (labels.size() == 1 && labels[0].empty())
    raise(Errc::format_error, "model metadata has no labels");
  return labels;
}

}  // namespace freqprint
