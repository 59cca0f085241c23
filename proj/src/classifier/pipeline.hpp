#pragma once

#include <cstdint>

#include "core/trace.hpp"
#include "nn/network.hpp"
#include "nn/tensor.hpp"

namespace freqprint {

// Preprocessing applied identically at train and predict time, in this order:
// truncate -> gaussian smooth (window 0 = off) -> moving max (window 0 = off)
// -> normalize to [0,1] with the train-split bounds.
struct PipelineParams {
  std::size_t truncate_len = 0;
  int smooth_window = 0;
  int movmax_window = 0;
  std::int64_t f_min = 0;
  std::int64_t f_max = 1;

  bool operator==(const PipelineParams&) const = default;
};

// Filtered but not yet normalized trace (bounds are fit on these values).
FrequencyTrace apply_filters(const FrequencyTrace& trace, const PipelineParams& params);

// Full pipeline to a 1 x truncate_len input tensor. Traces shorter than
// truncate_len are a shape error.
Tensor apply_pipeline(const FrequencyTrace& trace, const PipelineParams& params);

// Pipeline parameters and the label order travel inside the model metadata.
void store_pipeline(Network& net, const PipelineParams& params,
                    const std::vector<std::string>& labels);
PipelineParams pipeline_from_meta(const MetaMap& meta);
std::vector<std::string> labels_from_meta(const MetaMap& meta);

}  // namespace freqprint
