#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "core/trace.hpp"
#include "nn/layers.hpp"

namespace freqprint {

// A layer stack with fixed input shape plus a free-form metadata table that
// travels with the serialized model (labels, preprocessing parameters, ...).
class Network {
public:
  Network(std::size_t input_channels, std::size_t input_length, std::size_t num_classes);

  Network(Network&&) = default;
  Network& operator=(Network&&) = default;

  void add(std::unique_ptr<Layer> layer);
  void init_params(std::uint64_t seed);

  Tensor forward(const Tensor& input, LayerContext& ctx);
  Tensor forward_eval(const Tensor& input);
  int predict(const Tensor& input);

  // Fused softmax + cross-entropy backward from the most recent forward;
  // seeds the chain with dL/dlogits = probs - onehot(label).
  void backward_from_label(int label);
  void zero_grads();

  static double cross_entropy(const Tensor& probs, int label);
  static double loss_from_logits(const Tensor& logits, int label);

  std::vector<std::unique_ptr<Layer>>& layers() noexcept { return layers_; }
  const std::vector<std::unique_ptr<Layer>>& layers() const noexcept { return layers_; }
  std::size_t input_channels() const noexcept { return input_channels_; }
  std::size_t input_length() const noexcept { return input_length_; }
  std::size_t num_classes() const noexcept { return num_classes_; }
  MetaMap& meta() noexcept { return meta_; }
  const MetaMap& meta() const noexcept { return meta_; }

  std::size_t param_count() const;
  std::vector<double> snapshot_params() const;
  void restore_params(const std::vector<double>& snapshot);

  std::string describe() const;

  std::vector<std::uint8_t> to_bytes() const;
  static Network from_bytes(const std::uint8_t* data, std::size_t size);
  void save(const std::filesystem::path& path) const;
  static Network load(const std::filesystem::path& path);

private:
  std::size_t input_channels_;
  std::size_t input_length_;
  std::size_t num_classes_;
  std::vector<std::unique_ptr<Layer>> layers_;
  MetaMap meta_;
};

}  // namespace freqprint
