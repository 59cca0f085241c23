#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "core/rng.hpp"
#include "nn/tensor.hpp"

namespace freqprint {

enum class LayerKind : std::uint32_t {
  conv1d = 1,
  relu = 2,
  maxpool1d = 3,
  dropout = 4,
  dense = 5,
  softmax = 6,
};

const char* layer_kind_name(LayerKind kind) noexcept;

struct LayerContext {
  bool training = false;
  Rng* rng = nullptr;  // consumed by dropout when training
};

// Layers cache whatever forward state backward needs (inputs, masks, argmax
// positions). Parameters and their gradients live in flat buffers laid out
// weights-then-bias; serialization writes these buffers verbatim.
class Layer {
public:
  virtual ~Layer() = default;

  virtual LayerKind kind() const noexcept = 0;
  virtual Tensor forward(const Tensor& input, LayerContext& ctx) = 0;
  virtual Tensor backward(const Tensor& grad_out) = 0;

  virtual std::span<double> params() { return {}; }
  virtual std::span<const double> params() const { return {}; }
  virtual std::span<double> grads() { return {}; }

  // Shape/rate metadata for serialization; see each layer for the layout.
  virtual std::vector<std::uint64_t> dims() const { return {}; }

  virtual void init(Rng&) {}
  virtual std::string describe() const = 0;
};

// Same-padded stride-1 convolution with the fixed 3-tap kernel.
// dims = [out_channels, in_channels, 3].
class Conv1D : public Layer {
public:
  static constexpr std::size_t kKernel = 3;

  Conv1D(std::size_t in_channels, std::size_t out_channels);

  LayerKind kind() const noexcept override { return LayerKind::conv1d; }
  Tensor forward(const Tensor& input, LayerContext& ctx) override;
  Tensor backward(const Tensor& grad_out) override;
  std::span<double> params() override { return params_; }
  std::span<const double> params() const override { return params_; }
  std::span<double> grads() override { return grads_; }
  std::vector<std::uint64_t> dims() const override;
  void init(Rng& rng) override;
  std::string describe() const override;

  std::size_t in_channels() const noexcept { return in_ch_; }
  std::size_t out_channels() const noexcept { return out_ch_; }
  double weight(std::size_t co, std::size_t ci, std::size_t k) const {
    return params_[(co * in_ch_ + ci) * kKernel + k];
  }
  double bias(std::size_t co) const { return params_[out_ch_ * in_ch_ * kKernel + co]; }
  const Tensor& cached_input() const { return input_; }

private:
  std::size_t in_ch_;
  std::size_t out_ch_;
  std::vector<double> params_;
  std::vector<double> grads_;
  Tensor input_;
};

class ReLU : public Layer {
public:
  LayerKind kind() const noexcept override { return LayerKind::relu; }
  Tensor forward(const Tensor& input, LayerContext& ctx) override;
  Tensor backward(const Tensor& grad_out) override;
  std::string describe() const override { return "relu"; }

  const Tensor& cached_input() const { return input_; }

private:
  Tensor input_;
};

// Size-2 stride-2 max pooling; a trailing odd sample is dropped.
class MaxPool1D : public Layer {
public:
  LayerKind kind() const noexcept override { return LayerKind::maxpool1d; }
  Tensor forward(const Tensor& input, LayerContext& ctx) override;
  Tensor backward(const Tensor& grad_out) override;
  std::string describe() const override { return "maxpool2"; }

  const Tensor& cached_input() const { return input_; }
  const std::vector<std::size_t>& argmax() const { return argmax_; }

private:
  Tensor input_;
  std::vector<std::size_t> argmax_;  // flat input index per output element
  std::size_t in_length_ = 0;
};

// Inverted dropout: surviving activations are scaled by 1/(1-rate) during
// training, evaluation is the identity. dims = [rate in millionths].
class Dropout : public Layer {
public:
  explicit Dropout(double rate);

  LayerKind kind() const noexcept override { return LayerKind::dropout; }
  Tensor forward(const Tensor& input, LayerContext& ctx) override;
  Tensor backward(const Tensor& grad_out) override;
  std::vector<std::uint64_t> dims() const override;
  std::string describe() const override;

  double rate() const noexcept { return rate_; }

private:
  double rate_;
  std::vector<float> mask_;  // scale factor per element from the last forward
  bool last_training_ = false;
};

// Fully connected layer over the flattened input. dims = [units, in_features].
class Dense : public Layer {
public:
  Dense(std::size_t in_features, std::size_t units);

  LayerKind kind() const noexcept override { return LayerKind::dense; }
  Tensor forward(const Tensor& input, LayerContext& ctx) override;
  Tensor backward(const Tensor& grad_out) override;
  std::span<double> params() override { return params_; }
  std::span<const double> params() const override { return params_; }
  std::span<double> grads() override { return grads_; }
  std::vector<std::uint64_t> dims() const override;
  void init(Rng& rng) override;
  std::string describe() const override;

  std::size_t in_features() const noexcept { return in_features_; }
  std::size_t units() const noexcept { return units_; }
  double weight(std::size_t u, std::size_t v) const { return params_[u * in_features_ + v]; }
  double bias(std::size_t u) const { return params_[units_ * in_features_ + u]; }
  const Tensor& cached_input() const { return input_; }

private:
  std::size_t in_features_;
  std::size_t units_;
  std::vector<double> params_;
  std::vector<double> grads_;
  Tensor input_;
};

class Softmax : public Layer {
public:
  LayerKind kind() const noexcept override { return LayerKind::softmax; }
  Tensor forward(const Tensor& input, LayerContext& ctx) override;
  Tensor backward(const Tensor& grad_out) override;
  std::string describe() const override { return "softmax"; }

  const Tensor& cached_logits() const { return input_; }
  const Tensor& cached_probs() const { return output_; }

private:
  Tensor input_;
  Tensor output_;
};

}  // namespace freqprint
