#include "nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "core/error.hpp"

namespace freqprint {

const char* layer_kind_name(LayerKind kind) noexcept {
  switch (kind) {
    case LayerKind::conv1d: return "conv1d";
    case LayerKind::relu: return "relu";
    case LayerKind::maxpool1d: return "maxpool1d";
    case LayerKind::dropout: return "dropout";
    case LayerKind::dense: return "dense";
    case LayerKind::softmax: return "softmax";
  }
  return "?";
}

namespace {

void he_uniform(std::span<double> weights, std::size_t fan_in, Rng& rng) {
  double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& w : weights) w = dist(rng);
}

}  // namespace

Conv1D::Conv1D(std::size_t in_channels, std::size_t out_channels)
    : in_ch_(in_channels), out_ch_(out_channels) {
  if (in_channels == 0 || out_channels == 0)
    raise(Errc::invalid_argument, "conv1d channel counts must be positive");
  params_.assign(out_ch_ * in_ch_ * kKernel + out_ch_, 0.0);
  grads_.assign(params_.size(), 0.0);
}

std::vector<std::uint64_t> Conv1D::dims() const { return {out_ch_, in_ch_, kKernel}; }

void Conv1D::init(Rng& rng) {
  he_uniform(std::span(params_).first(out_ch_ * in_ch_ * kKernel), in_ch_ * kKernel, rng);
  std::fill(params_.begin() + static_cast<std::ptrdiff_t>(out_ch_ * in_ch_ * kKernel),
            params_.end(), 0.0);
}

std::string Conv1D::describe() const {
  return "conv1d(" + std::to_string(in_ch_) + "->" + std::to_string(out_ch_) + ", k=3, same)";
}

Tensor Conv1D::forward(const Tensor& input, LayerContext&) {
  if (input.channels != in_ch_)
    raise(Errc::shape_error, "conv1d expects " + std::to_string(in_ch_) + " channels, got " +
                                 std::to_string(input.channels));
  if (input.length == 0) raise(Errc::shape_error, "conv1d on empty input");
  input_ = input;
  const std::size_t n = input.length;
  Tensor out(out_ch_, n);
  for (std::size_t co = 0; co < out_ch_; ++co) {
    double* out_row = out.row(co);
    std::fill(out_row, out_row + n, bias(co));
    for (std::size_t ci = 0; ci < in_ch_; ++ci) {
      const double* in_row = input.row(ci);
      const double w0 = weight(co, ci, 0);
      const double w1 = weight(co, ci, 1);
      const double w2 = weight(co, ci, 2);
      out_row[0] += w1 * in_row[0];
      if (n > 1) out_row[0] += w2 * in_row[1];
      for (std::size_t i = 1; i + 1 < n; ++i)
        out_row[i] += w0 * in_row[i - 1] + w1 * in_row[i] + w2 * in_row[i + 1];
      if (n > 1) out_row[n - 1] += w0 * in_row[n - 2] + w1 * in_row[n - 1];
    }
  }
  return out;
}

Tensor Conv1D::backward(const Tensor& grad_out) {
  if (grad_out.channels != out_ch_ || grad_out.length != input_.length)
    raise(Errc::shape_error, "conv1d backward shape mismatch");
  const std::size_t n = input_.length;
  Tensor grad_in(in_ch_, n);
  double* bias_grad = grads_.data() + out_ch_ * in_ch_ * kKernel;
  for (std::size_t co = 0; co < out_ch_; ++co) {
    const double* g_row = grad_out.row(co);
    double bsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) bsum += g_row[i];
    bias_grad[co] += bsum;
    for (std::size_t ci = 0; ci < in_ch_; ++ci) {
      const double* in_row = input_.row(ci);
      double* gin_row = grad_in.row(ci);
      double gw0 = 0.0, gw1 = 0.0, gw2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double g = g_row[i];
        if (i > 0) gw0 += g * in_row[i - 1];
        gw1 += g * in_row[i];
        if (i + 1 < n) gw2 += g * in_row[i + 1];
      }
      double* wg = grads_.data() + (co * in_ch_ + ci) * kKernel;
      wg[0] += gw0;
      wg[1] += gw1;
      wg[2] += gw2;
      const double w0 = weight(co, ci, 0);
      const double w1 = weight(co, ci, 1);
      const double w2 = weight(co, ci, 2);
      // d out[i] / d in[j]: w0 pairs j = i-1, w1 j = i, w2 j = i+1.
      for (std::size_t j = 0; j < n; ++j) {
        double acc = w1 * g_row[j];
        if (j + 1 < n) acc += w0 * g_row[j + 1];
        if (j > 0) acc += w2 * g_row[j - 1];
        gin_row[j] += acc;
      }
    }
  }
  return grad_in;
}

Tensor ReLU::forward(const Tensor& input, LayerContext&) {
  input_ = input;
  Tensor out = input;
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  return out;
}

Tensor ReLU::backward(const Tensor& grad_out) {
  if (grad_out.data.size() != input_.data.size())
    raise(Errc::shape_error, "relu backward shape mismatch");
  Tensor grad_in = grad_out;
  for (std::size_t i = 0; i < grad_in.data.size(); ++i)
    if (input_.data[i] <= 0.0) grad_in.data[i] = 0.0;
  return grad_in;
}

Tensor MaxPool1D::forward(const Tensor& input, LayerContext&) {
  if (input.length < 2) raise(Errc::shape_error, "maxpool1d needs at least 2 samples");
  input_ = input;
  in_length_ = input.length;
  const std::size_t out_len = input.length / 2;
  Tensor out(input.channels, out_len);
  argmax_.assign(input.channels * out_len, 0);
  for (std::size_t c = 0; c < input.channels; ++c) {
    const double* in_row = input.row(c);
    double* out_row = out.row(c);
    for (std::size_t i = 0; i < out_len; ++i) {
      const std::size_t a = 2 * i, b = 2 * i + 1;
      // ties keep the left element
      if (in_row[a] >= in_row[b]) {
        out_row[i] = in_row[a];
        argmax_[c * out_len + i] = c * in_length_ + a;
      } else {
        out_row[i] = in_row[b];
        argmax_[c * out_len + i] = c * in_length_ + b;
      }
    }
  }
  return out;
}

Tensor MaxPool1D::backward(const Tensor& grad_out) {
  if (grad_out.channels != input_.channels || grad_out.length != in_length_ / 2)
    raise(Errc::shape_error, "maxpool1d backward shape mismatch");
  Tensor grad_in(input_.channels, in_length_);
  for (std::size_t i = 0; i < grad_out.data.size(); ++i)
    grad_in.data[argmax_[i]] += grad_out.data[i];
  return grad_in;
}

Dropout::Dropout(double rate) : rate_(rate) {
  if (!(rate > 0.0 && rate < 1.0)) raise(Errc::invalid_argument, "dropout rate must be in (0,1)");
}

std::vector<std::uint64_t> Dropout::dims() const {
  return {static_cast<std::uint64_t>(std::llround(rate_ * 1e6))};
}

std::string Dropout::describe() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "dropout(%.2f)", rate_);
  return buf;
}

Tensor Dropout::forward(const Tensor& input, LayerContext& ctx) {
  last_training_ = ctx.training;
  if (!ctx.training) return input;
  if (ctx.rng == nullptr) raise(Errc::state_error, "training dropout needs an RNG");
  const double keep = 1.0 - rate_;
  const float scale = static_cast<float>(1.0 / keep);
  std::bernoulli_distribution survive(keep);
  mask_.resize(input.data.size());
  Tensor out = input;
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    mask_[i] = survive(*ctx.rng) ? scale : 0.0f;
    out.data[i] *= mask_[i];
  }
  return out;
}

Tensor Dropout::backward(const Tensor& grad_out) {
  if (!last_training_) return grad_out;
  if (grad_out.data.size() != mask_.size())
    raise(Errc::shape_error, "dropout backward shape mismatch");
  Tensor grad_in = grad_out;
  for (std::size_t i = 0; i < grad_in.data.size(); ++i) grad_in.data[i] *= mask_[i];
  return grad_in;
}

Dense::Dense(std::size_t in_features, std::size_t units)
    : in_features_(in_features), units_(units) {
  if (in_features == 0 || units == 0)
    raise(Errc::invalid_argument, "dense sizes must be positive");
  params_.assign(units_ * in_features_ + units_, 0.0);
  grads_.assign(params_.size(), 0.0);
}

std::vector<std::uint64_t> Dense::dims() const { return {units_, in_features_}; }

void Dense::init(Rng& rng) {
  he_uniform(std::span(params_).first(units_ * in_features_), in_features_, rng);
  std::fill(params_.begin() + static_cast<std::ptrdiff_t>(units_ * in_features_), params_.end(),
            0.0);
}

std::string Dense::describe() const {
  return "dense(" + std::to_string(in_features_) + "->" + std::to_string(units_) + ")";
}

Tensor Dense::forward(const Tensor& input, LayerContext&) {
  if (input.size() != in_features_)
    raise(Errc::shape_error, "dense expects " + std::to_string(in_features_) + " features, got " +
                                 std::to_string(input.size()));
  input_ = input;
  Tensor out(units_, 1);
  const double* x = input.data.data();
  for (std::size_t u = 0; u < units_; ++u) {
    const double* w = params_.data() + u * in_features_;
    double acc = bias(u);
    for (std::size_t v = 0; v < in_features_; ++v) acc += w[v] * x[v];
    out.data[u] = acc;
  }
  return out;
}

Tensor Dense::backward(const Tensor& grad_out) {
  if (grad_out.size() != units_) raise(Errc::shape_error, "dense backward shape mismatch");
  Tensor grad_in(input_.channels, input_.length);
  const double* x = input_.data.data();
  double* bias_grad = grads_.data() + units_ * in_features_;
  for (std::size_t u = 0; u < units_; ++u) {
    const double g = grad_out.data[u];
    bias_grad[u] += g;
    double* wg = grads_.data() + u * in_features_;
    const double* w = params_.data() + u * in_features_;
    double* gi = grad_in.data.data();
    for (std::size_t v = 0; v < in_features_; ++v) {
      wg[v] += g * x[v];
      gi[v] += g * w[v];
    }
  }
  return grad_in;
}

Tensor Softmax::forward(const Tensor& input, LayerContext&) {
  if (input.size() == 0) raise(Errc::shape_error, "softmax on empty input");
  input_ = input;
  Tensor out = input;
  const double zmax = *std::max_element(out.data.begin(), out.data.end());
  double sum = 0.0;
  for (double& v : out.data) {
    v = std::exp(v - zmax);
    sum += v;
  }
  for (double& v : out.data) v /= sum;
  output_ = out;
  return out;
}

Tensor Softmax::backward(const Tensor& grad_out) {
  if (grad_out.data.size() != output_.data.size())
    raise(Errc::shape_error, "softmax backward shape mismatch");
  // dL/dz_i = p_i (g_i - sum_j p_j g_j)
  double dot = 0.0;
  for (std::size_t i = 0; i < output_.data.size(); ++i) dot += output_.data[i] * grad_out.data[i];
  Tensor grad_in = grad_out;
  for (std::size_t i = 0; i < grad_in.data.size(); ++i)
    grad_in.data[i] = output_.data[i] * (grad_out.data[i] - dot);
  return grad_in;
}

}  // namespace freqprint
