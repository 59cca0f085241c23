#include "nn/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace freqprint {

namespace {

double rel_error(double ga, double gn) {
  return std::abs(ga - gn) / std::max({std::abs(ga), std::abs(gn), 1e-8});
}

// Loss straight from the logits so both checkers share one definition.
double loss_eval(Network& net, const Tensor& input, int label) {
  auto& layers = net.layers();
  LayerContext ctx;
  Tensor cur = input;
  for (std::size_t i = 0; i + 1 < layers.size(); ++i) cur = layers[i]->forward(cur, ctx);
  return Network::loss_from_logits(cur, label);
}

std::vector<std::vector<double>> analytic_gradients(Network& net, const Tensor& input,
                                                    int label) {
  if (net.layers().empty() || net.layers().back()->kind() != LayerKind::softmax)
    raise(Errc::state_error, "gradient check needs a softmax output layer");
  LayerContext ctx;
  net.forward(input, ctx);
  net.zero_grads();
  net.backward_from_label(label);
  std::vector<std::vector<double>> grads;
  for (auto& layer : net.layers()) {
    auto g = layer->grads();
    grads.emplace_back(g.begin(), g.end());
  }
  return grads;
}

// ---- fast path: propagate the output change of a single perturbed
// parameter through the cached activations of one clean forward pass,
// with ReLU masks and pooling argmax frozen at that forward ----

struct DeltaState {
  Tensor* buf = nullptr;     // current delta, valid only inside [lo, hi)
  std::size_t lo = 0;        // channel range
  std::size_t hi = 0;
};

const Tensor* cached_input_of(const Layer* layer) {
  switch (layer->kind()) {
    case LayerKind::conv1d: return &static_cast<const Conv1D*>(layer)->cached_input();
    case LayerKind::relu: return &static_cast<const ReLU*>(layer)->cached_input();
    case LayerKind::maxpool1d: return &static_cast<const MaxPool1D*>(layer)->cached_input();
    case LayerKind::dense: return &static_cast<const Dense*>(layer)->cached_input();
    case LayerKind::softmax: return &static_cast<const Softmax*>(layer)->cached_logits();
    case LayerKind::dropout: return nullptr;  // identity in eval mode, nothing cached
  }
  return nullptr;
}

class FastChecker {
public:
  FastChecker(Network& net, int label) : net_(net), label_(label) {
    auto& layers = net.layers();
    n_layers_ = layers.size();
    // Output shape of layer i = cached input shape of the next caching layer
    // (eval-mode dropout is shape-preserving and caches nothing).
    out_delta_.resize(n_layers_);
    for (std::size_t i = 0; i + 1 < n_layers_; ++i) {
      const Tensor* shape = nullptr;
      for (std::size_t j = i + 1; j < n_layers_ && shape == nullptr; ++j)
        shape = cached_input_of(layers[j].get());
      out_delta_[i] = Tensor(shape->channels, shape->length);
    }
    logits_ = static_cast<const Softmax*>(layers.back().get())->cached_logits();
    scratch_logits_ = logits_;
  }

  // Loss with layers_[li].params()[p] moved by eps, everything else fixed.
  double perturbed_loss(std::size_t li, std::size_t p, double eps) {
    auto& layers = net_.layers();
    DeltaState d = seed_delta(layers[li].get(), li, p, eps);
    for (std::size_t i = li + 1; i + 1 < n_layers_; ++i)
      d = propagate(layers[i].get(), i, d);
    scratch_logits_.data = logits_.data;
    for (std::size_t c = d.lo; c < d.hi; ++c)
      for (std::size_t j = 0; j < d.buf->length; ++j)
        scratch_logits_.at(c, j) += d.buf->at(c, j);
    return Network::loss_from_logits(scratch_logits_, label_);
  }

private:
  DeltaState seed_delta(Layer* layer, std::size_t li, std::size_t p, double eps) {
    Tensor& out = out_delta_[li];
    if (layer->kind() == LayerKind::conv1d) {
      auto* conv = static_cast<Conv1D*>(layer);
      const Tensor& in = conv->cached_input();
      const std::size_t n = in.length;
      const std::size_t n_weights = conv->out_channels() * conv->in_channels() * Conv1D::kKernel;
      std::size_t co;
      if (p < n_weights) {
        co = p / (conv->in_channels() * Conv1D::kKernel);
        const std::size_t rem = p % (conv->in_channels() * Conv1D::kKernel);
        const std::size_t ci = rem / Conv1D::kKernel;
        const std::size_t k = rem % Conv1D::kKernel;
        const double* in_row = in.row(ci);
        double* out_row = out.row(co);
        for (std::size_t i = 0; i < n; ++i) {
          const std::size_t j = i + k;  // input index + 1
          out_row[i] = (j >= 1 && j <= n) ? eps * in_row[j - 1] : 0.0;
        }
      } else {
        co = p - n_weights;
        double* out_row = out.row(co);
        std::fill(out_row, out_row + n, eps);
      }
      return {&out, co, co + 1};
    }
    auto* dense = static_cast<Dense*>(layer);
    const std::size_t n_weights = dense->units() * dense->in_features();
    std::size_t u;
    if (p < n_weights) {
      u = p / dense->in_features();
      const std::size_t v = p % dense->in_features();
      out.data[u] = eps * dense->cached_input().data[v];
    } else {
      u = p - n_weights;
      out.data[u] = eps;
    }
    return {&out, u, u + 1};
  }

  DeltaState propagate(Layer* layer, std::size_t li, const DeltaState& d) {
    switch (layer->kind()) {
      case LayerKind::dropout:
        return d;  // eval mode: identity
      case LayerKind::relu: {
        // branch-fixed: keep the mask of the clean forward so the perturbed
        // loss stays on the piecewise-linear branch backward differentiates
        const Tensor& x = static_cast<ReLU*>(layer)->cached_input();
        for (std::size_t c = d.lo; c < d.hi; ++c) {
          const double* x_row = x.row(c);
          double* d_row = d.buf->row(c);
          for (std::size_t i = 0; i < x.length; ++i)
            if (x_row[i] <= 0.0) d_row[i] = 0.0;
        }
        return d;  // in place, same shape
      }
      case LayerKind::maxpool1d: {
        // branch-fixed: route deltas through the cached argmax winners
        auto* pool = static_cast<MaxPool1D*>(layer);
        const Tensor& x = pool->cached_input();
        const auto& argmax = pool->argmax();
        Tensor& out = out_delta_[li];
        for (std::size_t c = d.lo; c < d.hi; ++c) {
          const double* d_row = d.buf->row(c);
          double* out_row = out.row(c);
          for (std::size_t i = 0; i < out.length; ++i)
            out_row[i] = d_row[argmax[c * out.length + i] - c * x.length];
        }
        return {&out, d.lo, d.hi};
      }
      case LayerKind::conv1d: {
        auto* conv = static_cast<Conv1D*>(layer);
        Tensor& out = out_delta_[li];
        const std::size_t n = out.length;
        for (std::size_t co = 0; co < conv->out_channels(); ++co) {
          double* out_row = out.row(co);
          std::fill(out_row, out_row + n, 0.0);
          for (std::size_t ci = d.lo; ci < d.hi; ++ci) {
            const double* d_row = d.buf->row(ci);
            const double w0 = conv->weight(co, ci, 0);
            const double w1 = conv->weight(co, ci, 1);
            const double w2 = conv->weight(co, ci, 2);
            out_row[0] += w1 * d_row[0];
            if (n > 1) out_row[0] += w2 * d_row[1];
            for (std::size_t i = 1; i + 1 < n; ++i)
              out_row[i] += w0 * d_row[i - 1] + w1 * d_row[i] + w2 * d_row[i + 1];
            if (n > 1) out_row[n - 1] += w0 * d_row[n - 2] + w1 * d_row[n - 1];
          }
        }
        return {&out, 0, conv->out_channels()};
      }
      case LayerKind::dense: {
        auto* dense = static_cast<Dense*>(layer);
        Tensor& out = out_delta_[li];
        const std::size_t flat_lo = d.lo * d.buf->length;
        const std::size_t flat_hi = d.hi * d.buf->length;
        const double* d_flat = d.buf->data.data();
        for (std::size_t u = 0; u < dense->units(); ++u) {
          const double* w = dense->params().data() + u * dense->in_features();
          double acc = 0.0;
          for (std::size_t v = flat_lo; v < flat_hi; ++v) acc += w[v] * d_flat[v];
          out.data[u] = acc;
        }
        return {&out, 0, dense->units()};
      }
      case LayerKind::softmax:
        break;
    }
    raise(Errc::state_error, "unexpected layer in delta propagation");
  }

  Network& net_;
  int label_;
  std::size_t n_layers_ = 0;
  std::vector<Tensor> out_delta_;
  Tensor logits_;
  Tensor scratch_logits_;
};

}  // namespace

GradCheckResult gradient_check(Network& net, const Tensor& input, int label, double epsilon) {
  if (!(epsilon > 0.0)) raise(Errc::invalid_argument, "epsilon must be positive");
  std::vector<std::vector<double>> ga = analytic_gradients(net, input, label);
  FastChecker checker(net, label);

  GradCheckResult result;
  auto& layers = net.layers();
  for (std::size_t li = 0; li < layers.size(); ++li) {
    const std::size_t n_params = layers[li]->params().size();
    for (std::size_t p = 0; p < n_params; ++p) {
      const double f_plus = checker.perturbed_loss(li, p, epsilon);
      const double f_minus = checker.perturbed_loss(li, p, -epsilon);
      const double gn = (f_plus - f_minus) / (2.0 * epsilon);
      result.max_rel_error = std::max(result.max_rel_error, rel_error(ga[li][p], gn));
      ++result.n_params;
    }
  }
  return result;
}

GradCheckResult gradient_check_exact(Network& net, const Tensor& input, int label,
                                     double epsilon) {
  if (!(epsilon > 0.0)) raise(Errc::invalid_argument, "epsilon must be positive");
  std::vector<std::vector<double>> ga = analytic_gradients(net, input, label);

  GradCheckResult result;
  auto& layers = net.layers();
  for (std::size_t li = 0; li < layers.size(); ++li) {
    auto params = layers[li]->params();
    for (std::size_t p = 0; p < params.size(); ++p) {
      const double saved = params[p];
      params[p] = saved + epsilon;
      const double f_plus = loss_eval(net, input, label);
      params[p] = saved - epsilon;
      const double f_minus = loss_eval(net, input, label);
      params[p] = saved;
      const double gn = (f_plus - f_minus) / (2.0 * epsilon);
      result.max_rel_error = std::max(result.max_rel_error, rel_error(ga[li][p], gn));
      ++result.n_params;
    }
  }
  return result;
}

}  // namespace freqprint
