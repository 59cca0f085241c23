#include "nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/error.hpp"

namespace freqprint {

namespace {

class Adam {
public:
  Adam(std::size_t n_params, const TrainOptions& opt)
      : opt_(opt), m_(n_params, 0.0), v_(n_params, 0.0) {}

  void step(Network& net) {
    ++t_;
    const double bc1 = 1.0 - std::pow(opt_.beta1, t_);
    const double bc2 = 1.0 - std::pow(opt_.beta2, t_);
    std::size_t offset = 0;
    for (auto& layer : net.layers()) {
      auto p = layer->params();
      auto g = layer->grads();
      for (std::size_t i = 0; i < p.size(); ++i) {
        double& m = m_[offset + i];
        double& v = v_[offset + i];
        m = opt_.beta1 * m + (1.0 - opt_.beta1) * g[i];
        v = opt_.beta2 * v + (1.0 - opt_.beta2) * g[i] * g[i];
        p[i] -= opt_.learning_rate * (m / bc1) / (std::sqrt(v / bc2) + opt_.adam_epsilon);
      }
      offset += p.size();
    }
  }

private:
  TrainOptions opt_;
  std::vector<double> m_;
  std::vector<double> v_;
  int t_ = 0;
};

void validate_items(const Network& net, const std::vector<Tensor>& xs,
                    const std::vector<int>& ys, const char* what) {
  if (xs.size() != ys.size())
    raise(Errc::invalid_argument, std::string(what) + " inputs and labels differ in count");
  for (const Tensor& x : xs)
    if (x.channels != net.input_channels() || x.length != net.input_length())
      raise(Errc::shape_error, std::string(what) + " item does not match the network input");
  for (int y : ys)
    if (y < 0 || static_cast<std::size_t>(y) >= net.num_classes())
      raise(Errc::invalid_argument, std::string(what) + " label out of range");
}

}  // namespace

double accuracy(Network& net, const std::vector<Tensor>& xs, const std::vector<int>& ys) {
  if (xs.size() != ys.size()) raise(Errc::invalid_argument, "inputs and labels differ in count");
  if (xs.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (net.predict(xs[i]) == ys[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(xs.size());
}

TrainResult train(Network& net, const std::vector<Tensor>& train_x,
                  const std::vector<int>& train_y, const std::vector<Tensor>& val_x,
                  const std::vector<int>& val_y, const TrainOptions& options,
                  const EpochCallback& on_epoch) {
  if (train_x.empty()) raise(Errc::invalid_argument, "empty training set");
  if (options.batch_size == 0) raise(Errc::invalid_argument, "batch_size must be positive");
  if (options.max_epochs <= 0) raise(Errc::invalid_argument, "max_epochs must be positive");
  if (!(options.learning_rate > 0.0))
    raise(Errc::invalid_argument, "learning_rate must be positive");
  validate_items(net, train_x, train_y, "train");
  validate_items(net, val_x, val_y, "validation");

  Adam adam(net.param_count(), options);
  Rng shuffle_rng(derive_seed(options.seed, 0x5481));

  std::vector<std::size_t> order(train_x.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  std::vector<double> best_params = net.snapshot_params();
  double best_val = -1.0;
  int epochs_since_best = 0;

  for (int epoch = 1; epoch <= options.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      net.zero_grads();
      for (std::size_t i = start; i < end; ++i) {
        const std::size_t item = order[i];
        // Per-item dropout stream, derived rather than shared, so results do
        // not depend on how the batch loop might be scheduled.
        Rng item_rng(derive_seed(options.seed, 0xd809, static_cast<std::uint64_t>(epoch), item));
        LayerContext ctx{true, &item_rng};
        Tensor probs = net.forward(train_x[item], ctx);
        loss_sum += Network::cross_entropy(probs, train_y[item]);
        net.backward_from_label(train_y[item]);
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (auto& layer : net.layers()) {
        auto g = layer->grads();
        for (double& v : g) v *= inv;
      }
      adam.step(net);
    }

    EpochMetrics metrics;
    metrics.epoch = epoch;
    metrics.train_loss = loss_sum / static_cast<double>(train_x.size());
    metrics.train_accuracy = accuracy(net, train_x, train_y);
    metrics.val_accuracy = accuracy(net, val_x, val_y);
    result.history.push_back(metrics);
    if (on_epoch) on_epoch(metrics);

    const double score = val_x.empty() ? metrics.train_accuracy : metrics.val_accuracy;
    if (score > best_val) {
      best_val = score;
      best_params = net.snapshot_params();
      result.best_epoch = epoch;
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
      if (options.patience > 0 && epochs_since_best >= options.patience) {
        result.early_stopped = true;
        break;
      }
    }
  }

  net.restore_params(best_params);
  result.best_val_accuracy = val_x.empty() ? 0.0 : best_val;
  return result;
}

}  // namespace freqprint
