#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nn/network.hpp"

namespace freqprint {

struct TrainOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t batch_size = 32;
  int max_epochs = 100;
  int patience = 10;  // <= 0 disables early stopping
  std::uint64_t seed = 0;
};

struct EpochMetrics {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  std::vector<EpochMetrics> history;
  int best_epoch = 0;  // epoch whose weights the network now holds
  double best_val_accuracy = 0.0;
  bool early_stopped = false;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

// Mini-batch Adam over shuffled training items. Tracks validation accuracy,
// stops after `patience` epochs without improvement, and leaves the network
// holding the best-validation weights. Fully deterministic for a fixed seed.
// With an empty validation set, training accuracy is tracked instead.
TrainResult train(Network& net, const std::vector<Tensor>& train_x,
                  const std::vector<int>& train_y, const std::vector<Tensor>& val_x,
                  const std::vector<int>& val_y, const TrainOptions& options,
                  const EpochCallback& on_epoch = nullptr);

double accuracy(Network& net, const std::vector<Tensor>& xs, const std::vector<int>& ys);

}  // namespace freqprint
