#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "doctest.h"
#include "nn/network.hpp"
#include "nn/train.hpp"
#include "support/checks.hpp"
#include "support/tmpdir.hpp"

using freqprint::Conv1D;
using freqprint::Dense;
using freqprint::Dropout;
using freqprint::Errc;
using freqprint::LayerContext;
using freqprint::MaxPool1D;
using freqprint::Network;
using freqprint::ReLU;
using freqprint::Rng;
using freqprint::Softmax;
using freqprint::Tensor;
using freqprint::TrainOptions;
using freqprint::TrainResult;
using testsupport::thrown_code;

namespace {

Network identity_dense_net() {
  Network net(1, 2, 2);
  auto dense = std::make_unique<Dense>(2, 2);
  auto p = dense->params();
  p[0] = 1.0;  // unit 0 reads feature 0
  p[1] = 0.0;
  p[2] = 0.0;
  p[3] = 1.0;  // unit 1 reads feature 1
  net.add(std::move(dense));
  net.add(std::make_unique<Softmax>());
  return net;
}

// Two linearly separable classes on an 8-sample input.
void toy_data(std::vector<Tensor>& xs, std::vector<int>& ys, std::size_t per_class,
              std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (std::size_t i = 0; i < per_class; ++i) {
    for (int cls : {0, 1}) {
      Tensor x(1, 8);
      for (double& v : x.data) v = (cls == 0 ? 1.0 : -1.0) + noise(rng);
      xs.push_back(std::move(x));
      ys.push_back(cls);
    }
  }
}

Network toy_net(std::uint64_t init_seed) {
  Network net(1, 8, 2);
  net.add(std::make_unique<Dense>(8, 2));
  net.add(std::make_unique<Softmax>());
  net.init_params(init_seed);
  return net;
}

Network all_layers_net() {
  Network net(1, 16, 3);
  net.add(std::make_unique<Conv1D>(1, 4));
  net.add(std::make_unique<ReLU>());
  net.add(std::make_unique<MaxPool1D>());
  net.add(std::make_unique<Dropout>(0.5));
  net.add(std::make_unique<Dense>(4 * 8, 3));
  net.add(std::make_unique<Softmax>());
  return net;
}

}  // namespace

TEST_CASE("network constructor validates the shape") {
  CHECK_EQ(thrown_code([] { Network(0, 4, 2); }), Errc::invalid_argument);
  CHECK_EQ(thrown_code([] { Network(1, 0, 2); }), Errc::invalid_argument);
  CHECK_EQ(thrown_code([] { Network(1, 4, 1); }), Errc::invalid_argument);
}

TEST_CASE("forward checks shapes and predict takes the argmax") {
  Network net = identity_dense_net();
  Tensor x(1, 2);
  x.data = {2.0, 0.0};
  Tensor probs = net.forward_eval(x);
  const double e2 = std::exp(2.0);
  CHECK_EQ(probs.data[0], doctest::Approx(e2 / (e2 + 1.0)));
  CHECK_EQ(probs.data[1], doctest::Approx(1.0 / (e2 + 1.0)));
  CHECK_EQ(net.predict(x), 0);
  x.data = {-1.0, 3.0};
  CHECK_EQ(net.predict(x), 1);

  Tensor bad(1, 3);
  CHECK_EQ(thrown_code([&] { net.forward_eval(bad); }), Errc::shape_error);
  Network empty(1, 2, 2);
  CHECK_EQ(thrown_code([&] { empty.forward_eval(x); }), Errc::state_error);
}

TEST_CASE("losses are consistent between probabilities and logits") {
  Tensor logits(1, 3);
  logits.data = {0.2, -1.0, 2.5};
  Network net(1, 3, 3);
  net.add(std::make_unique<Softmax>());
  Tensor probs = net.forward_eval(logits);
  for (int y = 0; y < 3; ++y) {
    CHECK_EQ(Network::loss_from_logits(logits, y),
             doctest::Approx(Network::cross_entropy(probs, y)).epsilon(1e-12));
  }
  CHECK_EQ(thrown_code([&] { Network::cross_entropy(probs, 3); }), Errc::invalid_argument);
  CHECK_EQ(thrown_code([&] { Network::loss_from_logits(logits, -1); }), Errc::invalid_argument);
}

TEST_CASE("fused backward reproduces the closed-form dense gradient") {
  Network net(1, 3, 2);
  auto dense = std::make_unique<Dense>(3, 2);
  Rng rng(4);
  dense->init(rng);
  Dense* dense_ptr = dense.get();
  net.add(std::move(dense));
  net.add(std::make_unique<Softmax>());

  Tensor x(1, 3);
  x.data = {0.5, -1.5, 2.0};
  Tensor probs = net.forward_eval(x);
  net.zero_grads();
  net.backward_from_label(1);

  auto grads = dense_ptr->grads();
  for (std::size_t u = 0; u < 2; ++u) {
    const double delta = probs.data[u] - (u == 1 ? 1.0 : 0.0);
    for (std::size_t v = 0; v < 3; ++v)
      CHECK_EQ(grads[u * 3 + v], doctest::Approx(delta * x.data[v]).epsilon(1e-12));
    CHECK_EQ(grads[2 * 3 + u], doctest::Approx(delta).epsilon(1e-12));
  }

  CHECK_EQ(thrown_code([&] { net.backward_from_label(5); }), Errc::invalid_argument);
  Network no_softmax(1, 3, 2);
  no_softmax.add(std::make_unique<Dense>(3, 2));
  CHECK_EQ(thrown_code([&] { no_softmax.backward_from_label(0); }), Errc::state_error);
}

TEST_CASE("param bookkeeping: count, snapshot, restore, zero") {
  Network net = all_layers_net();
  net.init_params(3);
  // conv 4*1*3+4, dense 32*3+3
  CHECK_EQ(net.param_count(), 16 + 99);
  auto snapshot = net.snapshot_params();
  CHECK_EQ(snapshot.size(), net.param_count());

  Network other = all_layers_net();
  other.restore_params(snapshot);
  CHECK_EQ(other.snapshot_params(), snapshot);
  CHECK_EQ(thrown_code([&] { other.restore_params(std::vector<double>(3)); }),
           Errc::shape_error);
}

TEST_CASE("training learns a separable toy problem deterministically") {
  std::vector<Tensor> xs;
  std::vector<int> ys;
  toy_data(xs, ys, 16, 99);

  TrainOptions opt;
  opt.learning_rate = 0.05;
  opt.batch_size = 8;
  opt.max_epochs = 40;
  opt.patience = 0;
  opt.seed = 1;

  Network net = toy_net(7);
  TrainResult result = train(net, xs, ys, xs, ys, opt);
  CHECK_EQ(result.history.size(), 40);
  CHECK_EQ(result.history.back().train_accuracy, 1.0);
  CHECK_EQ(result.best_val_accuracy, 1.0);
  CHECK_EQ(accuracy(net, xs, ys), 1.0);

  // bit-for-bit repeatable
  Network net2 = toy_net(7);
  TrainResult result2 = train(net2, xs, ys, xs, ys, opt);
  REQUIRE_EQ(result2.history.size(), result.history.size());
  for (std::size_t e = 0; e < result.history.size(); ++e) {
    CHECK_EQ(result2.history[e].train_loss, result.history[e].train_loss);
    CHECK_EQ(result2.history[e].val_accuracy, result.history[e].val_accuracy);
  }
  CHECK_EQ(net2.snapshot_params(), net.snapshot_params());

  // a different shuffle seed takes a different path
  Network net3 = toy_net(7);
  TrainOptions opt3 = opt;
  opt3.seed = 2;
  TrainResult result3 = train(net3, xs, ys, xs, ys, opt3);
  CHECK_NE(result3.history.front().train_loss, result.history.front().train_loss);
}

TEST_CASE("early stopping halts after patience epochs without improvement") {
  std::vector<Tensor> xs;
  std::vector<int> ys;
  toy_data(xs, ys, 12, 5);

  TrainOptions opt;
  opt.learning_rate = 0.05;
  opt.batch_size = 8;
  opt.max_epochs = 100;
  opt.patience = 3;
  opt.seed = 4;

  Network net = toy_net(2);
  TrainResult result = train(net, xs, ys, xs, ys, opt);
  CHECK(result.early_stopped);
  CHECK_LT(result.history.size(), 100);
  // stopped exactly patience epochs after the best one
  CHECK_EQ(result.history.size(), std::size_t(result.best_epoch) + 3);
  // restored parameters reproduce the reported best accuracy
  CHECK_EQ(accuracy(net, xs, ys), result.best_val_accuracy);
}

TEST_CASE("empty validation set falls back to the training score") {
  std::vector<Tensor> xs;
  std::vector<int> ys;
  toy_data(xs, ys, 8, 3);

  TrainOptions opt;
  opt.learning_rate = 0.05;
  opt.batch_size = 4;
  opt.max_epochs = 30;
  opt.patience = 5;
  opt.seed = 9;

  Network net = toy_net(1);
  TrainResult result = train(net, xs, ys, {}, {}, opt);
  CHECK_EQ(result.best_val_accuracy, 0.0);
  for (const auto& m : result.history) CHECK_EQ(m.val_accuracy, 0.0);
  CHECK_EQ(accuracy(net, xs, ys), 1.0);
}

TEST_CASE("training validates its inputs") {
  std::vector<Tensor> xs;
  std::vector<int> ys;
  toy_data(xs, ys, 4, 1);
  Network net = toy_net(0);
  TrainOptions opt;

  CHECK_EQ(thrown_code([&] { train(net, {}, {}, {}, {}, opt); }), Errc::invalid_argument);

  std::vector<int> bad_labels = ys;
  bad_labels[0] = 2;
  CHECK_EQ(thrown_code([&] { train(net, xs, bad_labels, {}, {}, opt); }),
           Errc::invalid_argument);

  std::vector<Tensor> bad_shape = xs;
  bad_shape[0] = Tensor(1, 7);
  CHECK_EQ(thrown_code([&] { train(net, bad_shape, ys, {}, {}, opt); }), Errc::shape_error);

  TrainOptions zero_batch;
  zero_batch.batch_size = 0;
  CHECK_EQ(thrown_code([&] { train(net, xs, ys, {}, {}, zero_batch); }),
           Errc::invalid_argument);

  std::vector<int> short_labels(ys.begin(), ys.end() - 1);
  CHECK_EQ(thrown_code([&] { train(net, xs, short_labels, {}, {}, opt); }),
           Errc::invalid_argument);
}

TEST_CASE("model bytes round-trip exactly") {
  Network net = all_layers_net();
  net.init_params(11);
  net.meta()["labels"] = "a\tb\tc";
  net.meta()["pipeline.truncate_len"] = "16";

  auto bytes = net.to_bytes();
  REQUIRE_GE(bytes.size(), 4);
  CHECK_EQ(bytes[0], 'F');
  CHECK_EQ(bytes[1], 'P');
  CHECK_EQ(bytes[2], 'N');
  CHECK_EQ(bytes[3], 'N');

  Network back = Network::from_bytes(bytes.data(), bytes.size());
  CHECK_EQ(back.input_channels(), 1);
  CHECK_EQ(back.input_length(), 16);
  CHECK_EQ(back.num_classes(), 3);
  CHECK_EQ(back.meta().at("labels"), "a\tb\tc");
  CHECK_EQ(back.meta().at("pipeline.truncate_len"), "16");
  CHECK_EQ(back.to_bytes(), bytes);
  CHECK_EQ(back.snapshot_params(), net.snapshot_params());

  Rng rng(31);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Tensor x(1, 16);
  for (double& v : x.data) v = dist(rng);
  CHECK_EQ(back.forward_eval(x).data, net.forward_eval(x).data);
}

TEST_CASE("model files round-trip and reload identically") {
  testsupport::TempDir dir;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    Network net = all_layers_net();
    net.init_params(seed);
    auto path = dir / ("model_" + std::to_string(seed) + ".fpnn");
    net.save(path);
    Network back = Network::load(path);
    CHECK_EQ(back.to_bytes(), net.to_bytes());
  }
  CHECK_EQ(thrown_code([&] { Network::load(dir / "missing.fpnn"); }), Errc::io_error);
}

TEST_CASE("model parser rejects corrupted bytes") {
  Network net = all_layers_net();
  net.init_params(1);
  auto bytes = net.to_bytes();

  auto code_of = [](std::vector<std::uint8_t> data) {
    return thrown_code([&] { Network::from_bytes(data.data(), data.size()); });
  };

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_EQ(code_of(bad_magic), Errc::format_error);

  auto bad_version = bytes;
  bad_version[4] = 9;
  CHECK_EQ(code_of(bad_version), Errc::format_error);

  auto truncated = bytes;
  truncated.resize(truncated.size() / 2);
  CHECK_EQ(code_of(truncated), Errc::format_error);

  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_EQ(code_of(trailing), Errc::format_error);

  CHECK_EQ(code_of({}), Errc::format_error);
}

TEST_CASE("describe lists the stack") {
  Network net = all_layers_net();
  std::string text = net.describe();
  CHECK(text.find("conv1d(1->4") != std::string::npos);
  CHECK(text.find("maxpool2") != std::string::npos);
  CHECK(text.find("dropout(0.50)") != std::string::npos);
  CHECK(text.find("dense(32->3)") != std::string::npos);
  CHECK(text.find("softmax") != std::string::npos);
}
