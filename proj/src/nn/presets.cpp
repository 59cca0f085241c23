#include "nn/presets.hpp"

#include "core/error.hpp"

namespace freqprint {

namespace {

constexpr std::size_t kMinInputLength = 64;

Network build(std::size_t input_length, std::size_t num_classes, bool sandbox) {
  if (input_length < kMinInputLength)
    raise(Errc::invalid_argument, "preset networks need input_length >= " +
                                      std::to_string(kMinInputLength) + ", got " +
                                      std::to_string(input_length));
  if (num_classes < 2) raise(Errc::invalid_argument, "preset networks need at least 2 classes");

  Network net(1, input_length, num_classes);
  net.add(std::make_unique<Conv1D>(1, 16));
  net.add(std::make_unique<ReLU>());
  net.add(std::make_unique<Conv1D>(16, 32));
  net.add(std::make_unique<ReLU>());
  std::size_t channels = 32;
  if (sandbox) {
    net.add(std::make_unique<Conv1D>(32, 64));
    net.add(std::make_unique<ReLU>());
    channels = 64;
  }
  net.add(std::make_unique<MaxPool1D>());
  net.add(std::make_unique<Dropout>(0.5));
  net.add(std::make_unique<Conv1D>(channels, 64));
  net.add(std::make_unique<ReLU>());
  net.add(std::make_unique<MaxPool1D>());
  net.add(std::make_unique<Dropout>(0.5));
  const std::size_t flat = 64 * (input_length / 2 / 2);
  net.add(std::make_unique<Dense>(flat, 128));
  net.add(std::make_unique<ReLU>());
  net.add(std::make_unique<Dense>(128, 64));
  net.add(std::make_unique<ReLU>());
  net.add(std::make_unique<Dense>(64, num_classes));
  net.add(std::make_unique<Softmax>());
  net.meta()["preset"] = sandbox ? "sandbox" : "native";
  return net;
}

}  // namespace

Network make_native_network(std::size_t input_length, std::size_t num_classes) {
  return build(input_length, num_classes, false);
}

Network make_sandbox_network(std::size_t input_length, std::size_t num_classes) {
  return build(input_length, num_classes, true);
}

Network make_preset_network(const std::string& preset, std::size_t input_length,
                            std::size_t num_classes) {
  if (preset == "native") return make_native_network(input_length, num_classes);
  if (preset == "sandbox") return make_sandbox_network(input_length, num_classes);
  raise(Errc::invalid_argument, "unknown preset '" + preset + "' (want native or sandbox)");
}

}  // namespace freqprint
