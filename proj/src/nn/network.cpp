#include "nn/network.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "core/error.hpp"
#include "core/text.hpp"

static_assert(std::endian::native == std::endian::little,
              "model serialization assumes a little-endian host");

namespace freqprint {

Network::Network(std::size_t input_channels, std::size_t input_length, std::size_t num_classes)
    : input_channels_(input_channels), input_length_(input_length), num_classes_(num_classes) {
  if (input_channels == 0 || input_length == 0)
    raise(Errc::invalid_argument, "network input shape must be positive");
  if (num_classes < 2) raise(Errc::invalid_argument, "network needs at least 2 classes");
}

void Network::add(std::unique_ptr<Layer> layer) {
  if (!layer) raise(Errc::invalid_argument, "null layer");
  layers_.push_back(std::move(layer));
}

void Network::init_params(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x1217));
  for (auto& layer : layers_) layer->init(rng);
}

Tensor Network::forward(const Tensor& input, LayerContext& ctx) {
  if (input.channels != input_channels_ || input.length != input_length_)
    raise(Errc::shape_error, "input is " + std::to_string(input.channels) + "x" +
                                 std::to_string(input.length) + ", network expects " +
                                 std::to_string(input_channels_) + "x" +
                                 std::to_string(input_length_));
  if (layers_.empty()) raise(Errc::state_error, "network has no layers");
  Tensor current = input;
  for (auto& layer : layers_) current = layer->forward(current, ctx);
  return current;
}

Tensor Network::forward_eval(const Tensor& input) {
  LayerContext ctx;
  return forward(input, ctx);
}

int Network::predict(const Tensor& input) {
  Tensor probs = forward_eval(input);
  return static_cast<int>(
      std::max_element(probs.data.begin(), probs.data.end()) - probs.data.begin());
}

void Network::backward_from_label(int label) {
  if (layers_.empty() || layers_.back()->kind() != LayerKind::softmax)
    raise(Errc::state_error, "fused backward needs a softmax output layer");
  auto* softmax = static_cast<Softmax*>(layers_.back().get());
  const Tensor& probs = softmax->cached_probs();
  if (probs.size() != num_classes_)
    raise(Errc::state_error, "backward without a prior forward");
  if (label < 0 || static_cast<std::size_t>(label) >= num_classes_)
    raise(Errc::invalid_argument, "label out of range");
  Tensor grad = probs;
  grad.data[static_cast<std::size_t>(label)] -= 1.0;
  for (std::size_t i = layers_.size() - 1; i-- > 0;) grad = layers_[i]->backward(grad);
}

void Network::zero_grads() {
  for (auto& layer : layers_) {
    auto g = layer->grads();
    std::fill(g.begin(), g.end(), 0.0);
  }
}

double Network::cross_entropy(const Tensor& probs, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= probs.size())
    raise(Errc::invalid_argument, "label out of range");
  return -std::log(std::max(probs.data[static_cast<std::size_t>(label)], 1e-12));
}

double Network::loss_from_logits(const Tensor& logits, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= logits.size())
    raise(Errc::invalid_argument, "label out of range");
  const double zmax = *std::max_element(logits.data.begin(), logits.data.end());
  double sum = 0.0;
  for (double z : logits.data) sum += std::exp(z - zmax);
  return zmax + std::log(sum) - logits.data[static_cast<std::size_t>(label)];
}

std::size_t Network::param_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer->params().size();
  return n;
}

std::vector<double> Network::snapshot_params() const {
  std::vector<double> out;
  out.reserve(param_count());
  for (const auto& layer : layers_) {
    auto p = layer->params();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

void Network::restore_params(const std::vector<double>& snapshot) {
  if (snapshot.size() != param_count())
    raise(Errc::shape_error, "parameter snapshot size mismatch");
  std::size_t offset = 0;
  for (auto& layer : layers_) {
    auto p = layer->params();
    std::copy_n(snapshot.begin() + static_cast<std::ptrdiff_t>(offset), p.size(), p.begin());
    offset += p.size();
  }
}

std::string Network::describe() const {
  std::string out = "input " + std::to_string(input_channels_) + "x" +
                    std::to_string(input_length_) + ", " + std::to_string(num_classes_) +
                    " classes\n";
  for (const auto& layer : layers_) out += "  " + layer->describe() + "\n";
  out += "parameters: " + std::to_string(param_count()) + "\n";
  return out;
}

namespace {

constexpr char kMagic[4] = {'F', 'P', 'N', 'N'};
constexpr std::uint32_t kVersion = 1;

void push_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(v));
}

void push_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(v));
}

void push_string(std::vector<std::uint8_t>& out, const std::string& s) {
  push_u32(out, static_cast<std::uint32_t>(s.size()));
  out.insert(out.end(), s.begin(), s.end());
}

struct Reader {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > size) raise(Errc::format_error, "model file truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v;
    std::memcpy(&v, data + pos, 4);
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v;
    std::memcpy(&v, data + pos, 8);
    pos += 8;
    return v;
  }
  std::string str() {
    std::uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(data + pos), n);
    pos += n;
    return s;
  }
  void f64_block(double* out, std::size_t count) {
    need(count * sizeof(double));
    std::memcpy(out, data + pos, count * sizeof(double));
    pos += count * sizeof(double);
  }
};

std::unique_ptr<Layer> make_layer(LayerKind kind, const std::vector<std::uint64_t>& dims) {
  switch (kind) {
    case LayerKind::conv1d:
      if (dims.size() != 3 || dims[2] != Conv1D::kKernel)
        raise(Errc::format_error, "bad conv1d dims");
      return std::make_unique<Conv1D>(dims[1], dims[0]);
    case LayerKind::relu:
      if (!dims.empty()) raise(Errc::format_error, "bad relu dims");
      return std::make_unique<ReLU>();
    case LayerKind::maxpool1d:
      if (!dims.empty()) raise(Errc::format_error, "bad maxpool1d dims");
      return std::make_unique<MaxPool1D>();
    case LayerKind::dropout:
      if (dims.size() != 1) raise(Errc::format_error, "bad dropout dims");
      return std::make_unique<Dropout>(static_cast<double>(dims[0]) / 1e6);
    case LayerKind::dense:
      if (dims.size() != 2) raise(Errc::format_error, "bad dense dims");
      return std::make_unique<Dense>(dims[1], dims[0]);
    case LayerKind::softmax:
      if (!dims.empty()) raise(Errc::format_error, "bad softmax dims");
      return std::make_unique<Softmax>();
  }
  raise(Errc::format_error, "unknown layer kind");
}

}  // namespace

std::vector<std::uint8_t> Network::to_bytes() const {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  push_u32(out, kVersion);
  push_u32(out, static_cast<std::uint32_t>(num_classes_));
  push_u32(out, static_cast<std::uint32_t>(input_channels_));
  push_u32(out, static_cast<std::uint32_t>(input_length_));
  push_u32(out, static_cast<std::uint32_t>(meta_.size()));
  for (const auto& [key, value] : meta_) {
    push_string(out, key);
    push_string(out, value);
  }
  push_u32(out, static_cast<std::uint32_t>(layers_.size()));
  for (const auto& layer : layers_) {
    push_u32(out, static_cast<std::uint32_t>(layer->kind()));
    std::vector<std::uint64_t> dims = layer->dims();
    push_u32(out, static_cast<std::uint32_t>(dims.size()));
    for (std::uint64_t d : dims) push_u64(out, d);
  }
  for (const auto& layer : layers_) {
    auto p = layer->params();
    const auto* bytes = reinterpret_cast<const std::uint8_t*>(p.data());
    out.insert(out.end(), bytes, bytes + p.size() * sizeof(double));
  }
  return out;
}

Network Network::from_bytes(const std::uint8_t* data, std::size_t size) {
  Reader r{data, size};
  r.need(4);
  if (std::memcmp(r.data, kMagic, 4) != 0)
    raise(Errc::format_error, "not a model file (bad magic)");
  r.pos = 4;
  const std::uint32_t version = r.u32();
  if (version != kVersion)
    raise(Errc::format_error, "unsupported model version " + std::to_string(version));
  const std::uint32_t num_classes = r.u32();
  const std::uint32_t input_channels = r.u32();
  const std::uint32_t input_length = r.u32();
  Network net(input_channels, input_length, num_classes);
  const std::uint32_t meta_count = r.u32();
  for (std::uint32_t i = 0; i < meta_count; ++i) {
    std::string key = r.str();
    std::string value = r.str();
    net.meta_[std::move(key)] = std::move(value);
  }
  const std::uint32_t layer_count = r.u32();
  for (std::uint32_t i = 0; i < layer_count; ++i) {
    const std::uint32_t kind = r.u32();
    if (kind < 1 || kind > 6) raise(Errc::format_error, "unknown layer kind");
    const std::uint32_t ndim = r.u32();
    std::vector<std::uint64_t> dims(ndim);
    for (std::uint32_t d = 0; d < ndim; ++d) dims[d] = r.u64();
    net.add(make_layer(static_cast<LayerKind>(kind), dims));
  }
  for (auto& layer : net.layers_) {
    auto p = layer->params();
    if (!p.empty()) r.f64_block(p.data(), p.size());
  }
  if (r.pos != r.size) raise(Errc::format_error, "trailing bytes after model data");
  return net;
}

void Network::save(const std::filesystem::path& path) const {
  std::vector<std::uint8_t> bytes = to_bytes();
  atomic_write_file(path, std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

Network Network::load(const std::filesystem::path& path) {
  std::string bytes = read_file(path);
  return from_bytes(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size());
}

}  // namespace freqprint
