#pragma once

#include <cstddef>
#include <vector>

namespace freqprint {

// Channel-major 1D feature map: data[c * length + i]. Dense layers treat the
// whole buffer as a flat feature vector.
struct Tensor {
  std::size_t channels = 0;
  std::size_t length = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::size_t c, std::size_t l) : channels(c), length(l), data(c * l, 0.0) {}

  double& at(std::size_t c, std::size_t i) { return data[c * length + i]; }
  double at(std::size_t c, std::size_t i) const { return data[c * length + i]; }
  double* row(std::size_t c) { return data.data() + c * length; }
  const double* row(std::size_t c) const { return data.data() + c * length; }
  std::size_t size() const { return data.size(); }

  bool operator==(const Tensor&) const = default;
};

}  // namespace freqprint
