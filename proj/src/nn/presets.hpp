#pragma once

#include "nn/network.hpp"

namespace freqprint {

// Workload-fingerprinting CNN for native (bare runtime) traces: three conv
// layers [16, 32, 64], two pools, two dropouts, dense head [128, 64, classes].
Network make_native_network(std::size_t input_length, std::size_t num_classes);

// Sandboxed-runtime variant: one extra conv layer before the first pool,
// conv stack [16, 32, 64, 64].
Network make_sandbox_network(std::size_t input_length, std::size_t num_classes);

Network make_preset_network(const std::string& preset, std::size_t input_length,
                            std::size_t num_classes);

}  // namespace freqprint
