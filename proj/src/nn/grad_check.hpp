#pragma once

#include "nn/network.hpp"

namespace freqprint {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t n_params = 0;
};

// Central-difference check of every parameter's analytic gradient at
// loss = cross-entropy(softmax(logits), label), dropout in eval mode.
// Relative error per parameter: |g_a - g_n| / max(|g_a|, |g_n|, 1e-8).
//
// gradient_check evaluates each perturbed loss through delta propagation over
// the cached forward activations with the ReLU masks and pooling argmax
// frozen at the clean forward. That checks backward against the exact
// piecewise-linear branch it differentiates, keeps the error budget at the
// smooth softmax term alone, and makes whole-preset checks feasible; a
// perturbation that flips a max decision would otherwise put an O(1) kink
// error on a correct gradient. gradient_check_exact re-runs a true full
// forward per perturbation (branches may switch) and serves as the reference
// for small networks, where a kink crossing within epsilon is improbable.
// Both leave the network parameters unchanged.
GradCheckResult gradient_check(Network& net, const Tensor& input, int label,
                               double epsilon = 1e-4);
GradCheckResult gradient_check_exact(Network& net, const Tensor& input, int label,
                                     double epsilon = 1e-4);

}  // namespace freqprint
