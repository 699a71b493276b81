#pragma once

#include <cstdint>
#include <vector>

#include "ruleclip/nn/network.hpp"

namespace ruleclip::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

struct OptimizerState {
  AdamConfig config;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step = 0;

  OptimizerState() = default;
  OptimizerState(const Network& net, AdamConfig cfg)
      : config(cfg), first_moment(net.parameter_count(), 0.0), second_moment(net.parameter_count(), 0.0) {}

  friend bool operator==(const OptimizerState&, const OptimizerState&) = default;
};

// One bias-corrected Adam descent step on the loss whose gradient is grads.
// Throws NumericError (and leaves net untouched) if any gradient is not finite.
void apply_update(Network& net, const GradientBuffer& grads, OptimizerState& opt);

}  // namespace ruleclip::nn
