#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ruleclip::agents {

enum class Variant { classical, ea, rs };

const char* to_string(Variant v);
Variant parse_variant(const std::string& name);

struct AgentConfig {
  Variant variant = Variant::classical;
  double gamma = 0.99;
  double sigma = 0.1;             // exploration noise std, action units
  double lambda = 0.0;            // saturation penalty weight (EA: actor, RS: reward)
  double tau = 0.005;             // Polyak rate for all target networks
  std::size_t policy_delay = 2;   // critic updates per actor update
  double target_noise_std = 0.2;  // target policy smoothing
  double target_noise_clip = 0.5;
  std::size_t batch_size = 256;
  std::size_t buffer_capacity = 1'000'000;
  double actor_learning_rate = 1e-4;
  double critic_learning_rate = 1e-3;
  std::vector<std::size_t> actor_hidden{64, 64};
  std::vector<std::size_t> critic_hidden{64, 64};

  // Throws ConfigError naming the offending "agent.*" key.
  void validate() const;

  // Penalty weights used unless overridden: 100 for EA, 10 for RS, 0 otherwise.
  static double default_lambda(Variant v);
};

}  // namespace ruleclip::agents
