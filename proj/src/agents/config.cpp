#include "ruleclip/agents/config.hpp"

#include <cmath>

#include "ruleclip/error.hpp"

namespace ruleclip::agents {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::classical: return "classical";
    case Variant::ea: return "ea";
    case Variant::rs: return "rs";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  if (name == "classical") return Variant::classical;
  if (name == "ea") return Variant::ea;
  if (name == "rs") return Variant::rs;
  throw ConfigError("agent.variant", "expected one of classical, ea, rs; got '" + name + "'");
}

void AgentConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("agent.gamma", "must lie in (0, 1)");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("agent.sigma", "must be >= 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("agent.lambda", "must be >= 0");
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("agent.tau", "must lie in [0, 1]");
  if (policy_delay == 0) throw ConfigError("agent.policy_delay", "must be positive");
  if (!(target_noise_std >= 0.0)) throw ConfigError("agent.target_noise_std", "must be >= 0");
  if (!(target_noise_clip >= 0.0)) throw ConfigError("agent.target_noise_clip", "must be >= 0");
  if (batch_size == 0) throw ConfigError("agent.batch_size", "must be positive");
  if (buffer_capacity < batch_size) throw ConfigError("agent.buffer_capacity", "must be >= agent.batch_size");
  if (!(actor_learning_rate > 0.0)) throw ConfigError("agent.actor_lr", "must be positive");
  if (!(critic_learning_rate > 0.0)) throw ConfigError("agent.critic_lr", "must be positive");
  for (auto w : actor_hidden)
    if (w == 0) throw ConfigError("agent.actor_hidden", "widths must be positive");
  for (auto w : critic_hidden)
    if (w == 0) throw ConfigError("agent.critic_hidden", "widths must be positive");
}

double AgentConfig::default_lambda(Variant v) {
  switch (v) {
    case Variant::ea: return 100.0;
    case Variant::rs: return 10.0;
    case Variant::classical: return 0.0;
  }
  return 0.0;
}

}  // namespace ruleclip::agents
