#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "ruleclip/agents/config.hpp"
#include "ruleclip/agents/replay_buffer.hpp"
#include "ruleclip/nn/network.hpp"
#include "ruleclip/nn/optimizer.hpp"
#include "ruleclip/rules/rules.hpp"

namespace ruleclip::agents {

struct ActionChoice {
  std::vector<double> applied;
  std::vector<double> raw;
  rules::ActionBounds bounds;
  bool saturated = false;  // any component clipped
};

struct CriticUpdateResult {
  double loss1 = 0.0;
  double loss2 = 0.0;
  std::vector<double> targets;  // TD target per batch column
  nn::Matrix next_actions;      // smoothed target-policy actions used in the targets
};

struct ActorGradient {
  nn::GradientBuffer gradient;  // of the actor loss (to be minimised)
  double loss = 0.0;            // -mean Q + mean penalty
  double penalty = 0.0;         // mean of lambda/2 * |pi(s) - clip(pi(s))|^2
  double saturation_fraction = 0.0;
  nn::Matrix policy_actions;    // pi(s) for the batch
};

struct TrainStepResult {
  CriticUpdateResult critic;
  bool actor_updated = false;
  ActorGradient actor;
};

// r - lambda/2 * |raw - applied|^2
double shaped_reward(double reward, std::span<const double> raw, std::span<const double> applied, double lambda);

// TD3 learner. The variant decides which bounds clip the actions (global box
// for classical, the rule's box otherwise), which actor gradient is used, and
// whether rewards are shaped before they reach the buffer (see learning_reward).
class Agent {
 public:
  Agent(AgentConfig cfg, std::size_t observation_width, rules::ActionSpace space, std::uint64_t seed);

  const AgentConfig& config() const noexcept { return cfg_; }
  const rules::ActionSpace& action_space() const noexcept { return space_; }
  std::size_t observation_width() const noexcept { return observation_width_; }
  bool uses_rule() const noexcept { return cfg_.variant != Variant::classical; }

  // Deterministic policy output pi(s), inside (-1, 1) by the tanh head.
  std::vector<double> policy(std::span<const double> observation) const;

  // Bounds the variant enforces in a state with the given rule context.
  rules::ActionBounds bounds_for(std::span<const double> rule_context, const rules::RuleProvider& rule) const;

  // raw = pi(s) + N(0, sigma), applied = clip(raw, bounds). sigma = 0 gives
  // the test-time policy and draws no random numbers.
  ActionChoice select_action(std::span<const double> observation, std::span<const double> rule_context,
                             double sigma, const rules::RuleProvider& rule);

  // Noise-free action with the variant's bounds enforced (test-time policy).
  ActionChoice greedy_action(std::span<const double> observation, std::span<const double> rule_context,
                             const rules::RuleProvider& rule) const;

  // Warm-up exploration: raw uniform over the action space, then clipped.
  ActionChoice random_action(std::span<const double> rule_context, const rules::RuleProvider& rule);

  // Reward stored for learning: shaped for RS, unchanged otherwise.
  double learning_reward(double env_reward, const ActionChoice& choice) const;

  // TD3 targets y = r + gamma * (1 - done) * min(Q1', Q2')(s', smoothed pi'(s')).
  // Draws the smoothing noise from the agent's generator.
  std::vector<double> td_targets(const Batch& batch, nn::Matrix* next_actions = nullptr);

  // Gradient of mean (Q_i(s, a) - y)^2 for critic 1 or 2; returns the loss too.
  nn::GradientBuffer critic_gradient(const Batch& batch, std::span<const double> targets, int which,
                                     double* loss = nullptr) const;

  // Computes the targets, then both critics take one Adam step.
  CriticUpdateResult critic_update(const Batch& batch);

  ActorGradient actor_gradient_classical(const Batch& batch) const;
  ActorGradient actor_gradient_ea(const Batch& batch) const;
  // Classical for classical/RS, EA otherwise.
  ActorGradient actor_gradient(const Batch& batch) const;

  ActorGradient actor_update_classical(const Batch& batch);
  ActorGradient actor_update_ea(const Batch& batch);
  ActorGradient actor_update(const Batch& batch);

  void update_targets();

  using CriticObserver = std::function<void(const Agent&, const Batch&, const CriticUpdateResult&)>;

  // Samples a batch, updates the critics, and every policy_delay calls the
  // actor and the target networks. observer (if set) runs right after the
  // critic step, while the target networks still hold the values used for
  // the TD targets.
  TrainStepResult train_step(const ReplayBuffer& buffer, const CriticObserver& observer = {});

  const nn::Network& actor() const noexcept { return actor_; }
  const nn::Network& critic1() const noexcept { return critic1_; }
  const nn::Network& critic2() const noexcept { return critic2_; }
  const nn::Network& target_actor() const noexcept { return target_actor_; }
  const nn::Network& target_critic1() const noexcept { return target_critic1_; }
  const nn::Network& target_critic2() const noexcept { return target_critic2_; }
  nn::Network& mutable_actor() noexcept { return actor_; }
  nn::Network& mutable_critic1() noexcept { return critic1_; }
  nn::Network& mutable_critic2() noexcept { return critic2_; }
  nn::Network& mutable_target_actor() noexcept { return target_actor_; }
  nn::Network& mutable_target_critic1() noexcept { return target_critic1_; }
  nn::Network& mutable_target_critic2() noexcept { return target_critic2_; }
  nn::OptimizerState& actor_optimizer() noexcept { return actor_opt_; }
  nn::OptimizerState& critic1_optimizer() noexcept { return critic1_opt_; }
  nn::OptimizerState& critic2_optimizer() noexcept { return critic2_opt_; }
  const nn::OptimizerState& actor_optimizer() const noexcept { return actor_opt_; }
  const nn::OptimizerState& critic1_optimizer() const noexcept { return critic1_opt_; }
  const nn::OptimizerState& critic2_optimizer() const noexcept { return critic2_opt_; }
  std::mt19937_64& rng() noexcept { return rng_; }
  const std::mt19937_64& rng() const noexcept { return rng_; }
  std::uint64_t critic_updates() const noexcept { return critic_updates_; }
  std::uint64_t actor_updates() const noexcept { return actor_updates_; }
  void set_counters(std::uint64_t critic_updates, std::uint64_t actor_updates) {
    critic_updates_ = critic_updates;
    actor_updates_ = actor_updates;
  }

  friend bool operator==(const Agent&, const Agent&);

 private:
  ActorGradient actor_gradient_impl(const Batch& batch, bool penalise) const;
  ActorGradient apply_actor(ActorGradient g);

  AgentConfig cfg_;
  std::size_t observation_width_;
  rules::ActionSpace space_;
  nn::Network actor_, critic1_, critic2_;
  nn::Network target_actor_, target_critic1_, target_critic2_;
  nn::OptimizerState actor_opt_, critic1_opt_, critic2_opt_;
  std::mt19937_64 rng_;
  std::uint64_t critic_updates_ = 0;
  std::uint64_t actor_updates_ = 0;
};

// Stacks states (obs x B) over actions (act x B) into critic inputs.
nn::Matrix stack_rows(const nn::Matrix& top, const nn::Matrix& bottom);

}  // namespace ruleclip::agents
