#include "ruleclip/agents/agent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ruleclip/error.hpp"

namespace ruleclip::agents {

using nn::Matrix;

double shaped_reward(double reward, std::span<const double> raw, std::span<const double> applied, double lambda) {
  if (raw.size() != applied.size()) throw UsageError("shaped_reward: dimension mismatch");
  double sq = 0.0;
  for (std::size_t k = 0; k < raw.size(); ++k) sq += (raw[k] - applied[k]) * (raw[k] - applied[k]);
  return reward - 0.5 * lambda * sq;
}

Matrix stack_rows(const Matrix& top, const Matrix& bottom) {
  if (top.cols() != bottom.cols()) throw UsageError("stack_rows: column mismatch");
  Matrix out(top.rows() + bottom.rows(), top.cols());
  std::copy(top.values().begin(), top.values().end(), out.data());
  std::copy(bottom.values().begin(), bottom.values().end(), out.data() + top.size());
  return out;
}

Agent::Agent(AgentConfig cfg, std::size_t observation_width, rules::ActionSpace space, std::uint64_t seed)
    : cfg_(std::move(cfg)), observation_width_(observation_width), space_(std::move(space)), rng_(seed) {
  cfg_.validate();
  if (observation_width_ == 0 || space_.dimension() == 0) throw UsageError("Agent: empty observation or action space");
  const std::size_t act = space_.dimension();
  actor_ = nn::Network::mlp(observation_width_, cfg_.actor_hidden, act, nn::Activation::relu, nn::Activation::tanh, rng_);
  critic1_ = nn::Network::mlp(observation_width_ + act, cfg_.critic_hidden, 1, nn::Activation::relu,
                              nn::Activation::identity, rng_);
  critic2_ = nn::Network::mlp(observation_width_ + act, cfg_.critic_hidden, 1, nn::Activation::relu,
                              nn::Activation::identity, rng_);
  target_actor_ = actor_;
  target_critic1_ = critic1_;
  target_critic2_ = critic2_;
  actor_opt_ = nn::OptimizerState(actor_, {.learning_rate = cfg_.actor_learning_rate});
  critic1_opt_ = nn::OptimizerState(critic1_, {.learning_rate = cfg_.critic_learning_rate});
  critic2_opt_ = nn::OptimizerState(critic2_, {.learning_rate = cfg_.critic_learning_rate});
}

std::vector<double> Agent::policy(std::span<const double> observation) const { return actor_.forward(observation); }

rules::ActionBounds Agent::bounds_for(std::span<const double> rule_context, const rules::RuleProvider& rule) const {
  if (!uses_rule()) return {space_.low, space_.up};
  auto b = rule.bounds(rule_context);
  if (!rules::bounds_ordered(b, space_)) throw UsageError("rule produced bounds outside the action space");
  return b;
}

namespace {

ActionChoice finish_choice(std::vector<double> raw, rules::ActionBounds bounds) {
  auto constrained = rules::constrain_action(raw, bounds);
  ActionChoice c;
  c.raw = std::move(raw);
  c.applied = std::move(constrained.applied);
  c.bounds = std::move(bounds);
  c.saturated = std::any_of(constrained.saturated.begin(), constrained.saturated.end(), [](bool s) { return s; });
  return c;
}

}  // namespace

ActionChoice Agent::select_action(std::span<const double> observation, std::span<const double> rule_context,
                                  double sigma, const rules::RuleProvider& rule) {
  if (!(sigma > 0.0)) return greedy_action(observation, rule_context, rule);
  auto raw = policy(observation);
  {
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& a : raw) a += noise(rng_);
  }
  return finish_choice(std::move(raw), bounds_for(rule_context, rule));
}

ActionChoice Agent::greedy_action(std::span<const double> observation, std::span<const double> rule_context,
                                  const rules::RuleProvider& rule) const {
  return finish_choice(policy(observation), bounds_for(rule_context, rule));
}

ActionChoice Agent::random_action(std::span<const double> rule_context, const rules::RuleProvider& rule) {
  std::vector<double> raw(space_.dimension());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    std::uniform_real_distribution<double> u(space_.low[k], space_.up[k]);
    raw[k] = u(rng_);
  }
  return finish_choice(std::move(raw), bounds_for(rule_context, rule));
}

double Agent::learning_reward(double env_reward, const ActionChoice& choice) const {
  if (cfg_.variant != Variant::rs) return env_reward;
  return shaped_reward(env_reward, choice.raw, choice.applied, cfg_.lambda);
}

std::vector<double> Agent::td_targets(const Batch& batch, Matrix* next_actions_out) {
  const std::size_t n = batch.size();
  if (n == 0) throw UsageError("critic_update: empty batch");
  // Target policy smoothing: clip(pi'(s') + clip(noise, -c, c), low, up).
  Matrix next_actions = target_actor_.forward(batch.next_states);
  for (std::size_t j = 0; j < next_actions.rows(); ++j)
    for (std::size_t k = 0; k < n; ++k) {
      double noise = 0.0;
      if (cfg_.target_noise_std > 0.0) {
        std::normal_distribution<double> dist(0.0, cfg_.target_noise_std);
        noise = std::clamp(dist(rng_), -cfg_.target_noise_clip, cfg_.target_noise_clip);
      }
      next_actions(j, k) = std::clamp(next_actions(j, k) + noise, space_.low[j], space_.up[j]);
    }
  const Matrix next_inputs = stack_rows(batch.next_states, next_actions);
  const Matrix q1_next = target_critic1_.forward(next_inputs);
  const Matrix q2_next = target_critic2_.forward(next_inputs);

  std::vector<double> targets(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double y = batch.done[k] ? batch.rewards[k]
                                   : batch.rewards[k] + cfg_.gamma * std::min(q1_next(0, k), q2_next(0, k));
    if (!std::isfinite(y)) throw NumericError("critic_update: non-finite TD target in batch column " + std::to_string(k));
    targets[k] = y;
  }
  if (next_actions_out) *next_actions_out = std::move(next_actions);
  return targets;
}

nn::GradientBuffer Agent::critic_gradient(const Batch& batch, std::span<const double> targets, int which,
                                          double* loss_out) const {
  const std::size_t n = batch.size();
  if (targets.size() != n) throw UsageError("critic_gradient: one target per batch column required");
  const nn::Network& critic = which == 1 ? critic1_ : critic2_;
  nn::ForwardTape tape;
  const Matrix q = critic.forward(stack_rows(batch.states, batch.actions), tape);
  Matrix cot(1, n);
  double loss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double diff = q(0, k) - targets[k];
    loss += diff * diff;
    cot(0, k) = 2.0 * diff / static_cast<double>(n);
  }
  if (loss_out) *loss_out = loss / static_cast<double>(n);
  return critic.backward(tape, cot).gradients;
}

CriticUpdateResult Agent::critic_update(const Batch& batch) {
  CriticUpdateResult result;
  result.targets = td_targets(batch, &result.next_actions);
  auto g1 = critic_gradient(batch, result.targets, 1, &result.loss1);
  auto g2 = critic_gradient(batch, result.targets, 2, &result.loss2);
  nn::apply_update(critic1_, g1, critic1_opt_);
  nn::apply_update(critic2_, g2, critic2_opt_);
  ++critic_updates_;
  return result;
}

ActorGradient Agent::actor_gradient_impl(const Batch& batch, bool penalise) const {
  const std::size_t n = batch.size();
  if (n == 0) throw UsageError("actor update: empty batch");
  const double inv_n = 1.0 / static_cast<double>(n);
  ActorGradient out;

  nn::ForwardTape actor_tape, critic_tape;
  out.policy_actions = actor_.forward(batch.states, actor_tape);
  const Matrix q = critic1_.forward(stack_rows(batch.states, out.policy_actions), critic_tape);

  // Ascend mean Q: loss = -mean Q, critic held fixed.
  const Matrix cot(1, n, -inv_n);
  const Matrix input_cot = critic1_.backward(critic_tape, cot, false).input_cotangent;
  const std::size_t act = out.policy_actions.rows();
  Matrix action_cot(act, n);
  for (std::size_t j = 0; j < act; ++j)
    for (std::size_t k = 0; k < n; ++k) action_cot(j, k) = input_cot(observation_width_ + j, k);

  double q_sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) q_sum += q(0, k);
  out.loss = -q_sum * inv_n;

  if (penalise) {
    // Pull pi(s) toward its own clipped value; the clipped target is held
    // constant, so the term vanishes wherever pi(s) already lies in C(s).
    std::size_t saturated = 0;
    double penalty = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      bool any = false;
      for (std::size_t j = 0; j < act; ++j) {
        const double pi = out.policy_actions(j, k);
        const double e = pi - rules::clip(pi, batch.bounds_min(j, k), batch.bounds_max(j, k));
        if (e != 0.0) {
          any = true;
          action_cot(j, k) += cfg_.lambda * e * inv_n;
          penalty += 0.5 * cfg_.lambda * e * e;
        }
      }
      if (any) ++saturated;
    }
    out.penalty = penalty * inv_n;
    out.saturation_fraction = static_cast<double>(saturated) * inv_n;
    out.loss += out.penalty;
  }

  out.gradient = actor_.backward(actor_tape, action_cot).gradients;
  return out;
}

ActorGradient Agent::actor_gradient_classical(const Batch& batch) const { return actor_gradient_impl(batch, false); }
ActorGradient Agent::actor_gradient_ea(const Batch& batch) const { return actor_gradient_impl(batch, true); }
ActorGradient Agent::actor_gradient(const Batch& batch) const {
  return actor_gradient_impl(batch, cfg_.variant == Variant::ea);
}

ActorGradient Agent::apply_actor(ActorGradient g) {
  nn::apply_update(actor_, g.gradient, actor_opt_);
  ++actor_updates_;
  return g;
}

ActorGradient Agent::actor_update_classical(const Batch& batch) { return apply_actor(actor_gradient_classical(batch)); }
ActorGradient Agent::actor_update_ea(const Batch& batch) { return apply_actor(actor_gradient_ea(batch)); }
ActorGradient Agent::actor_update(const Batch& batch) { return apply_actor(actor_gradient(batch)); }

void Agent::update_targets() {
  nn::polyak_update(target_actor_, actor_, cfg_.tau);
  nn::polyak_update(target_critic1_, critic1_, cfg_.tau);
  nn::polyak_update(target_critic2_, critic2_, cfg_.tau);
}

TrainStepResult Agent::train_step(const ReplayBuffer& buffer, const CriticObserver& observer) {
  const Batch batch = buffer.sample(rng_, cfg_.batch_size);
  TrainStepResult out;
  out.critic = critic_update(batch);
  if (observer) observer(*this, batch, out.critic);
  if (critic_updates_ % cfg_.policy_delay == 0) {
    out.actor = actor_update(batch);
    out.actor_updated = true;
    update_targets();
  }
  return out;
}

bool operator==(const Agent& a, const Agent& b) {
  return a.actor_ == b.actor_ && a.critic1_ == b.critic1_ && a.critic2_ == b.critic2_ &&
         a.target_actor_ == b.target_actor_ && a.target_critic1_ == b.target_critic1_ &&
         a.target_critic2_ == b.target_critic2_ && a.actor_opt_ == b.actor_opt_ && a.critic1_opt_ == b.critic1_opt_ &&
         a.critic2_opt_ == b.critic2_opt_ && a.rng_ == b.rng_ && a.critic_updates_ == b.critic_updates_ &&
         a.actor_updates_ == b.actor_updates_;
}

}  // namespace ruleclip::agents
