#include "ruleclip/agents/replay_buffer.hpp"

#include <string>

#include "ruleclip/error.hpp"

namespace ruleclip::agents {

Batch make_batch(const std::vector<const Transition*>& items) {
  if (items.empty()) throw UsageError("make_batch: empty batch");
  const std::size_t n = items.size();
  const std::size_t obs = items.front()->state.size(), act = items.front()->action.size();
  Batch b;
  b.states.resize(obs, n);
  b.next_states.resize(obs, n);
  b.actions.resize(act, n);
  b.raw_actions.resize(act, n);
  b.bounds_min.resize(act, n);
  b.bounds_max.resize(act, n);
  b.rewards.resize(n);
  b.env_rewards.resize(n);
  b.done.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Transition& t = *items[k];
    if (t.state.size() != obs || t.next_state.size() != obs || t.action.size() != act ||
        t.raw_action.size() != act || t.bounds.dimension() != act)
      throw UsageError("make_batch: inconsistent transition shapes");
    for (std::size_t i = 0; i < obs; ++i) {
      b.states(i, k) = t.state[i];
      b.next_states(i, k) = t.next_state[i];
    }
    for (std::size_t j = 0; j < act; ++j) {
      b.actions(j, k) = t.action[j];
      b.raw_actions(j, k) = t.raw_action[j];
      b.bounds_min(j, k) = t.bounds.min[j];
      b.bounds_max(j, k) = t.bounds.max[j];
    }
    b.rewards[k] = t.reward;
    b.env_rewards[k] = t.env_reward;
    b.done[k] = t.done;
  }
  return b;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw UsageError("ReplayBuffer: capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
  ++insertions_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::mt19937_64& rng, std::size_t count) const {
  if (count == 0) throw UsageError("ReplayBuffer::sample: batch size must be positive");
  if (items_.size() < count)
    throw UsageError("ReplayBuffer::sample: buffer holds " + std::to_string(items_.size()) +
                     " transitions, batch needs " + std::to_string(count));
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  std::vector<std::size_t> out(count);
  for (auto& idx : out) idx = pick(rng);
  return out;
}

Batch ReplayBuffer::sample(std::mt19937_64& rng, std::size_t count) const {
  const auto idx = sample_indices(rng, count);
  std::vector<const Transition*> items;
  items.reserve(count);
  for (auto i : idx) items.push_back(&items_[i]);
  return make_batch(items);
}

}  // namespace ruleclip::agents
