#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ruleclip/nn/matrix.hpp"
#include "ruleclip/rules/rules.hpp"

namespace ruleclip::agents {

struct Transition {
  std::vector<double> state;
  std::vector<double> action;      // applied (post-clipping)
  std::vector<double> raw_action;  // policy output plus noise, before clipping
  double reward = 0.0;             // what the critic learns from (shaped for RS)
  double env_reward = 0.0;         // unshaped environment reward
  std::vector<double> next_state;
  bool done = false;
  rules::ActionBounds bounds;      // admissible box at state
};

// Column-stacked minibatch (features x batch).
struct Batch {
  nn::Matrix states;
  nn::Matrix actions;
  nn::Matrix raw_actions;
  nn::Matrix next_states;
  nn::Matrix bounds_min;
  nn::Matrix bounds_max;
  std::vector<double> rewards;
  std::vector<double> env_rewards;
  std::vector<bool> done;

  std::size_t size() const noexcept { return rewards.size(); }
};

Batch make_batch(const std::vector<const Transition*>& items);

// Fixed-capacity ring buffer; the oldest transition is overwritten when full.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const noexcept { return items_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  std::uint64_t insertions() const noexcept { return insertions_; }
  const Transition& at(std::size_t index) const { return items_.at(index); }

  // Uniform i.i.d. draws with replacement. Requires size() >= count.
  std::vector<std::size_t> sample_indices(std::mt19937_64& rng, std::size_t count) const;
  Batch sample(std::mt19937_64& rng, std::size_t count) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::uint64_t insertions_ = 0;
  std::vector<Transition> items_;
};

}  // namespace ruleclip::agents
