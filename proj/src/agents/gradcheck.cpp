#include "ruleclip/agents/gradcheck.hpp"

#include <algorithm>
#include <random>

#include "ruleclip/agents/agent.hpp"
#include "ruleclip/nn/finite_difference.hpp"

namespace ruleclip::agents {

using nn::Matrix;
using nn::Network;

bool GradCheckReport::passed() const {
  return !items.empty() && std::all_of(items.begin(), items.end(), [](const auto& i) { return i.passed; });
}

namespace {

double max_error(const nn::GradientBuffer& analytic, const nn::GradientBuffer& numeric) {
  double worst = 0.0;
  for (std::size_t k = 0; k < analytic.size(); ++k)
    worst = std::max(worst, nn::relative_error(analytic.values[k], numeric.values[k]));
  return worst;
}

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = u(rng);
  return m;
}

Network random_network(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> layers(1, 3), width(1, 16), act(0, 2);
  const int count = layers(rng);
  std::vector<std::size_t> hidden;
  for (int k = 0; k + 1 < count; ++k) hidden.push_back(static_cast<std::size_t>(width(rng)));
  const auto in = static_cast<std::size_t>(width(rng)), out = static_cast<std::size_t>(width(rng));
  Network net = Network::mlp(in, hidden, out, nn::Activation::tanh, nn::Activation::identity, rng);
  std::vector<nn::LayerSpec> specs = net.layers();
  for (auto& s : specs) s.activation = static_cast<nn::Activation>(act(rng));
  Network mixed(specs);
  std::copy(net.parameters().begin(), net.parameters().end(), mixed.parameters().begin());
  return mixed;
}

Batch random_batch(std::size_t obs, std::size_t act, std::size_t n, std::mt19937_64& rng) {
  Batch b;
  b.states = random_matrix(obs, n, rng);
  b.next_states = random_matrix(obs, n, rng);
  b.actions = random_matrix(act, n, rng);
  b.raw_actions = b.actions;
  b.bounds_min = Matrix(act, n, -1.0);
  b.bounds_max = Matrix(act, n, 1.0);
  std::uniform_real_distribution<double> r(-2.0, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    b.rewards.push_back(r(rng));
    b.env_rewards.push_back(b.rewards.back());
    b.done.push_back(k % 5 == 4);
  }
  return b;
}

double mean_q(const Network& critic, const Matrix& states, const Matrix& actions) {
  const Matrix q = critic.forward(stack_rows(states, actions));
  double s = 0.0;
  for (double v : q.values()) s += v;
  return s / static_cast<double>(q.cols());
}

}  // namespace

GradCheckReport run_gradcheck(std::uint64_t seed, int trials, double tolerance, double perturbation) {
  GradCheckReport report;
  report.tolerance = tolerance;
  report.perturbation = perturbation;
  std::mt19937_64 rng(seed);
  GradCheckItem net_item{"network backward (parameters)"}, input_item{"network backward (inputs)"},
      critic_item{"critic TD loss"}, classical_item{"actor classical loss"}, ea_item{"actor penalised loss"};

  auto track = [](GradCheckItem& item, double err, std::size_t entries) {
    item.max_relative_error = std::max(item.max_relative_error, err);
    item.entries += entries;
  };

  for (int t = 0; t < trials; ++t) {
    // Plain network: loss = sum_n <f(x_n), c_n>.
    const Network net = random_network(rng);
    std::uniform_int_distribution<std::size_t> batch_size(1, 6);
    const std::size_t n = batch_size(rng);
    const Matrix x = random_matrix(net.input_width(), n, rng);
    const Matrix cot = random_matrix(net.output_width(), n, rng);
    auto pairing = [&](const Network& probe, const Matrix& input) {
      const Matrix y = probe.forward(input);
      double s = 0.0;
      for (std::size_t k = 0; k < y.size(); ++k) s += y.values()[k] * cot.values()[k];
      return s;
    };
    nn::ForwardTape tape;
    net.forward(x, tape);
    const auto result = net.backward(tape, cot);
    const auto numeric = nn::finite_difference_gradient(net, [&](const Network& p) { return pairing(p, x); }, perturbation);
    track(net_item, max_error(result.gradients, numeric), numeric.size());

    double worst_input = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      Matrix up = x, down = x;
      up.values()[k] += perturbation;
      down.values()[k] -= perturbation;
      const double fd = (pairing(net, up) - pairing(net, down)) / (2.0 * perturbation);
      worst_input = std::max(worst_input, nn::relative_error(result.input_cotangent.values()[k], fd));
    }
    track(input_item, worst_input, x.size());

    // Agent losses on a small random agent.
    AgentConfig cfg;
    cfg.variant = Variant::ea;
    cfg.lambda = 100.0;
    std::uniform_int_distribution<std::size_t> width(2, 16), obs_width(2, 7), act_width(1, 2);
    cfg.actor_hidden = {width(rng), width(rng)};
    cfg.critic_hidden = {width(rng), width(rng)};
    cfg.batch_size = 8;
    cfg.buffer_capacity = 8;
    const std::size_t obs = obs_width(rng), act = act_width(rng);
    Agent agent(cfg, obs, rules::ActionSpace::symmetric_unit(act), rng());
    Batch batch = random_batch(obs, act, 8, rng);

    const auto targets = agent.td_targets(batch);
    for (int which : {1, 2}) {
      const auto analytic = agent.critic_gradient(batch, targets, which);
      const Network& critic = which == 1 ? agent.critic1() : agent.critic2();
      const auto fd = nn::finite_difference_gradient(
          critic,
          [&](const Network& probe) {
            const Matrix q = probe.forward(stack_rows(batch.states, batch.actions));
            double s = 0.0;
            for (std::size_t k = 0; k < q.cols(); ++k) s += (q(0, k) - targets[k]) * (q(0, k) - targets[k]);
            return s / static_cast<double>(q.cols());
          },
          perturbation);
      track(critic_item, max_error(analytic, fd), fd.size());
    }

    const auto classical = agent.actor_gradient_classical(batch);
    const auto fd_classical = nn::finite_difference_gradient(
        agent.actor(), [&](const Network& actor) { return -mean_q(agent.critic1(), batch.states, actor.forward(batch.states)); },
        perturbation);
    track(classical_item, max_error(classical.gradient, fd_classical), fd_classical.size());

    // Tighten the bounds around the current policy so that some states saturate.
    const Matrix pi = agent.actor().forward(batch.states);
    std::uniform_real_distribution<double> offset(-0.3, 0.3);
    for (std::size_t j = 0; j < act; ++j)
      for (std::size_t k = 0; k < batch.size(); ++k) {
        const double c = std::clamp(pi(j, k) + offset(rng), -0.9, 0.9);
        batch.bounds_min(j, k) = std::max(-1.0, c - 0.1);
        batch.bounds_max(j, k) = std::min(1.0, c + 0.1);
      }
    Matrix frozen(act, batch.size());  // clipped actions at the current parameters, held constant
    for (std::size_t j = 0; j < act; ++j)
      for (std::size_t k = 0; k < batch.size(); ++k)
        frozen(j, k) = std::clamp(pi(j, k), batch.bounds_min(j, k), batch.bounds_max(j, k));
    const auto ea = agent.actor_gradient_ea(batch);
    const auto fd_ea = nn::finite_difference_gradient(
        agent.actor(),
        [&](const Network& actor) {
          const Matrix p = actor.forward(batch.states);
          double penalty = 0.0;
          for (std::size_t k = 0; k < p.size(); ++k) {
            const double e = p.values()[k] - frozen.values()[k];
            penalty += 0.5 * cfg.lambda * e * e;
          }
          return -mean_q(agent.critic1(), batch.states, p) + penalty / static_cast<double>(p.cols());
        },
        perturbation);
    track(ea_item, max_error(ea.gradient, fd_ea), fd_ea.size());
  }

  for (auto* item : {&net_item, &input_item, &critic_item, &classical_item, &ea_item}) {
    item->passed = item->max_relative_error < tolerance;
    report.items.push_back(*item);
  }
  return report;
}

}  // namespace ruleclip::agents
