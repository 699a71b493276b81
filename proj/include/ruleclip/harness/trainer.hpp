#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "ruleclip/agents/agent.hpp"
#include "ruleclip/env/thermal_env.hpp"
#include "ruleclip/harness/episodes.hpp"
#include "ruleclip/harness/metrics.hpp"
#include "ruleclip/harness/run_config.hpp"

namespace ruleclip::harness {

struct EvaluationResult {
  double mean_reward = 0.0;   // per step, over all evaluation episodes
  double violation_kh = 0.0;  // mean per episode
  double energy_kwh = 0.0;    // mean per episode
  double saturation_fraction = 0.0;
  std::size_t steps = 0;
};

enum class Phase { warmup, train, eval };
const char* to_string(Phase p);

struct ActionRecord {
  Phase phase = Phase::train;
  int epoch = 0;            // training epoch in progress (eval: the epoch just finished)
  std::size_t step = 0;     // global training step, or step within the evaluation pass
  double temperature = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::vector<double> raw;
  std::vector<double> applied;
  rules::ActionBounds bounds;
};

struct TrainHooks {
  std::function<void(const ActionRecord&)> on_action;
  agents::Agent::CriticObserver on_critic_update;
};

// Everything a run needs besides the agent: weather, environment, plan, rule.
struct RunContext {
  RunConfig config;
  std::shared_ptr<const env::WeatherSeries> weather;
  std::unique_ptr<env::ThermalEnv> environment;
  EpisodePlan plan;
  std::unique_ptr<rules::RuleProvider> rule;

  explicit RunContext(RunConfig cfg);
};

// Noise-free rollout of a decision function over the evaluation episodes.
using Decider = std::function<agents::ActionChoice(const env::EnvState&)>;
EvaluationResult evaluate_decider(const env::ThermalEnv& environment, const std::vector<EvalEpisode>& episodes,
                                  const Decider& decide, const std::function<void(const ActionRecord&)>& on_action = {});

// Deterministic agent policy (sigma = 0) with the variant's bounds enforced.
EvaluationResult evaluate(const agents::Agent& agent, const RunContext& ctx,
                          const std::function<void(const ActionRecord&)>& on_action = {});

// Hysteresis thermostat on the same evaluation set; its mean reward is the
// convergence threshold.
EvaluationResult evaluate_baseline(const RunContext& ctx);

struct RunResult {
  std::string label;
  std::uint64_t seed = 0;
  RunMetrics metrics;
  std::unique_ptr<agents::Agent> agent;
  std::filesystem::path directory;  // empty when nothing was written
  double total_wall_ms = 0.0;
};

// One training run. If output is set, writes metrics.csv, summary.json,
// agent.ckpt (and actions.csv when log_actions) into it.
RunResult train(const RunConfig& cfg, std::uint64_t seed, const std::optional<std::filesystem::path>& output,
                const TrainHooks& hooks = {});

// Directory used for a run: <output_dir>/<label>/seed_<seed>.
std::filesystem::path run_directory(const RunConfig& cfg, std::uint64_t seed);

std::string summary_json(const RunResult& run, const RunConfig& cfg);

}  // namespace ruleclip::harness
