#include "ruleclip/harness/trainer.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "ruleclip/agents/checkpoint.hpp"
#include "ruleclip/error.hpp"

namespace ruleclip::harness {

using agents::ActionChoice;
using agents::Agent;
using json = nlohmann::json;

const char* to_string(Phase p) {
  switch (p) {
    case Phase::warmup: return "warmup";
    case Phase::train: return "train";
    case Phase::eval: return "eval";
  }
  return "unknown";
}

RunContext::RunContext(RunConfig cfg) : config(std::move(cfg)) {
  config.validate();
  weather = make_weather(config);
  environment = std::make_unique<env::ThermalEnv>(config.env, weather);
  plan = make_episode_plan(config, *environment);
  if (config.agent.variant == agents::Variant::classical)
    rule = std::make_unique<rules::GlobalBoundsRule>(rules::ActionSpace::symmetric_unit(1));
  else
    rule = std::make_unique<rules::ComfortRule>(config.rule);
}

EvaluationResult evaluate_decider(const env::ThermalEnv& environment, const std::vector<EvalEpisode>& episodes,
                                  const Decider& decide, const std::function<void(const ActionRecord&)>& on_action) {
  if (episodes.empty()) throw UsageError("evaluate: empty evaluation set");
  EvaluationResult out;
  double reward = 0.0, violation = 0.0, energy = 0.0;
  std::size_t saturated = 0;
  for (const auto& ep : episodes) {
    env::EnvState state = environment.reset_at(ep.start_index, ep.initial_temperature);
    for (;;) {
      const ActionChoice choice = decide(state);
      if (on_action) {
        on_action({Phase::eval, 0, out.steps, state.temperature, state.lower, state.upper, choice.raw, choice.applied,
                   choice.bounds});
      }
      const env::StepResult r = environment.step(state, choice.applied.at(0));
      reward += r.reward;
      violation += r.violation;
      energy += r.energy;
      saturated += choice.saturated ? 1 : 0;
      ++out.steps;
      if (r.done) break;
      state = r.next;
    }
  }
  const double n_ep = static_cast<double>(episodes.size());
  out.mean_reward = reward / static_cast<double>(out.steps);
  out.violation_kh = violation / n_ep;
  out.energy_kwh = energy / n_ep;
  out.saturation_fraction = static_cast<double>(saturated) / static_cast<double>(out.steps);
  return out;
}

EvaluationResult evaluate(const Agent& agent, const RunContext& ctx,
                          const std::function<void(const ActionRecord&)>& on_action) {
  const rules::RuleProvider& rule = *ctx.rule;
  return evaluate_decider(
      *ctx.environment, ctx.plan.evaluation,
      [&](const env::EnvState& s) { return agent.greedy_action(s.observation, s.rule_context(), rule); }, on_action);
}

EvaluationResult evaluate_baseline(const RunContext& ctx) {
  env::BangBangController controller(ctx.config.harness.baseline_hysteresis, ctx.config.env.season);
  const auto full = rules::ActionBounds{{-1.0}, {1.0}};
  return evaluate_decider(*ctx.environment, ctx.plan.evaluation, [&](const env::EnvState& s) {
    if (s.elapsed_minutes == 0) controller.reset();
    const double a = controller.act(s);
    return ActionChoice{{a}, {a}, full, false};
  });
}

std::filesystem::path run_directory(const RunConfig& cfg, std::uint64_t seed) {
  return std::filesystem::path(cfg.harness.output_dir) / cfg.label() / ("seed_" + std::to_string(seed));
}

std::string summary_json(const RunResult& run, const RunConfig& cfg) {
  json j{{"label", run.label},
         {"variant", agents::to_string(cfg.agent.variant)},
         {"seed", run.seed},
         {"m", cfg.rule.margin},
         {"n", cfg.rule.saturation_margin},
         {"lambda", cfg.agent.lambda},
         {"epochs_completed", run.metrics.rows.empty() ? 0 : run.metrics.rows.back().epoch},
         {"eval_every", cfg.harness.eval_every},
         {"threshold", run.metrics.threshold},
         {"threshold_source", "hysteresis thermostat on the evaluation set"},
         {"x_axis", "training days (1 epoch = 1 day of training steps)"}};
  j["best_test_reward"] = run.metrics.best_test_reward ? json(*run.metrics.best_test_reward) : json(nullptr);
  j["best_epoch"] = run.metrics.best_epoch ? json(*run.metrics.best_epoch) : json(nullptr);
  j["epochs_to_threshold"] = run.metrics.epochs_to_threshold ? json(*run.metrics.epochs_to_threshold) : json(nullptr);
  if (cfg.harness.record_wall_time) j["total_wall_ms"] = run.total_wall_ms;
  return j.dump(2) + "\n";
}

namespace {

class ActionLog {
 public:
  explicit ActionLog(const std::filesystem::path& path) : os_(path) {
    if (!os_) throw IoError("cannot open " + path.string() + " for writing");
    os_ << "phase,epoch,step,temperature,lower,upper,raw,applied,a_min,a_max\n";
  }
  void write(const ActionRecord& r) {
    char buf[400];
    std::snprintf(buf, sizeof buf, "%s,%d,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", to_string(r.phase),
                  r.epoch, r.step, r.temperature, r.lower, r.upper, r.raw.at(0), r.applied.at(0), r.bounds.min.at(0),
                  r.bounds.max.at(0));
    os_ << buf;
  }

 private:
  std::ofstream os_;
};

}  // namespace

RunResult train(const RunConfig& cfg, std::uint64_t seed, const std::optional<std::filesystem::path>& output,
                const TrainHooks& hooks) {
  using clock = std::chrono::steady_clock;
  const auto run_start = clock::now();
  RunContext ctx(cfg);
  const env::ThermalEnv& environment = *ctx.environment;
  const rules::RuleProvider& rule = *ctx.rule;

  RunResult out;
  out.label = cfg.label();
  out.seed = seed;
  out.metrics.threshold = evaluate_baseline(ctx).mean_reward;
  out.agent = std::make_unique<Agent>(cfg.agent, env::kObservationWidth, rules::ActionSpace::symmetric_unit(1), seed);
  Agent& agent = *out.agent;
  agents::ReplayBuffer buffer(cfg.agent.buffer_capacity);
  std::mt19937_64 env_rng(seed * 0x2545F4914F6CDD1Dull + 0x632BE59BD9B4E019ull);

  std::optional<MetricsWriter> writer;
  std::optional<ActionLog> action_log;
  if (output) {
    std::filesystem::create_directories(*output);
    out.directory = *output;
    writer.emplace(*output / "metrics.csv");
    if (cfg.harness.log_actions) action_log.emplace(*output / "actions.csv");
  }
  auto emit_action = [&](const ActionRecord& r) {
    if (hooks.on_action) hooks.on_action(r);
    if (action_log) action_log->write(r);
  };

  std::uniform_int_distribution<std::size_t> pick_start(0, ctx.plan.training_starts.size() - 1);
  auto new_episode = [&] { return environment.reset(ctx.plan.training_starts[pick_start(env_rng)], env_rng); };

  const int steps_per_epoch = cfg.env.steps_per_day();
  const auto warmup = static_cast<std::size_t>(cfg.harness.warmup_steps);
  std::size_t global_step = 0;
  env::EnvState state = cfg.harness.epochs > 0 ? new_episode() : env::EnvState{};

  int epoch = 0;
  try {
    for (epoch = 1; epoch <= cfg.harness.epochs; ++epoch) {
      const auto epoch_start = clock::now();
      double actor_loss = 0.0, critic_loss = 0.0;
      std::size_t actor_updates = 0, critic_updates = 0, saturated = 0;
      for (int k = 0; k < steps_per_epoch; ++k) {
        ++global_step;
        const auto context = state.rule_context();
        const bool warming = global_step <= warmup;
        const ActionChoice choice = warming ? agent.random_action(context, rule)
                                            : agent.select_action(state.observation, context, cfg.agent.sigma, rule);
        emit_action({warming ? Phase::warmup : Phase::train, epoch, global_step, state.temperature, state.lower,
                     state.upper, choice.raw, choice.applied, choice.bounds});
        saturated += choice.saturated ? 1 : 0;

        env::StepResult r = environment.step(state, choice.applied.at(0));
        agents::Transition t;
        t.state = state.observation;
        t.action = choice.applied;
        t.raw_action = choice.raw;
        t.reward = agent.learning_reward(r.reward, choice);
        t.env_reward = r.reward;
        t.next_state = r.next.observation;
        t.done = false;  // episodes end on a time limit, never in a terminal state
        t.bounds = choice.bounds;
        buffer.push(std::move(t));

        if (!warming && buffer.size() >= cfg.agent.batch_size) {
          const auto step = agent.train_step(buffer, hooks.on_critic_update);
          critic_loss += 0.5 * (step.critic.loss1 + step.critic.loss2);
          ++critic_updates;
          if (step.actor_updated) {
            actor_loss += step.actor.loss;
            ++actor_updates;
          }
        }
        state = r.done ? new_episode() : std::move(r.next);
      }

      if (epoch % cfg.harness.eval_every != 0) continue;
      const auto eval = evaluate(agent, ctx, [&](const ActionRecord& r) {
        ActionRecord tagged = r;
        tagged.epoch = epoch;
        emit_action(tagged);
      });
      EpochMetrics row;
      row.epoch = epoch;
      row.mean_test_reward = eval.mean_reward;
      row.violation_kh = eval.violation_kh;
      row.energy_kwh = eval.energy_kwh;
      row.saturation_frac = static_cast<double>(saturated) / steps_per_epoch;
      row.actor_loss = actor_updates ? actor_loss / static_cast<double>(actor_updates) : 0.0;
      row.critic_loss = critic_updates ? critic_loss / static_cast<double>(critic_updates) : 0.0;
      if (cfg.harness.record_wall_time)
        row.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - epoch_start).count();
      out.metrics.add(row);
      if (writer) writer->write(row);
      if (cfg.harness.stop_at_threshold && out.metrics.epochs_to_threshold) break;
    }
  } catch (const NumericError& e) {
    std::string where = "run '" + out.label + "' seed " + std::to_string(seed) + " epoch " + std::to_string(epoch);
    if (output) {
      agents::save_agent(*output / "agent_abort.ckpt", agent);
      where += ", checkpoint " + (*output / "agent_abort.ckpt").string();
    }
    throw NumericError(std::string(e.what()) + " (" + where + ")");
  }

  out.total_wall_ms = std::chrono::duration<double, std::milli>(clock::now() - run_start).count();
  if (output) {
    if (cfg.harness.save_checkpoint) agents::save_agent(*output / "agent.ckpt", agent);
    std::ofstream os(*output / "summary.json");
    os << summary_json(out, cfg);
    if (!os) throw IoError("failed writing summary.json");
  }
  return out;
}

}  // namespace ruleclip::harness
