#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ruleclip/agents/config.hpp"
#include "ruleclip/env/thermal_env.hpp"
#include "ruleclip/rules/rules.hpp"

namespace ruleclip::harness {

struct HarnessConfig {
  std::string label;                 // defaults to the variant (plus m/n for rule users)
  int epochs = 300;                  // one epoch = one day of training steps
  int train_days = 180;
  int eval_episodes = 20;
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir = "runs";
  int eval_every = 1;                // epochs between evaluations
  int warmup_steps = 1000;           // uniform random actions before learning starts
  bool stop_at_threshold = false;    // end the run at the first evaluation reaching the baseline
  bool record_wall_time = false;     // wall_ms column; off keeps metrics byte-reproducible
  bool log_actions = false;          // write actions.csv with every applied action and its bounds
  bool save_checkpoint = true;
  double baseline_hysteresis = 0.5;  // degC, thermostat defining the threshold
};

struct RunConfig {
  agents::AgentConfig agent;
  rules::ComfortRuleConfig rule;
  env::EnvConfig env;
  std::uint64_t weather_seed = 2024;
  std::string weather_file;  // optional; replaces the generator
  HarnessConfig harness;

  // Throws ConfigError naming the offending key.
  void validate() const;
  std::string label() const;
};

// INI document with sections [agent], [rule], [env], [harness]. Unknown
// sections or keys are rejected with a ConfigError naming them.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

// Canonical INI rendering; parse_run_config(to_ini(c)) reproduces c.
std::string to_ini(const RunConfig& cfg);

}  // namespace ruleclip::harness
