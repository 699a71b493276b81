#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ruleclip/env/thermal_env.hpp"
#include "ruleclip/harness/run_config.hpp"

namespace ruleclip::harness {

struct EvalEpisode {
  std::size_t start_index = 0;
  double initial_temperature = 0.0;
};

// Held-out evaluation blocks and the training starts that avoid them.
struct EpisodePlan {
  std::vector<EvalEpisode> evaluation;
  std::vector<std::size_t> training_starts;  // every start whose episode window misses all eval windows
};

// Weather for the run: loaded from cfg.weather_file, or generated from
// cfg.weather_seed over train_days + eval_episodes * episode_days days.
std::shared_ptr<const env::WeatherSeries> make_weather(const RunConfig& cfg);

// Evaluation episodes are whole blocks spread evenly over the horizon; their
// initial temperatures depend only on the weather seed.
EpisodePlan make_episode_plan(const RunConfig& cfg, const env::ThermalEnv& environment);

}  // namespace ruleclip::harness
