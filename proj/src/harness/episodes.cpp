#include "ruleclip/harness/episodes.hpp"

#include <random>

#include "ruleclip/error.hpp"

namespace ruleclip::harness {

std::shared_ptr<const env::WeatherSeries> make_weather(const RunConfig& cfg) {
  if (!cfg.weather_file.empty()) return std::make_shared<const env::WeatherSeries>(env::load_weather(cfg.weather_file));
  std::mt19937_64 rng(cfg.weather_seed);
  const int days = cfg.harness.train_days + cfg.harness.eval_episodes * cfg.env.episode_days;
  return std::make_shared<const env::WeatherSeries>(
      env::generate_weather(days, cfg.env.step_minutes, rng, cfg.env.weather));
}

EpisodePlan make_episode_plan(const RunConfig& cfg, const env::ThermalEnv& environment) {
  const std::size_t length = static_cast<std::size_t>(cfg.env.episode_steps());
  const std::size_t last_start = environment.max_start_index();
  const std::size_t blocks = last_start / length + 1;
  const auto eval_count = static_cast<std::size_t>(cfg.harness.eval_episodes);
  if (eval_count >= blocks)
    throw ConfigError("harness.eval_episodes", "weather horizon too short for the evaluation set plus training");

  EpisodePlan plan;
  std::mt19937_64 init_rng(cfg.weather_seed ^ 0x9E3779B97F4A7C15ull);
  std::vector<std::size_t> eval_starts;
  for (std::size_t k = 0; k < eval_count; ++k) {
    const std::size_t block = (2 * k + 1) * blocks / (2 * eval_count);
    const std::size_t start = block * length;
    eval_starts.push_back(start);
    const env::EnvState s = environment.reset(start, init_rng);
    plan.evaluation.push_back({start, s.temperature});
  }

  // Window of an episode starting at s: indices [s, s + length] inclusive.
  for (std::size_t s = 0; s <= last_start; ++s) {
    bool clear = true;
    for (std::size_t e : eval_starts) {
      if (!(s + length < e || s > e + length)) {
        clear = false;
        break;
      }
    }
    if (clear) plan.training_starts.push_back(s);
  }
  if (plan.training_starts.empty()) throw ConfigError("harness.train_days", "no training episode fits between evaluation blocks");
  return plan;
}

}  // namespace ruleclip::harness
