#include "ruleclip/env/thermal_env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ruleclip/error.hpp"

namespace ruleclip::env {

const char* to_string(Season s) { return s == Season::heating ? "heating" : "cooling"; }

Season parse_season(const std::string& name) {
  if (name == "heating") return Season::heating;
  if (name == "cooling") return Season::cooling;
  throw ConfigError("env.season", "expected heating or cooling; got '" + name + "'");
}

void EnvConfig::validate() const {
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key, "must be positive");
  };
  if (!(energy_weight >= 0.0)) throw ConfigError("env.alpha", "must be >= 0");
  positive(max_heat_power, "env.max_heat_power");
  positive(max_cool_power, "env.max_cool_power");
  positive(capacitance, "env.capacitance");
  positive(loss_coefficient, "env.loss_coefficient");
  positive(solar_gain, "env.solar_gain");
  if (step_minutes <= 0 || 1440 % step_minutes != 0) throw ConfigError("env.step_minutes", "must divide 24 h");
  if (episode_days < 1) throw ConfigError("env.episode_days", "must be >= 1");
  weather.validate();
}

double comfort_excess(double temperature, double lower, double upper) {
  return std::max({lower - temperature, temperature - upper, 0.0});
}

namespace {

double scale(double v, double lo, double hi) { return std::clamp(2.0 * (v - lo) / (hi - lo) - 1.0, -1.0, 1.0); }

}  // namespace

ThermalEnv::ThermalEnv(EnvConfig cfg, std::shared_ptr<const WeatherSeries> weather)
    : cfg_(std::move(cfg)), weather_(std::move(weather)) {
  cfg_.validate();
  if (!weather_ || weather_->size() == 0) throw UsageError("ThermalEnv: empty weather series");
  if (weather_->step_minutes != cfg_.step_minutes)
    throw ConfigError("env.step_minutes", "does not match the weather series step");
}

std::size_t ThermalEnv::max_start_index() const {
  const auto steps = static_cast<std::size_t>(cfg_.episode_steps());
  if (weather_->size() <= steps) throw UsageError("weather series shorter than one episode");
  return weather_->size() - 1 - steps;
}

EnvState ThermalEnv::make_state(std::size_t index, std::size_t start, double temperature) const {
  EnvState s;
  s.temperature = temperature;
  s.index = index;
  s.start_index = start;
  s.outdoor = weather_->outdoor[index];
  s.irradiance = weather_->irradiance[index];
  s.minute_of_day = weather_->minute_of_day(index);
  s.elapsed_minutes = static_cast<int>((index - start) * static_cast<std::size_t>(cfg_.step_minutes));
  std::tie(s.lower, s.upper) = cfg_.schedule.bounds_at(s.minute_of_day);
  const double phase = 2.0 * std::numbers::pi * s.minute_of_day / 1440.0;
  s.observation = {std::sin(phase),
                   std::cos(phase),
                   scale(s.outdoor, scale_.outdoor_low, scale_.outdoor_high),
                   std::clamp(2.0 * s.irradiance - 1.0, -1.0, 1.0),
                   scale(s.temperature, scale_.indoor_low, scale_.indoor_high),
                   scale(s.lower, scale_.indoor_low, scale_.indoor_high),
                   scale(s.upper, scale_.indoor_low, scale_.indoor_high)};
  return s;
}

EnvState ThermalEnv::reset(std::size_t start_index, std::mt19937_64& rng) const {
  if (start_index > max_start_index()) throw UsageError("reset: episode start index out of range");
  const auto [lower, upper] = cfg_.schedule.bounds_at(weather_->minute_of_day(start_index));
  std::uniform_real_distribution<double> init(lower, upper);
  return make_state(start_index, start_index, lower == upper ? lower : init(rng));
}

EnvState ThermalEnv::reset_at(std::size_t start_index, double temperature) const {
  if (start_index > max_start_index()) throw UsageError("reset: episode start index out of range");
  if (!std::isfinite(temperature)) throw UsageError("reset: non-finite temperature");
  return make_state(start_index, start_index, temperature);
}

double ThermalEnv::energy(double action) const {
  return cfg_.season == Season::heating ? (action + 1.0) / 2.0 * cfg_.max_heat_energy()
                                        : (1.0 - action) / 2.0 * cfg_.max_cool_energy();
}

StepResult ThermalEnv::step(const EnvState& state, double action) const {
  if (!std::isfinite(action)) throw UsageError("step: non-finite action");
  if (action < -1.0 || action > 1.0) throw UsageError("step: action outside [-1, 1]; clip before stepping");
  if (state.index + 1 >= weather_->size()) throw UsageError("step: past the end of the weather series");
  StepResult r;
  r.energy = energy(action);
  const double hvac = cfg_.season == Season::heating ? r.energy : -r.energy;
  const double h = cfg_.step_hours();
  const double passive =
      h * (-cfg_.loss_coefficient * (state.temperature - state.outdoor) + cfg_.solar_gain * state.irradiance);
  const double next_t = state.temperature + (hvac + passive) / cfg_.capacitance;
  r.next = make_state(state.index + 1, state.start_index, next_t);
  const double excess = comfort_excess(next_t, r.next.lower, r.next.upper);
  r.reward = -excess - cfg_.energy_weight * r.energy;
  r.violation = excess * h;
  r.done = r.next.elapsed_minutes >= cfg_.episode_days * 1440;
  return r;
}

double baseline_controller(const EnvState& state, double hysteresis, double previous_action, Season season) {
  const double t = state.temperature;
  if (season == Season::heating) {
    if (t < state.lower + hysteresis) return 1.0;
    if (t > state.upper - hysteresis) return -1.0;
  } else {
    if (t > state.upper - hysteresis) return -1.0;  // full cooling
    if (t < state.lower + hysteresis) return 1.0;   // cooling off
  }
  return previous_action;
}

void BangBangController::reset() { previous_ = season_ == Season::heating ? -1.0 : 1.0; }

double BangBangController::act(const EnvState& state) {
  previous_ = baseline_controller(state, hysteresis_, previous_, season_);
  return previous_;
}

}  // namespace ruleclip::env
