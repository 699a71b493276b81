#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ruleclip/env/schedule.hpp"
#include "ruleclip/env/weather.hpp"

namespace ruleclip::env {

enum class Season { heating, cooling };

const char* to_string(Season s);
Season parse_season(const std::string& name);

// Single-zone RC room. Powers are in kW (kWh per hour); the energy of one
// step is power * step length.
struct EnvConfig {
  double energy_weight = 0.05;      // alpha, reward units per kWh
  double max_heat_power = 4.0;      // kW
  double max_cool_power = 4.0;      // kW
  double capacitance = 2.5;         // kWh / degC
  double loss_coefficient = 0.1;    // kW / degC to ambient
  double solar_gain = 2.0;          // kW at irradiance 1
  int step_minutes = 15;
  int episode_days = 3;
  Season season = Season::heating;
  ComfortSchedule schedule;
  WeatherParams weather;

  void validate() const;
  int steps_per_day() const { return 1440 / step_minutes; }
  int episode_steps() const { return episode_days * steps_per_day(); }
  double step_hours() const { return step_minutes / 60.0; }
  double max_heat_energy() const { return max_heat_power * step_hours(); }  // E_max_heat per step
  double max_cool_energy() const { return max_cool_power * step_hours(); }
};

// Min-max ranges used to scale observations into [-1, 1].
struct ObservationScale {
  double outdoor_low = -20.0, outdoor_high = 30.0;
  double indoor_low = 10.0, indoor_high = 35.0;
};

struct EnvState {
  double temperature = 0.0;  // indoor, degC
  double outdoor = 0.0;      // degC
  double irradiance = 0.0;   // [0, 1]
  double lower = 0.0;        // comfort bounds, degC
  double upper = 0.0;
  std::size_t index = 0;     // position in the weather series
  std::size_t start_index = 0;
  int elapsed_minutes = 0;   // since episode start
  int minute_of_day = 0;
  // [sin, cos of time of day, T_out, irradiance, T, L, U], each scaled into [-1, 1].
  std::vector<double> observation;

  // Context for the comfort rule: {T, L, U}.
  std::vector<double> rule_context() const { return {temperature, lower, upper}; }
};

inline constexpr std::size_t kObservationWidth = 7;

struct StepResult {
  EnvState next;
  double reward = 0.0;
  double energy = 0.0;     // kWh this step
  double violation = 0.0;  // Kh this step
  bool done = false;       // episode length reached
};

// Comfort exceedance max{L - T, T - U, 0} in degC.
double comfort_excess(double temperature, double lower, double upper);

class ThermalEnv {
 public:
  ThermalEnv(EnvConfig cfg, std::shared_ptr<const WeatherSeries> weather);

  const EnvConfig& config() const noexcept { return cfg_; }
  const WeatherSeries& weather() const noexcept { return *weather_; }

  // Valid episode starts are those leaving room for a full episode.
  std::size_t max_start_index() const;

  // Initial indoor temperature uniform in [L, U] of the start instant.
  EnvState reset(std::size_t start_index, std::mt19937_64& rng) const;
  EnvState reset_at(std::size_t start_index, double temperature) const;

  // Energy drawn by an action in [-1, 1] under the configured season.
  double energy(double action) const;

  // Advances one step. action must already be clipped to [-1, 1].
  StepResult step(const EnvState& state, double action) const;

 private:
  EnvState make_state(std::size_t index, std::size_t start, double temperature) const;

  EnvConfig cfg_;
  ObservationScale scale_;
  std::shared_ptr<const WeatherSeries> weather_;
};

// Hysteresis on/off thermostat: full power when the temperature is within h
// of (or beyond) the bound that needs defending, off near the opposite bound,
// otherwise keep the previous command.
class BangBangController {
 public:
  BangBangController(double hysteresis, Season season) : hysteresis_(hysteresis), season_(season) { reset(); }
  void reset();
  double act(const EnvState& state);
  double previous() const noexcept { return previous_; }

 private:
  double hysteresis_;
  Season season_;
  double previous_ = -1.0;
};

// Stateless form of one controller decision.
double baseline_controller(const EnvState& state, double hysteresis, double previous_action,
                           Season season = Season::heating);

}  // namespace ruleclip::env
