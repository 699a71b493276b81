#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

namespace ruleclip::env {

struct WeatherParams {
  double season_mean = 10.0;       // outdoor mean at the horizon edges, degC
  double season_dip = 8.0;         // how much colder mid-horizon is, degC
  double daily_amplitude = 4.0;    // peak-to-mean of the daily cycle, degC (peak at 15:00)
  double noise_std = 1.5;          // stationary std of the AR(1) temperature noise, degC
  double noise_persistence = 0.98; // AR(1) coefficient per step
  double cloudiness = 0.6;         // daily irradiance attenuation drawn in [0, cloudiness]
  double irradiance_noise = 0.05;  // per-step irradiance jitter while the sun is up

  void validate() const;
};

// Weather sampled at a fixed step, starting at midnight of day 0.
struct WeatherSeries {
  int step_minutes = 15;
  std::vector<double> outdoor;     // degC
  std::vector<double> irradiance;  // normalised solar gain in [0, 1]

  std::size_t size() const noexcept { return outdoor.size(); }
  int minute_of_day(std::size_t index) const noexcept {
    return static_cast<int>((index * static_cast<std::size_t>(step_minutes)) % 1440);
  }
};

// Clear-sky arc: sin over 06:00-18:00 peaking at noon, 0 at night.
double solar_arc(double hour_of_day);

// days * (1440 / step_minutes) + 1 samples, deterministic per rng state.
WeatherSeries generate_weather(int days, int step_minutes, std::mt19937_64& rng, const WeatherParams& params);

// Columnar text: header "minute,t_out,irradiance", one row per sample.
void save_weather(const std::filesystem::path& path, const WeatherSeries& series);
WeatherSeries load_weather(const std::filesystem::path& path);

}  // namespace ruleclip::env
