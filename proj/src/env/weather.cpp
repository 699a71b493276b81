#include "ruleclip/env/weather.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ruleclip/error.hpp"

namespace ruleclip::env {

void WeatherParams::validate() const {
  if (!(season_dip >= 0.0)) throw ConfigError("env.weather_season_dip", "must be >= 0");
  if (!(daily_amplitude >= 0.0)) throw ConfigError("env.weather_daily_amplitude", "must be >= 0");
  if (!(noise_std >= 0.0)) throw ConfigError("env.weather_noise_std", "must be >= 0");
  if (!(noise_persistence >= 0.0 && noise_persistence < 1.0))
    throw ConfigError("env.weather_noise_persistence", "must lie in [0, 1)");
  if (!(cloudiness >= 0.0 && cloudiness <= 1.0)) throw ConfigError("env.weather_cloudiness", "must lie in [0, 1]");
  if (!(irradiance_noise >= 0.0)) throw ConfigError("env.weather_irradiance_noise", "must be >= 0");
}

double solar_arc(double hour_of_day) {
  if (hour_of_day <= 6.0 || hour_of_day >= 18.0) return 0.0;
  return std::sin(std::numbers::pi * (hour_of_day - 6.0) / 12.0);
}

WeatherSeries generate_weather(int days, int step_minutes, std::mt19937_64& rng, const WeatherParams& params) {
  if (days < 1) throw UsageError("generate_weather: horizon must be at least one day");
  if (step_minutes <= 0 || 1440 % step_minutes != 0) throw UsageError("generate_weather: step must divide 24 h");
  params.validate();
  const std::size_t per_day = static_cast<std::size_t>(1440 / step_minutes);
  const std::size_t count = static_cast<std::size_t>(days) * per_day + 1;
  WeatherSeries w;
  w.step_minutes = step_minutes;
  w.outdoor.resize(count);
  w.irradiance.resize(count);

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double rho = params.noise_persistence;
  const double innovation = params.noise_std * std::sqrt(1.0 - rho * rho);
  double ar = params.noise_std > 0.0 ? params.noise_std * gauss(rng) : 0.0;
  double cloud = 1.0;
  for (std::size_t k = 0; k < count; ++k) {
    if (k % per_day == 0) cloud = 1.0 - params.cloudiness * unit(rng);
    const double hour = static_cast<double>(w.minute_of_day(k)) / 60.0;
    const double progress = static_cast<double>(k) / static_cast<double>(count - 1);
    const double seasonal = params.season_mean - params.season_dip * std::sin(std::numbers::pi * progress);
    const double daily = params.daily_amplitude * std::cos(2.0 * std::numbers::pi * (hour - 15.0) / 24.0);
    if (k > 0 && params.noise_std > 0.0) ar = rho * ar + innovation * gauss(rng);
    w.outdoor[k] = seasonal + daily + ar;

    const double arc = solar_arc(hour);
    double irr = 0.0;
    if (arc > 0.0) {
      irr = arc * cloud;
      if (params.irradiance_noise > 0.0) irr += params.irradiance_noise * gauss(rng);
    }
    w.irradiance[k] = std::clamp(irr, 0.0, 1.0);
  }
  return w;
}

void save_weather(const std::filesystem::path& path, const WeatherSeries& series) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << "minute,t_out,irradiance\n";
  os.precision(17);
  for (std::size_t k = 0; k < series.size(); ++k)
    os << k * static_cast<std::size_t>(series.step_minutes) << ',' << series.outdoor[k] << ',' << series.irradiance[k]
       << '\n';
  if (!os) throw IoError("failed writing " + path.string());
}

WeatherSeries load_weather(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open weather file " + path.string());
  std::string line;
  if (!std::getline(is, line) || line.rfind("minute,t_out,irradiance", 0) != 0)
    throw IoError(path.string() + ": expected header 'minute,t_out,irradiance'");
  WeatherSeries w;
  std::vector<long long> minutes;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ls(line);
    long long minute;
    double t, irr;
    char c1, c2;
    if (!(ls >> minute >> c1 >> t >> c2 >> irr) || c1 != ',' || c2 != ',')
      throw IoError(path.string() + ": malformed row " + std::to_string(row));
    if (!std::isfinite(t) || !(irr >= 0.0 && irr <= 1.0))
      throw IoError(path.string() + ": out-of-range value on row " + std::to_string(row));
    minutes.push_back(minute);
    w.outdoor.push_back(t);
    w.irradiance.push_back(irr);
  }
  if (minutes.size() < 2) throw IoError(path.string() + ": need at least two samples");
  const long long step = minutes[1] - minutes[0];
  if (minutes[0] != 0 || step <= 0 || 1440 % step != 0) throw IoError(path.string() + ": timestamps must start at 0 with a step dividing 24 h");
  for (std::size_t k = 1; k < minutes.size(); ++k)
    if (minutes[k] - minutes[k - 1] != step) throw IoError(path.string() + ": timestamps are not evenly spaced");
  w.step_minutes = static_cast<int>(step);
  return w;
}

}  // namespace ruleclip::env
