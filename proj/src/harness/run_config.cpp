#include "ruleclip/harness/run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ruleclip/error.hpp"

namespace ruleclip::harness {

namespace pt = boost::property_tree;

namespace {

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a real number, got '" + v + "'");
  }
}

long long to_integer(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
}

std::size_t to_count(const std::string& key, const std::string& v) {
  const long long i = to_integer(key, v);
  if (i < 0) throw ConfigError(key, "must be non-negative");
  return static_cast<std::size_t>(i);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) {
    const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::vector<std::size_t> to_widths(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  for (const auto& s : split_list(v)) out.push_back(to_count(key, s));
  if (out.empty()) throw ConfigError(key, "needs at least one hidden width");
  return out;
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::ostringstream os;
  for (std::size_t k = 0; k < xs.size(); ++k) os << (k ? "," : "") << xs[k];
  return os.str();
}

std::string real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"agent.variant", [](RunConfig& c, auto&, auto& v) { c.agent.variant = agents::parse_variant(v); }},
      {"agent.gamma", [](RunConfig& c, auto& k, auto& v) { c.agent.gamma = to_double(k, v); }},
      {"agent.sigma", [](RunConfig& c, auto& k, auto& v) { c.agent.sigma = to_double(k, v); }},
      {"agent.lambda", [](RunConfig& c, auto& k, auto& v) { c.agent.lambda = to_double(k, v); }},
      {"agent.tau", [](RunConfig& c, auto& k, auto& v) { c.agent.tau = to_double(k, v); }},
      {"agent.policy_delay", [](RunConfig& c, auto& k, auto& v) { c.agent.policy_delay = to_count(k, v); }},
      {"agent.target_noise_std", [](RunConfig& c, auto& k, auto& v) { c.agent.target_noise_std = to_double(k, v); }},
      {"agent.target_noise_clip", [](RunConfig& c, auto& k, auto& v) { c.agent.target_noise_clip = to_double(k, v); }},
      {"agent.batch_size", [](RunConfig& c, auto& k, auto& v) { c.agent.batch_size = to_count(k, v); }},
      {"agent.buffer_capacity", [](RunConfig& c, auto& k, auto& v) { c.agent.buffer_capacity = to_count(k, v); }},
      {"agent.actor_lr", [](RunConfig& c, auto& k, auto& v) { c.agent.actor_learning_rate = to_double(k, v); }},
      {"agent.critic_lr", [](RunConfig& c, auto& k, auto& v) { c.agent.critic_learning_rate = to_double(k, v); }},
      {"agent.actor_hidden", [](RunConfig& c, auto& k, auto& v) { c.agent.actor_hidden = to_widths(k, v); }},
      {"agent.critic_hidden", [](RunConfig& c, auto& k, auto& v) { c.agent.critic_hidden = to_widths(k, v); }},
      {"rule.m", [](RunConfig& c, auto& k, auto& v) { c.rule.margin = to_double(k, v); }},
      {"rule.n", [](RunConfig& c, auto& k, auto& v) { c.rule.saturation_margin = to_double(k, v); }},
      {"env.alpha", [](RunConfig& c, auto& k, auto& v) { c.env.energy_weight = to_double(k, v); }},
      {"env.max_heat_power", [](RunConfig& c, auto& k, auto& v) { c.env.max_heat_power = to_double(k, v); }},
      {"env.max_cool_power", [](RunConfig& c, auto& k, auto& v) { c.env.max_cool_power = to_double(k, v); }},
      {"env.capacitance", [](RunConfig& c, auto& k, auto& v) { c.env.capacitance = to_double(k, v); }},
      {"env.loss_coefficient", [](RunConfig& c, auto& k, auto& v) { c.env.loss_coefficient = to_double(k, v); }},
      {"env.solar_gain", [](RunConfig& c, auto& k, auto& v) { c.env.solar_gain = to_double(k, v); }},
      {"env.step_minutes", [](RunConfig& c, auto& k, auto& v) { c.env.step_minutes = static_cast<int>(to_integer(k, v)); }},
      {"env.episode_days", [](RunConfig& c, auto& k, auto& v) { c.env.episode_days = static_cast<int>(to_integer(k, v)); }},
      {"env.season", [](RunConfig& c, auto&, auto& v) { c.env.season = env::parse_season(v); }},
      {"env.comfort_schedule", [](RunConfig& c, auto&, auto& v) { c.env.schedule = env::ComfortSchedule::parse(v); }},
      {"env.weather_seed", [](RunConfig& c, auto& k, auto& v) { c.weather_seed = to_count(k, v); }},
      {"env.weather_file", [](RunConfig& c, auto&, auto& v) { c.weather_file = v; }},
      {"env.weather_season_mean", [](RunConfig& c, auto& k, auto& v) { c.env.weather.season_mean = to_double(k, v); }},
      {"env.weather_season_dip", [](RunConfig& c, auto& k, auto& v) { c.env.weather.season_dip = to_double(k, v); }},
      {"env.weather_daily_amplitude", [](RunConfig& c, auto& k, auto& v) { c.env.weather.daily_amplitude = to_double(k, v); }},
      {"env.weather_noise_std", [](RunConfig& c, auto& k, auto& v) { c.env.weather.noise_std = to_double(k, v); }},
      {"env.weather_noise_persistence", [](RunConfig& c, auto& k, auto& v) { c.env.weather.noise_persistence = to_double(k, v); }},
      {"env.weather_cloudiness", [](RunConfig& c, auto& k, auto& v) { c.env.weather.cloudiness = to_double(k, v); }},
      {"env.weather_irradiance_noise", [](RunConfig& c, auto& k, auto& v) { c.env.weather.irradiance_noise = to_double(k, v); }},
      {"harness.label", [](RunConfig& c, auto&, auto& v) { c.harness.label = v; }},
      {"harness.epochs", [](RunConfig& c, auto& k, auto& v) { c.harness.epochs = static_cast<int>(to_integer(k, v)); }},
      {"harness.train_days", [](RunConfig& c, auto& k, auto& v) { c.harness.train_days = static_cast<int>(to_integer(k, v)); }},
      {"harness.eval_episodes", [](RunConfig& c, auto& k, auto& v) { c.harness.eval_episodes = static_cast<int>(to_integer(k, v)); }},
      {"harness.seeds",
       [](RunConfig& c, auto& k, auto& v) {
         c.harness.seeds.clear();
         for (const auto& s : split_list(v)) c.harness.seeds.push_back(to_count(k, s));
       }},
      {"harness.output_dir", [](RunConfig& c, auto&, auto& v) { c.harness.output_dir = v; }},
      {"harness.eval_every", [](RunConfig& c, auto& k, auto& v) { c.harness.eval_every = static_cast<int>(to_integer(k, v)); }},
      {"harness.warmup_steps", [](RunConfig& c, auto& k, auto& v) { c.harness.warmup_steps = static_cast<int>(to_integer(k, v)); }},
      {"harness.stop_at_threshold", [](RunConfig& c, auto& k, auto& v) { c.harness.stop_at_threshold = to_bool(k, v); }},
      {"harness.record_wall_time", [](RunConfig& c, auto& k, auto& v) { c.harness.record_wall_time = to_bool(k, v); }},
      {"harness.log_actions", [](RunConfig& c, auto& k, auto& v) { c.harness.log_actions = to_bool(k, v); }},
      {"harness.save_checkpoint", [](RunConfig& c, auto& k, auto& v) { c.harness.save_checkpoint = to_bool(k, v); }},
      {"harness.baseline_hysteresis", [](RunConfig& c, auto& k, auto& v) { c.harness.baseline_hysteresis = to_double(k, v); }},
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  agent.validate();
  rule.validate();
  env.validate();
  const auto& h = harness;
  if (h.epochs < 0) throw ConfigError("harness.epochs", "must be >= 0");
  if (h.train_days < env.episode_days) throw ConfigError("harness.train_days", "must cover at least one episode");
  if (h.eval_episodes < 1) throw ConfigError("harness.eval_episodes", "must be >= 1");
  if (h.seeds.empty()) throw ConfigError("harness.seeds", "needs at least one seed");
  for (std::size_t a = 0; a < h.seeds.size(); ++a)
    for (std::size_t b = a + 1; b < h.seeds.size(); ++b)
      if (h.seeds[a] == h.seeds[b]) throw ConfigError("harness.seeds", "seeds must be distinct");
  if (h.eval_every < 1) throw ConfigError("harness.eval_every", "must be >= 1");
  if (h.warmup_steps < 0) throw ConfigError("harness.warmup_steps", "must be >= 0");
  if (!(h.baseline_hysteresis >= 0.0)) throw ConfigError("harness.baseline_hysteresis", "must be >= 0");
  // The comfort rule keeps a_min <= a_max only if every band is at least 2m wide.
  for (const auto& seg : env.schedule.segments())
    if (seg.upper - seg.lower < 2.0 * rule.margin)
      throw ConfigError("rule.m", "comfort bands must be at least 2m wide");
}

std::string RunConfig::label() const {
  if (!harness.label.empty()) return harness.label;
  std::ostringstream os;
  os << agents::to_string(agent.variant);
  if (agent.variant != agents::Variant::classical) os << '_' << rule.margin << '_' << rule.saturation_margin;
  return os.str();
}

RunConfig parse_run_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config", std::string("malformed INI: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  RunConfig cfg;
  bool lambda_given = false;
  for (const auto& [section, body] : tree) {
    if (section != "agent" && section != "rule" && section != "env" && section != "harness") {
      if (body.empty()) throw ConfigError(section, "keys must live in [agent], [rule], [env] or [harness]");
      throw ConfigError(section, "unknown section");
    }
    for (const auto& [name, value] : body) {
      const std::string key = section + "." + name;
      const auto it = setters().find(key);
      if (it == setters().end()) throw ConfigError(key, "unknown key");
      it->second(cfg, key, value.get_value<std::string>());
      if (key == "agent.lambda") lambda_given = true;
    }
  }
  if (!lambda_given) cfg.agent.lambda = agents::AgentConfig::default_lambda(cfg.agent.variant);
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_run_config(ss.str());
}

std::string to_ini(const RunConfig& c) {
  std::ostringstream os;
  os << "[agent]\n"
     << "variant = " << agents::to_string(c.agent.variant) << "\n"
     << "gamma = " << real(c.agent.gamma) << "\n"
     << "sigma = " << real(c.agent.sigma) << "\n"
     << "lambda = " << real(c.agent.lambda) << "\n"
     << "tau = " << real(c.agent.tau) << "\n"
     << "policy_delay = " << c.agent.policy_delay << "\n"
     << "target_noise_std = " << real(c.agent.target_noise_std) << "\n"
     << "target_noise_clip = " << real(c.agent.target_noise_clip) << "\n"
     << "batch_size = " << c.agent.batch_size << "\n"
     << "buffer_capacity = " << c.agent.buffer_capacity << "\n"
     << "actor_lr = " << real(c.agent.actor_learning_rate) << "\n"
     << "critic_lr = " << real(c.agent.critic_learning_rate) << "\n"
     << "actor_hidden = " << join(c.agent.actor_hidden) << "\n"
     << "critic_hidden = " << join(c.agent.critic_hidden) << "\n\n"
     << "[rule]\n"
     << "m = " << real(c.rule.margin) << "\n"
     << "n = " << real(c.rule.saturation_margin) << "\n\n"
     << "[env]\n"
     << "alpha = " << real(c.env.energy_weight) << "\n"
     << "max_heat_power = " << real(c.env.max_heat_power) << "\n"
     << "max_cool_power = " << real(c.env.max_cool_power) << "\n"
     << "capacitance = " << real(c.env.capacitance) << "\n"
     << "loss_coefficient = " << real(c.env.loss_coefficient) << "\n"
     << "solar_gain = " << real(c.env.solar_gain) << "\n"
     << "step_minutes = " << c.env.step_minutes << "\n"
     << "episode_days = " << c.env.episode_days << "\n"
     << "season = " << env::to_string(c.env.season) << "\n"
     << "comfort_schedule = " << c.env.schedule.to_string() << "\n"
     << "weather_seed = " << c.weather_seed << "\n";
  if (!c.weather_file.empty()) os << "weather_file = " << c.weather_file << "\n";
  os << "weather_season_mean = " << real(c.env.weather.season_mean) << "\n"
     << "weather_season_dip = " << real(c.env.weather.season_dip) << "\n"
     << "weather_daily_amplitude = " << real(c.env.weather.daily_amplitude) << "\n"
     << "weather_noise_std = " << real(c.env.weather.noise_std) << "\n"
     << "weather_noise_persistence = " << real(c.env.weather.noise_persistence) << "\n"
     << "weather_cloudiness = " << real(c.env.weather.cloudiness) << "\n"
     << "weather_irradiance_noise = " << real(c.env.weather.irradiance_noise) << "\n\n"
     << "[harness]\n";
  if (!c.harness.label.empty()) os << "label = " << c.harness.label << "\n";
  os << "epochs = " << c.harness.epochs << "\n"
     << "train_days = " << c.harness.train_days << "\n"
     << "eval_episodes = " << c.harness.eval_episodes << "\n"
     << "seeds = " << join(c.harness.seeds) << "\n"
     << "output_dir = " << c.harness.output_dir << "\n"
     << "eval_every = " << c.harness.eval_every << "\n"
     << "warmup_steps = " << c.harness.warmup_steps << "\n"
     << "stop_at_threshold = " << (c.harness.stop_at_threshold ? "true" : "false") << "\n"
     << "record_wall_time = " << (c.harness.record_wall_time ? "true" : "false") << "\n"
     << "log_actions = " << (c.harness.log_actions ? "true" : "false") << "\n"
     << "save_checkpoint = " << (c.harness.save_checkpoint ? "true" : "false") << "\n"
     << "baseline_hysteresis = " << real(c.harness.baseline_hysteresis) << "\n";
  return os.str();
}

}  // namespace ruleclip::harness
