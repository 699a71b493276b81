#include "ruleclip/agents/checkpoint.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "ruleclip/error.hpp"
#include "ruleclip/nn/binary_io.hpp"
#include "ruleclip/nn/checkpoint.hpp"

namespace ruleclip::agents {

namespace bin = nn::binary;
using json = nlohmann::json;

namespace {

constexpr char kMagic[4] = {'R', 'C', 'A', 'G'};

void write_optimizer(std::ostream& os, const nn::OptimizerState& s) {
  bin::write_f64(os, s.config.learning_rate);
  bin::write_f64(os, s.config.beta1);
  bin::write_f64(os, s.config.beta2);
  bin::write_f64(os, s.config.epsilon);
  bin::write_uint<std::uint64_t>(os, s.step);
  bin::write_uint<std::uint64_t>(os, s.first_moment.size());
  for (double v : s.first_moment) bin::write_f64(os, v);
  for (double v : s.second_moment) bin::write_f64(os, v);
}

nn::OptimizerState read_optimizer(std::istream& is, std::size_t expected) {
  nn::OptimizerState s;
  s.config.learning_rate = bin::read_f64(is);
  s.config.beta1 = bin::read_f64(is);
  s.config.beta2 = bin::read_f64(is);
  s.config.epsilon = bin::read_f64(is);
  s.step = bin::read_uint<std::uint64_t>(is);
  const auto count = bin::read_uint<std::uint64_t>(is);
  if (count != expected) throw IoError("agent checkpoint: optimizer state does not match its network");
  s.first_moment.resize(count);
  s.second_moment.resize(count);
  for (double& v : s.first_moment) v = bin::read_f64(is);
  for (double& v : s.second_moment) v = bin::read_f64(is);
  return s;
}

json config_echo(const Agent& agent) {
  const auto& c = agent.config();
  return {{"variant", to_string(c.variant)},
          {"gamma", c.gamma},
          {"sigma", c.sigma},
          {"lambda", c.lambda},
          {"tau", c.tau},
          {"policy_delay", c.policy_delay},
          {"target_noise_std", c.target_noise_std},
          {"target_noise_clip", c.target_noise_clip},
          {"batch_size", c.batch_size},
          {"buffer_capacity", c.buffer_capacity},
          {"actor_lr", c.actor_learning_rate},
          {"critic_lr", c.critic_learning_rate},
          {"actor_hidden", c.actor_hidden},
          {"critic_hidden", c.critic_hidden},
          {"observation_width", agent.observation_width()},
          {"action_low", agent.action_space().low},
          {"action_up", agent.action_space().up}};
}

}  // namespace

void save_agent(const std::filesystem::path& path, const Agent& agent) {
  std::vector<std::pair<std::string, std::string>> entries;
  auto add = [&](const std::string& name, auto&& writer) {
    std::ostringstream os(std::ios::binary);
    writer(os);
    entries.emplace_back(name, os.str());
  };
  add("config", [&](std::ostream& os) { os << config_echo(agent).dump(); });
  add("actor", [&](std::ostream& os) { nn::write_network(os, agent.actor()); });
  add("critic1", [&](std::ostream& os) { nn::write_network(os, agent.critic1()); });
  add("critic2", [&](std::ostream& os) { nn::write_network(os, agent.critic2()); });
  add("target_actor", [&](std::ostream& os) { nn::write_network(os, agent.target_actor()); });
  add("target_critic1", [&](std::ostream& os) { nn::write_network(os, agent.target_critic1()); });
  add("target_critic2", [&](std::ostream& os) { nn::write_network(os, agent.target_critic2()); });
  add("actor_optimizer", [&](std::ostream& os) { write_optimizer(os, agent.actor_optimizer()); });
  add("critic1_optimizer", [&](std::ostream& os) { write_optimizer(os, agent.critic1_optimizer()); });
  add("critic2_optimizer", [&](std::ostream& os) { write_optimizer(os, agent.critic2_optimizer()); });
  add("rng", [&](std::ostream& os) { os << agent.rng(); });
  add("counters", [&](std::ostream& os) {
    bin::write_uint<std::uint64_t>(os, agent.critic_updates());
    bin::write_uint<std::uint64_t>(os, agent.actor_updates());
  });

  json manifest{{"format", "ruleclip-agent"}, {"version", kAgentFormatVersion}, {"entries", json::array()}};
  std::uint64_t offset = 0;
  for (const auto& [name, bytes] : entries) {
    manifest["entries"].push_back({{"name", name}, {"offset", offset}, {"bytes", bytes.size()}});
    offset += bytes.size();
  }

  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(kMagic, 4);
  bin::write_uint<std::uint32_t>(os, kAgentFormatVersion);
  bin::write_string(os, manifest.dump());
  for (const auto& entry : entries) os.write(entry.second.data(), static_cast<std::streamsize>(entry.second.size()));
  if (!os) throw IoError("failed writing agent checkpoint " + path.string());
}

Agent load_agent(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || !std::equal(magic, magic + 4, kMagic)) throw IoError(path.string() + " is not an agent checkpoint");
  if (bin::read_uint<std::uint32_t>(is) != kAgentFormatVersion) throw IoError("unsupported agent checkpoint version");
  json manifest;
  try {
    manifest = json::parse(bin::read_string(is));
  } catch (const json::exception& e) {
    throw IoError(std::string("agent checkpoint manifest: ") + e.what());
  }
  const std::string payload((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());

  std::map<std::string, std::string> blobs;
  for (const auto& e : manifest.at("entries")) {
    const auto offset = e.at("offset").get<std::uint64_t>(), bytes = e.at("bytes").get<std::uint64_t>();
    if (offset + bytes > payload.size()) throw IoError("agent checkpoint entry out of range");
    blobs[e.at("name").get<std::string>()] = payload.substr(offset, bytes);
  }
  auto stream = [&](const std::string& name) {
    auto it = blobs.find(name);
    if (it == blobs.end()) throw IoError("agent checkpoint missing entry '" + name + "'");
    return std::istringstream(it->second, std::ios::binary);
  };

  const json cfg_json = json::parse(blobs.at("config"));
  AgentConfig cfg;
  cfg.variant = parse_variant(cfg_json.at("variant"));
  cfg.gamma = cfg_json.at("gamma");
  cfg.sigma = cfg_json.at("sigma");
  cfg.lambda = cfg_json.at("lambda");
  cfg.tau = cfg_json.at("tau");
  cfg.policy_delay = cfg_json.at("policy_delay");
  cfg.target_noise_std = cfg_json.at("target_noise_std");
  cfg.target_noise_clip = cfg_json.at("target_noise_clip");
  cfg.batch_size = cfg_json.at("batch_size");
  cfg.buffer_capacity = cfg_json.at("buffer_capacity");
  cfg.actor_learning_rate = cfg_json.at("actor_lr");
  cfg.critic_learning_rate = cfg_json.at("critic_lr");
  cfg.actor_hidden = cfg_json.at("actor_hidden").get<std::vector<std::size_t>>();
  cfg.critic_hidden = cfg_json.at("critic_hidden").get<std::vector<std::size_t>>();
  rules::ActionSpace space{cfg_json.at("action_low").get<std::vector<double>>(),
                           cfg_json.at("action_up").get<std::vector<double>>()};
  Agent agent(cfg, cfg_json.at("observation_width").get<std::size_t>(), space, 0);

  auto load_net = [&](const std::string& name, nn::Network& into) {
    auto s = stream(name);
    nn::Network net = nn::read_network(s);
    if (!net.same_architecture(into)) throw IoError("agent checkpoint: network '" + name + "' has the wrong shape");
    into = std::move(net);
  };
  load_net("actor", agent.mutable_actor());
  load_net("critic1", agent.mutable_critic1());
  load_net("critic2", agent.mutable_critic2());
  load_net("target_actor", agent.mutable_target_actor());
  load_net("target_critic1", agent.mutable_target_critic1());
  load_net("target_critic2", agent.mutable_target_critic2());
  {
    auto s = stream("actor_optimizer");
    agent.actor_optimizer() = read_optimizer(s, agent.actor().parameter_count());
  }
  {
    auto s = stream("critic1_optimizer");
    agent.critic1_optimizer() = read_optimizer(s, agent.critic1().parameter_count());
  }
  {
    auto s = stream("critic2_optimizer");
    agent.critic2_optimizer() = read_optimizer(s, agent.critic2().parameter_count());
  }
  {
    auto s = stream("rng");
    s >> agent.rng();
  }
  {
    auto s = stream("counters");
    const auto critic = bin::read_uint<std::uint64_t>(s);
    const auto actor = bin::read_uint<std::uint64_t>(s);
    agent.set_counters(critic, actor);
  }
  return agent;
}

}  // namespace ruleclip::agents
