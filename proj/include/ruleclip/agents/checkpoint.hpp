#pragma once

#include <filesystem>

#include "ruleclip/agents/agent.hpp"

namespace ruleclip::agents {

// Agent checkpoint container (little-endian):
//
//   bytes 0..3  magic "RCAG"
//   u32         container version
//   u64 + bytes manifest, a JSON document:
//               {"format": "ruleclip-agent", "version": 1,
//                "entries": [{"name": ..., "offset": ..., "bytes": ...}, ...]}
//   payload     entries back to back; offsets are relative to payload start
//
// Entries: config (JSON echo of AgentConfig, observation width and action
// space), the six networks (actor, critic1, critic2 and their targets) as
// network checkpoints, three optimizer states, the RNG state and update counters.
inline constexpr std::uint32_t kAgentFormatVersion = 1;

void save_agent(const std::filesystem::path& path, const Agent& agent);
Agent load_agent(const std::filesystem::path& path);

}  // namespace ruleclip::agents
