#pragma once

#include <filesystem>
#include <iosfwd>

#include "ruleclip/nn/network.hpp"

namespace ruleclip::nn {

// Network checkpoint, all integers and reals little-endian:
//
//   bytes 0..3   magic "RCNN"
//   u32          format version (kNetworkFormatVersion)
//   u32          layer count L
//   L x { u32 inputs, u32 outputs, u8 activation (0 relu, 1 tanh, 2 identity) }
//   u64          parameter count P
//   P x f64      parameters: per layer, weights (out x in, row-major) then bias
inline constexpr std::uint32_t kNetworkFormatVersion = 1;

void write_network(std::ostream& os, const Network& net);
Network read_network(std::istream& is);

void save_network(const std::filesystem::path& path, const Network& net);
Network load_network(const std::filesystem::path& path);

}  // namespace ruleclip::nn
