#include "ruleclip/nn/checkpoint.hpp"

#include <algorithm>
#include <fstream>

#include "ruleclip/error.hpp"
#include "ruleclip/nn/binary_io.hpp"

namespace ruleclip::nn {

namespace {
constexpr char kMagic[4] = {'R', 'C', 'N', 'N'};
}

void write_network(std::ostream& os, const Network& net) {
  os.write(kMagic, 4);
  binary::write_uint<std::uint32_t>(os, kNetworkFormatVersion);
  binary::write_uint<std::uint32_t>(os, static_cast<std::uint32_t>(net.layers().size()));
  for (const auto& l : net.layers()) {
    binary::write_uint<std::uint32_t>(os, static_cast<std::uint32_t>(l.inputs));
    binary::write_uint<std::uint32_t>(os, static_cast<std::uint32_t>(l.outputs));
    binary::write_uint<std::uint8_t>(os, static_cast<std::uint8_t>(l.activation));
  }
  binary::write_uint<std::uint64_t>(os, net.parameter_count());
  for (double p : net.parameters()) binary::write_f64(os, p);
  if (!os) throw IoError("failed writing network checkpoint");
}

Network read_network(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || !std::equal(magic, magic + 4, kMagic)) throw IoError("not a network checkpoint");
  const auto version = binary::read_uint<std::uint32_t>(is);
  if (version != kNetworkFormatVersion) throw IoError("unsupported network checkpoint version");
  const auto count = binary::read_uint<std::uint32_t>(is);
  if (count == 0 || count > 1024) throw IoError("network checkpoint layer count out of range");
  std::vector<LayerSpec> specs;
  for (std::uint32_t k = 0; k < count; ++k) {
    LayerSpec s;
    s.inputs = binary::read_uint<std::uint32_t>(is);
    s.outputs = binary::read_uint<std::uint32_t>(is);
    const auto act = binary::read_uint<std::uint8_t>(is);
    if (act > 2) throw IoError("network checkpoint has unknown activation tag");
    s.activation = static_cast<Activation>(act);
    specs.push_back(s);
  }
  Network net(std::move(specs));
  if (binary::read_uint<std::uint64_t>(is) != net.parameter_count())
    throw IoError("network checkpoint parameter count does not match architecture");
  for (double& p : net.parameters()) p = binary::read_f64(is);
  return net;
}

void save_network(const std::filesystem::path& path, const Network& net) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_network(os, net);
}

Network load_network(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint " + path.string());
  return read_network(is);
}

}  // namespace ruleclip::nn
