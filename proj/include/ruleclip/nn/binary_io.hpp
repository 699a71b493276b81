#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "ruleclip/error.hpp"

// Little-endian primitives for the checkpoint formats, independent of host order.
namespace ruleclip::nn::binary {

template <typename U>
void write_uint(std::ostream& os, U value) {
  char bytes[sizeof(U)];
  for (std::size_t k = 0; k < sizeof(U); ++k) bytes[k] = static_cast<char>((value >> (8 * k)) & 0xFFu);
  os.write(bytes, sizeof(U));
}

template <typename U>
U read_uint(std::istream& is) {
  unsigned char bytes[sizeof(U)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(U))) throw IoError("checkpoint truncated");
  U value = 0;
  for (std::size_t k = 0; k < sizeof(U); ++k) value |= static_cast<U>(bytes[k]) << (8 * k);
  return value;
}

inline void write_f64(std::ostream& os, double v) { write_uint<std::uint64_t>(os, std::bit_cast<std::uint64_t>(v)); }
inline double read_f64(std::istream& is) { return std::bit_cast<double>(read_uint<std::uint64_t>(is)); }

inline void write_string(std::ostream& os, const std::string& s) {
  write_uint<std::uint64_t>(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& is, std::uint64_t limit = 1u << 30) {
  const auto size = read_uint<std::uint64_t>(is);
  if (size > limit) throw IoError("checkpoint string length out of range");
  std::string s(size, '\0');
  if (!is.read(s.data(), static_cast<std::streamsize>(size))) throw IoError("checkpoint truncated");
  return s;
}

}  // namespace ruleclip::nn::binary
