#pragma once

// Little-endian binary helpers and the 64-bit FNV-1a hash used for ball
// identities and config hashes.

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "sosgap/error.hpp"

namespace sosgap::io {

inline void put_u8(std::ostream& os, std::uint8_t v) {
  os.put(static_cast<char>(v));
}

inline void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}

inline void put_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  put_u64(os, bits);
}

inline void put_bytes(std::ostream& os, std::string_view s) {
  put_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void read_exact(std::istream& is, char* dst, std::size_t n) {
  is.read(dst, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n)
    fail(ErrorCode::Format, "unexpected end of binary stream");
}

inline std::uint8_t get_u8(std::istream& is) {
  char c;
  read_exact(is, &c, 1);
  return static_cast<std::uint8_t>(c);
}

inline std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  read_exact(is, reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

inline std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  read_exact(is, reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

inline double get_f64(std::istream& is) {
  std::uint64_t bits = get_u64(is);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

inline std::string get_bytes(std::istream& is, std::size_t max_len = 1u << 30) {
  std::uint32_t n = get_u32(is);
  if (n > max_len) fail(ErrorCode::Format, "byte string length out of range");
  std::string s(n, '\0');
  if (n) read_exact(is, s.data(), n);
  return s;
}

class Fnv1a {
 public:
  void update(std::string_view data) {
    for (unsigned char c : data) {
      h_ ^= c;
      h_ *= 0x100000001b3ULL;
    }
  }
  void update_u64(std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    update(std::string_view(b, 8));
  }
  std::uint64_t digest() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string to_hex(std::string_view bytes);
std::string from_hex(std::string_view hex);
std::string hex64(std::uint64_t v);

}  // namespace sosgap::io
