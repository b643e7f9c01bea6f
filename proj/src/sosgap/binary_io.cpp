#include "sosgap/binary_io.hpp"

namespace sosgap::io {

namespace {
constexpr char kDigits[] = "0123456789abcdef";

int nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

std::string to_hex(std::string_view bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out.push_back(kDigits[c >> 4]);
    out.push_back(kDigits[c & 0xf]);
  }
  return out;
}

std::string from_hex(std::string_view hex) {
  if (hex.size() % 2) fail(ErrorCode::Format, "odd-length hex string");
  std::string out(hex.size() / 2, '\0');
  for (std::size_t k = 0; k < out.size(); ++k) {
    int hi = nibble(hex[2 * k]), lo = nibble(hex[2 * k + 1]);
    if (hi < 0 || lo < 0) fail(ErrorCode::Format, "invalid hex digit");
    out[k] = static_cast<char>((hi << 4) | lo);
  }
  return out;
}

std::string hex64(std::uint64_t v) {
  std::string out(16, '0');
  for (int k = 15; k >= 0; --k, v >>= 4) out[static_cast<std::size_t>(k)] = kDigits[v & 0xf];
  return out;
}

}  // namespace sosgap::io
