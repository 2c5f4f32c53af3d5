#include "mdlamp/bitstring.hpp"

#include <stdexcept>

namespace mdlamp {

BitString BitString::from_bits(std::initializer_list<int> bits) {
  BitString s;
  s.bits_.reserve(bits.size());
  for (int b : bits) s.push_back(b);
  return s;
}

BitString BitString::from_string(std::string_view text) {
  BitString s;
  s.bits_.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1')
      throw std::invalid_argument("BitString::from_string: expected only 0/1");
    s.push_back(c - '0');
  }
  return s;
}

static int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  throw std::invalid_argument("BitString::from_hex: invalid hex digit");
}

BitString BitString::from_hex(std::string_view hex, std::size_t nbits) {
  if (nbits > 4 * hex.size())
    throw std::invalid_argument("BitString::from_hex: nbits exceeds payload");
  std::vector<std::uint8_t> bytes;
  bytes.reserve((hex.size() + 1) / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_nibble(hex[i]);
    int lo = (i + 1 < hex.size()) ? hex_nibble(hex[i + 1]) : 0;
    bytes.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return from_packed(bytes, nbits);
}

BitString BitString::from_packed(const std::vector<std::uint8_t>& bytes,
                                 std::size_t nbits) {
  if (nbits > 8 * bytes.size())
    throw std::invalid_argument("BitString::from_packed: nbits exceeds payload");
  BitString s;
  s.bits_.resize(nbits);
  for (std::size_t k = 0; k < nbits; ++k)
    s.bits_[k] = (bytes[k / 8] >> (k % 8)) & 1;
  return s;
}

BitString BitString::resized(std::size_t n) const {
  BitString s;
  s.bits_ = bits_;
  s.bits_.resize(n, 0);
  return s;
}

std::vector<std::uint8_t> BitString::packed() const {
  std::vector<std::uint8_t> bytes((bits_.size() + 7) / 8, 0);
  for (std::size_t k = 0; k < bits_.size(); ++k)
    if (bits_[k]) bytes[k / 8] |= static_cast<std::uint8_t>(1u << (k % 8));
  return bytes;
}

std::string BitString::to_string() const {
  std::string out;
  out.reserve(bits_.size());
  for (std::uint8_t b : bits_) out.push_back(b ? '1' : '0');
  return out;
}

}  // namespace mdlamp
