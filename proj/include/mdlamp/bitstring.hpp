#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace mdlamp {

/// A sequence of bits. Stored one byte per bit for simple indexing; the
/// packed form (little-endian: bit k lives in byte k/8 at position k%8) is
/// the on-disk format for extractor I/O and keys.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t n) : bits_(n, 0) {}

  static BitString from_bits(std::initializer_list<int> bits);
  /// Parses "0110"-style text, most significant position first in reading
  /// order: character i becomes bit i.
  static BitString from_string(std::string_view text);
  /// Decodes hex to bytes (two chars per byte), bytes to bits LSB-first.
  /// nbits trims the tail; nbits must not exceed 4 * hex length.
  static BitString from_hex(std::string_view hex, std::size_t nbits);
  static BitString from_packed(const std::vector<std::uint8_t>& bytes,
                               std::size_t nbits);

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  int bit(std::size_t i) const { return bits_[i]; }
  void set(std::size_t i, int v) { bits_[i] = static_cast<std::uint8_t>(v & 1); }
  void push_back(int v) { bits_.push_back(static_cast<std::uint8_t>(v & 1)); }

  /// Zero-pads (or truncates) to length n.
  BitString resized(std::size_t n) const;

  std::vector<std::uint8_t> packed() const;
  std::string to_string() const;

  bool operator==(const BitString&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

}  // namespace mdlamp
