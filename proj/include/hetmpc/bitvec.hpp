#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hetmpc {

// Packed bit vector, LSB-first: bit i lives in word i/64 at position i%64,
// which is byte i/8 at position i%8 in the serialized form. Pad bits past
// size() in the last word are always zero.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t n_bits);
  BitVector(std::size_t n_bits, std::vector<std::uint64_t> words);

  // "1011" -> bits MSB..LSB as written, i.e. bit 0 is the last character.
  static BitVector from_binary(const std::string& msb_first);
  static BitVector from_u64(std::uint64_t value, std::size_t n_bits);
  static BitVector from_bytes(std::span<const std::uint8_t> bytes, std::size_t n_bits);

  std::size_t size() const noexcept { return n_bits_; }
  std::size_t word_count() const noexcept { return words_.size(); }
  bool empty() const noexcept { return n_bits_ == 0; }

  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool v);

  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<std::uint64_t> mutable_words() noexcept { return words_; }
  // Re-zero pad bits after writing through mutable_words().
  void clear_padding() noexcept;

  // Bits [start, start + len) as a new vector.
  BitVector slice(std::size_t start, std::size_t len) const;
  std::uint64_t to_u64() const;  // requires size() <= 64
  std::string to_binary() const;  // inverse of from_binary
  std::vector<std::uint8_t> to_bytes() const;
  void append_bytes(std::vector<std::uint8_t>& out) const;

  BitVector& operator^=(const BitVector& other);
  BitVector& operator&=(const BitVector& other);
  friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
  friend BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }
  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::size_t n_bits_ = 0;
  std::vector<std::uint64_t> words_;
};

constexpr std::size_t words_for_bits(std::size_t n_bits) { return (n_bits + 63) / 64; }
constexpr std::size_t bytes_for_bits(std::size_t n_bits) { return (n_bits + 7) / 8; }

}  // namespace hetmpc
