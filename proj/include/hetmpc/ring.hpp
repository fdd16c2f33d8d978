#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hetmpc {

using u64 = std::uint64_t;

// The ring Z_{2^l}, 1 <= l <= 64. Elements are carried in u64 and kept reduced.
class RingSpec {
 public:
  static constexpr unsigned kDefaultBits = 16;

  explicit RingSpec(unsigned bit_length = kDefaultBits);

  unsigned bit_length() const noexcept { return bits_; }
  u64 mask() const noexcept { return mask_; }
  // Width of one element on the wire: l rounded up to whole bytes.
  std::size_t byte_width() const noexcept { return (bits_ + 7) / 8; }

  bool contains(u64 v) const noexcept { return (v & ~mask_) == 0; }
  u64 reduce(u64 v) const noexcept { return v & mask_; }

  u64 add(u64 a, u64 b) const noexcept { return (a + b) & mask_; }
  u64 sub(u64 a, u64 b) const noexcept { return (a - b) & mask_; }
  u64 mul(u64 a, u64 b) const noexcept { return (a * b) & mask_; }
  u64 neg(u64 a) const noexcept { return (0 - a) & mask_; }

  friend bool operator==(const RingSpec&, const RingSpec&) = default;

 private:
  unsigned bits_;
  u64 mask_;
};

inline u64 ring_add(u64 a, u64 b, const RingSpec& spec) { return spec.add(a, b); }
inline u64 ring_sub(u64 a, u64 b, const RingSpec& spec) { return spec.sub(a, b); }
inline u64 ring_mul(u64 a, u64 b, const RingSpec& spec) { return spec.mul(a, b); }

class PartyId {
 public:
  constexpr explicit PartyId(unsigned id) : id_(id == 0 ? 0u : 1u) {}
  static PartyId checked(long long id);

  constexpr unsigned value() const noexcept { return id_; }
  constexpr PartyId peer() const noexcept { return PartyId(1 - id_); }
  constexpr bool is_first() const noexcept { return id_ == 0; }

  friend constexpr bool operator==(PartyId, PartyId) = default;

 private:
  unsigned id_;
};

// Little-endian, byte_width() bytes per element.
void encode_ring_elements(std::span<const u64> values, const RingSpec& spec,
                          std::vector<std::uint8_t>& out);
// Decodes exactly `count` elements starting at `in[0]`; throws DomainError on short input.
std::vector<u64> decode_ring_elements(std::span<const std::uint8_t> in, std::size_t count,
                                      const RingSpec& spec);

}  // namespace hetmpc
