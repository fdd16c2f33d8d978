#pragma once

#include <cstdint>
#include <string_view>

namespace hetmpc {

// splitmix64 finalizer; the fixed 64-bit mixing function behind all seeding.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// sub_seed = mix64(mix64(root ^ fnv1a(label)) + party). Fixed and documented so
// both parties and the dealer derive the same disjoint streams.
std::uint64_t hash64(std::uint64_t root_seed, std::string_view label, std::uint64_t party);

// xoshiro256** seeded through splitmix64. Deterministic, fast, and NOT
// cryptographically secure: this runtime measures performance, not privacy.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed);
  SeededRng(std::uint64_t root_seed, std::string_view label, std::uint64_t party)
      : SeededRng(hash64(root_seed, label, party)) {}

  SeededRng(const SeededRng&) = delete;
  SeededRng& operator=(const SeededRng&) = delete;
  SeededRng(SeededRng&&) = default;
  SeededRng& operator=(SeededRng&&) = default;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t position() const noexcept { return position_; }

  std::uint64_t next();
  // Uniform in [0, 2^bits) for bits in [1, 64].
  std::uint64_t next_bits(unsigned bits);

 private:
  std::uint64_t seed_;
  std::uint64_t position_ = 0;
  std::uint64_t s_[4];
};

}  // namespace hetmpc
