#include "hetmpc/rng.hpp"

#include <bit>

namespace hetmpc {
namespace {

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t hash64(std::uint64_t root_seed, std::string_view label, std::uint64_t party) {
  return mix64(mix64(root_seed ^ fnv1a(label)) + party);
}

SeededRng::SeededRng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t z = seed;
  for (auto& s : s_) {
    z += 0x9e3779b97f4a7c15ULL;
    s = mix64(z);
  }
}

std::uint64_t SeededRng::next() {
  const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = std::rotl(s_[3], 45);
  ++position_;
  return result;
}

std::uint64_t SeededRng::next_bits(unsigned bits) {
  const std::uint64_t v = next();
  return bits >= 64 ? v : v >> (64 - bits);
}

}  // namespace hetmpc
