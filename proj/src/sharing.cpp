#include "hetmpc/sharing.hpp"

#include <fmt/format.h>

#include "hetmpc/errors.hpp"

namespace hetmpc {

ArithShare::ArithShare(u64 v, const RingSpec& s) : value(v), spec(s) {
  if (!s.contains(v)) {
    throw DomainError(fmt::format("{} is not an element of Z_2^{}", v, s.bit_length()));
  }
}

ArithShare operator+(const ArithShare& a, const ArithShare& b) {
  if (a.spec != b.spec) throw DomainError("adding shares from different rings");
  return ArithShare(a.spec.add(a.value, b.value), a.spec);
}

BoolShare operator^(const BoolShare& a, const BoolShare& b) { return {a.bits ^ b.bits}; }

ArithSharePair arith_share_with_mask(u64 x, u64 r, const RingSpec& spec) {
  if (!spec.contains(x)) {
    throw DomainError(fmt::format("secret {} outside Z_2^{}", x, spec.bit_length()));
  }
  if (!spec.contains(r)) {
    throw DomainError(fmt::format("mask {} outside Z_2^{}", r, spec.bit_length()));
  }
  return {ArithShare(spec.sub(x, r), spec), ArithShare(r, spec)};
}

ArithSharePair arith_share(u64 x, const RingSpec& spec, SeededRng& rng) {
  if (!spec.contains(x)) {
    throw DomainError(fmt::format("secret {} outside Z_2^{}", x, spec.bit_length()));
  }
  return arith_share_with_mask(x, rng.next_bits(spec.bit_length()), spec);
}

u64 arith_reconstruct(const ArithShare& s0, const ArithShare& s1) {
  if (s0.spec != s1.spec) {
    throw DomainError(fmt::format("share rings differ: Z_2^{} vs Z_2^{}", s0.spec.bit_length(),
                                  s1.spec.bit_length()));
  }
  return s0.spec.add(s0.value, s1.value);
}

BitVector random_bits(std::size_t n_bits, SeededRng& rng) {
  BitVector v(n_bits);
  for (auto& w : v.mutable_words()) w = rng.next();
  v.clear_padding();
  return v;
}

BoolSharePair bool_share_with_mask(const BitVector& x, const BitVector& r) {
  return {BoolShare{x ^ r}, BoolShare{r}};
}

BoolSharePair bool_share(const BitVector& x, SeededRng& rng) {
  return bool_share_with_mask(x, random_bits(x.size(), rng));
}

BitVector bool_reconstruct(const BoolShare& s0, const BoolShare& s1) {
  if (s0.bits.size() != s1.bits.size()) {
    throw DomainError(
        fmt::format("share lengths differ: {} vs {} bits", s0.bits.size(), s1.bits.size()));
  }
  return s0.bits ^ s1.bits;
}

}  // namespace hetmpc
