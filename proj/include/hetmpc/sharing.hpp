#pragma once

#include <utility>

#include "hetmpc/bitvec.hpp"
#include "hetmpc/ring.hpp"
#include "hetmpc/rng.hpp"

namespace hetmpc {

// One party's additive share <x>^A_i of a ring element.
struct ArithShare {
  u64 value = 0;
  RingSpec spec;

  ArithShare() = default;
  ArithShare(u64 v, const RingSpec& s);

  friend bool operator==(const ArithShare&, const ArithShare&) = default;
};

ArithShare operator+(const ArithShare& a, const ArithShare& b);

// One party's XOR share <x>^B_i of a bit vector.
struct BoolShare {
  BitVector bits;

  friend bool operator==(const BoolShare&, const BoolShare&) = default;
};

BoolShare operator^(const BoolShare& a, const BoolShare& b);

// {holder share, peer share}: holder keeps x - r, peer receives r.
using ArithSharePair = std::pair<ArithShare, ArithShare>;
using BoolSharePair = std::pair<BoolShare, BoolShare>;

ArithSharePair arith_share(u64 x, const RingSpec& spec, SeededRng& rng);
ArithSharePair arith_share_with_mask(u64 x, u64 r, const RingSpec& spec);
u64 arith_reconstruct(const ArithShare& s0, const ArithShare& s1);

BoolSharePair bool_share(const BitVector& x, SeededRng& rng);
BoolSharePair bool_share_with_mask(const BitVector& x, const BitVector& r);
BitVector bool_reconstruct(const BoolShare& s0, const BoolShare& s1);

BitVector random_bits(std::size_t n_bits, SeededRng& rng);

}  // namespace hetmpc
