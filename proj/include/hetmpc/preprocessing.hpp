#pragma once

// Trusted-dealer multiplication triples. The dealer is insecure by
// construction: it stands in for the offline phase so that the online
// phase can be timed in isolation.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hetmpc/bitvec.hpp"
#include "hetmpc/circuit.hpp"
#include "hetmpc/ring.hpp"

namespace hetmpc {

struct ArithTriple {
  u64 a = 0;
  u64 b = 0;
  u64 c = 0;
  friend bool operator==(const ArithTriple&, const ArithTriple&) = default;
};

// Views into a contiguous run of arithmetic triples handed out by a pool.
struct ArithTripleBatch {
  std::span<const u64> a;
  std::span<const u64> b;
  std::span<const u64> c;
  std::size_t size() const { return a.size(); }
};

class ArithTriplePool {
 public:
  ArithTriplePool() = default;
  ArithTriplePool(RingSpec spec, std::vector<u64> a, std::vector<u64> b, std::vector<u64> c);

  static constexpr World world() { return World::kArithmetic; }
  const RingSpec& ring() const { return spec_; }
  std::size_t size() const { return a_.size(); }
  std::size_t cursor() const { return cursor_; }
  std::size_t remaining() const { return a_.size() - cursor_; }
  ArithTriple at(std::size_t i) const { return {a_.at(i), b_.at(i), c_.at(i)}; }

  // Next `count` unused triples; throws PoolExhaustedError instead of reusing.
  ArithTripleBatch take(std::size_t count);

  friend bool operator==(const ArithTriplePool&, const ArithTriplePool&) = default;

 private:
  RingSpec spec_;
  std::vector<u64> a_, b_, c_;
  std::size_t cursor_ = 0;
};

// Bit-sliced AND triples; one triple per bit position.
struct BoolTripleBatch {
  BitVector a;
  BitVector b;
  BitVector c;
  std::size_t size() const { return a.size(); }
};

class BoolTriplePool {
 public:
  BoolTriplePool() = default;
  BoolTriplePool(BitVector a, BitVector b, BitVector c);

  static constexpr World world() { return World::kBoolean; }
  std::size_t size() const { return a_.size(); }
  std::size_t cursor() const { return cursor_; }
  std::size_t remaining() const { return a_.size() - cursor_; }
  const BitVector& a() const { return a_; }
  const BitVector& b() const { return b_; }
  const BitVector& c() const { return c_; }

  BoolTripleBatch take(std::size_t count);

  friend bool operator==(const BoolTriplePool&, const BoolTriplePool&) = default;

 private:
  BitVector a_, b_, c_;
  std::size_t cursor_ = 0;
};

// What one party brings to a session.
struct TripleStore {
  ArithTriplePool arith;
  BoolTriplePool boolean;
};

std::pair<ArithTriplePool, ArithTriplePool> deal_arith_triples(std::size_t count,
                                                               const RingSpec& spec,
                                                               std::uint64_t seed);
std::pair<BoolTriplePool, BoolTriplePool> deal_bool_triples(std::size_t bit_count,
                                                            std::uint64_t seed);

struct TripleBudget {
  std::size_t n_arith = 0;
  std::size_t n_bool = 0;
  friend bool operator==(const TripleBudget&, const TripleBudget&) = default;
};
TripleBudget budget_for(const Circuit& c);

// Deals budget_for(c) * repetitions triples of the circuit's world.
std::pair<TripleStore, TripleStore> deal_for(const Circuit& c, std::size_t repetitions,
                                             std::uint64_t seed);

// Pool files: text header "TRIP v1 <A|B> <l> <count>\n" followed by
// little-endian records. Arithmetic: (a, b, c) per triple, each ceil(l/8)
// bytes. Boolean: (a, b, c) u64 words per 64 triples, l written as 1.
void write_pool(std::ostream& out, const ArithTriplePool& pool);
void write_pool(std::ostream& out, const BoolTriplePool& pool);
void write_store(const std::string& path, World world, const TripleStore& store);
TripleStore read_store(std::istream& in);
TripleStore read_store(const std::string& path);

}  // namespace hetmpc
