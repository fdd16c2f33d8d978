#include "hetmpc/preprocessing.hpp"

#include <fmt/format.h>

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hetmpc/errors.hpp"
#include "hetmpc/rng.hpp"
#include "hetmpc/sharing.hpp"

namespace hetmpc {

ArithTriplePool::ArithTriplePool(RingSpec spec, std::vector<u64> a, std::vector<u64> b,
                                 std::vector<u64> c)
    : spec_(spec), a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
  if (a_.size() != b_.size() || a_.size() != c_.size()) {
    throw DomainError("triple component vectors differ in length");
  }
}

ArithTripleBatch ArithTriplePool::take(std::size_t count) {
  if (count > remaining()) {
    throw PoolExhaustedError(fmt::format("arithmetic triple pool exhausted: need {}, {} of {} left",
                                         count, remaining(), size()));
  }
  const std::size_t at = cursor_;
  cursor_ += count;
  return {std::span<const u64>(a_).subspan(at, count), std::span<const u64>(b_).subspan(at, count),
          std::span<const u64>(c_).subspan(at, count)};
}

BoolTriplePool::BoolTriplePool(BitVector a, BitVector b, BitVector c)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
  if (a_.size() != b_.size() || a_.size() != c_.size()) {
    throw DomainError("triple component vectors differ in length");
  }
}

BoolTripleBatch BoolTriplePool::take(std::size_t count) {
  if (count > remaining()) {
    throw PoolExhaustedError(fmt::format("Boolean triple pool exhausted: need {}, {} of {} left",
                                         count, remaining(), size()));
  }
  const std::size_t at = cursor_;
  cursor_ += count;
  return {a_.slice(at, count), b_.slice(at, count), c_.slice(at, count)};
}

std::pair<ArithTriplePool, ArithTriplePool> deal_arith_triples(std::size_t count,
                                                               const RingSpec& spec,
                                                               std::uint64_t seed) {
  SeededRng rng(seed, "triples/arith", 0);
  const unsigned l = spec.bit_length();
  std::vector<u64> a0(count), b0(count), c0(count), a1(count), b1(count), c1(count);
  for (std::size_t i = 0; i < count; ++i) {
    const u64 a = rng.next_bits(l);
    const u64 b = rng.next_bits(l);
    const u64 c = spec.mul(a, b);
    a0[i] = rng.next_bits(l);
    b0[i] = rng.next_bits(l);
    c0[i] = rng.next_bits(l);
    a1[i] = spec.sub(a, a0[i]);
    b1[i] = spec.sub(b, b0[i]);
    c1[i] = spec.sub(c, c0[i]);
  }
  return {ArithTriplePool(spec, std::move(a0), std::move(b0), std::move(c0)),
          ArithTriplePool(spec, std::move(a1), std::move(b1), std::move(c1))};
}

std::pair<BoolTriplePool, BoolTriplePool> deal_bool_triples(std::size_t bit_count,
                                                            std::uint64_t seed) {
  SeededRng rng(seed, "triples/bool", 0);
  const BitVector a = random_bits(bit_count, rng);
  const BitVector b = random_bits(bit_count, rng);
  const BitVector c = a & b;
  BitVector a0 = random_bits(bit_count, rng);
  BitVector b0 = random_bits(bit_count, rng);
  BitVector c0 = random_bits(bit_count, rng);
  BitVector a1 = a ^ a0, b1 = b ^ b0, c1 = c ^ c0;
  return {BoolTriplePool(std::move(a0), std::move(b0), std::move(c0)),
          BoolTriplePool(std::move(a1), std::move(b1), std::move(c1))};
}

TripleBudget budget_for(const Circuit& c) {
  const InteractiveCounts n = count_interactive(c);
  return {n.n_mul, n.n_and};
}

std::pair<TripleStore, TripleStore> deal_for(const Circuit& c, std::size_t repetitions,
                                             std::uint64_t seed) {
  const TripleBudget budget = budget_for(c);
  std::pair<TripleStore, TripleStore> out;
  if (budget.n_arith > 0) {
    auto [p0, p1] = deal_arith_triples(budget.n_arith * repetitions, c.ring, seed);
    out.first.arith = std::move(p0);
    out.second.arith = std::move(p1);
  }
  if (budget.n_bool > 0) {
    auto [p0, p1] = deal_bool_triples(budget.n_bool * repetitions, seed);
    out.first.boolean = std::move(p0);
    out.second.boolean = std::move(p1);
  }
  return out;
}

namespace {

void put_le(std::ostream& out, u64 v, std::size_t width) {
  for (std::size_t i = 0; i < width; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

u64 get_le(std::istream& in, std::size_t width) {
  u64 v = 0;
  for (std::size_t i = 0; i < width; ++i) {
    const int ch = in.get();
    if (ch == std::char_traits<char>::eof()) throw DomainError("triple file truncated");
    v |= u64(static_cast<unsigned char>(ch)) << (8 * i);
  }
  return v;
}

}  // namespace

void write_pool(std::ostream& out, const ArithTriplePool& pool) {
  const RingSpec& ring = pool.ring();
  out << fmt::format("TRIP v1 A {} {}\n", ring.bit_length(), pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const ArithTriple t = pool.at(i);
    put_le(out, t.a, ring.byte_width());
    put_le(out, t.b, ring.byte_width());
    put_le(out, t.c, ring.byte_width());
  }
}

void write_pool(std::ostream& out, const BoolTriplePool& pool) {
  out << fmt::format("TRIP v1 B 1 {}\n", pool.size());
  for (std::size_t w = 0; w < words_for_bits(pool.size()); ++w) {
    put_le(out, pool.a().words()[w], 8);
    put_le(out, pool.b().words()[w], 8);
    put_le(out, pool.c().words()[w], 8);
  }
}

void write_store(const std::string& path, World world, const TripleStore& store) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write triple file '{}'", path));
  if (world == World::kArithmetic) {
    write_pool(out, store.arith);
  } else {
    write_pool(out, store.boolean);
  }
}

TripleStore read_store(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw DomainError("triple file has no header");
  std::istringstream hs(header);
  std::string magic, version, world;
  unsigned bits = 0;
  std::size_t count = 0;
  if (!(hs >> magic >> version >> world >> bits >> count) || magic != "TRIP" || version != "v1" ||
      (world != "A" && world != "B")) {
    throw DomainError(fmt::format("bad triple file header '{}'", header));
  }
  TripleStore store;
  if (world == "A") {
    const RingSpec ring(bits);
    std::vector<u64> a(count), b(count), c(count);
    for (std::size_t i = 0; i < count; ++i) {
      a[i] = ring.reduce(get_le(in, ring.byte_width()));
      b[i] = ring.reduce(get_le(in, ring.byte_width()));
      c[i] = ring.reduce(get_le(in, ring.byte_width()));
    }
    store.arith = ArithTriplePool(ring, std::move(a), std::move(b), std::move(c));
  } else {
    const std::size_t words = words_for_bits(count);
    std::vector<std::uint64_t> a(words), b(words), c(words);
    for (std::size_t w = 0; w < words; ++w) {
      a[w] = get_le(in, 8);
      b[w] = get_le(in, 8);
      c[w] = get_le(in, 8);
    }
    store.boolean = BoolTriplePool(BitVector(count, std::move(a)), BitVector(count, std::move(b)),
                                   BitVector(count, std::move(c)));
  }
  return store;
}

TripleStore read_store(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open triple file '{}'", path));
  return read_store(in);
}

}  // namespace hetmpc
