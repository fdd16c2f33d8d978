#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hetmpc/bitvec.hpp"
#include "hetmpc/ring.hpp"

namespace hetmpc {

enum class World : std::uint8_t { kArithmetic = 0, kBoolean = 1 };

enum class GateKind : std::uint8_t {
  kInputP0,
  kInputP1,
  kConstZero,
  kConstOne,
  kAdd,
  kMul,
  kXor,
  kAnd,
  kNot,
  kOutput,
};

using GateId = std::uint32_t;

std::string_view kind_name(GateKind kind);
// MUL, AND and OUTPUT need an exchange with the peer; everything else is local.
constexpr bool is_interactive(GateKind kind) {
  return kind == GateKind::kMul || kind == GateKind::kAnd || kind == GateKind::kOutput;
}
constexpr bool is_source(GateKind kind) {
  return kind == GateKind::kInputP0 || kind == GateKind::kInputP1 ||
         kind == GateKind::kConstZero || kind == GateKind::kConstOne;
}
std::size_t arity_of(GateKind kind);

struct Gate {
  GateId id = 0;
  GateKind kind = GateKind::kConstZero;
  std::array<GateId, 2> inputs{0, 0};
  World world = World::kArithmetic;

  std::span<const GateId> input_ids() const { return {inputs.data(), arity_of(kind)}; }
  friend bool operator==(const Gate&, const Gate&) = default;
};

// Gates are numbered topologically: every input id is smaller than the gate's own.
struct Circuit {
  World world = World::kArithmetic;
  RingSpec ring{1};
  std::vector<Gate> gates;
  std::array<std::vector<GateId>, 2> input_map;
  std::vector<GateId> output_ids;

  std::size_t input_count(unsigned party) const { return input_map[party].size(); }
  friend bool operator==(const Circuit&, const Circuit&) = default;
};

class CircuitBuilder {
 public:
  CircuitBuilder(World world, RingSpec ring);

  GateId input(unsigned party);
  GateId constant(bool one);
  GateId add(GateId a, GateId b) { return push(GateKind::kAdd, a, b); }
  GateId mul(GateId a, GateId b) { return push(GateKind::kMul, a, b); }
  GateId xor_(GateId a, GateId b) { return push(GateKind::kXor, a, b); }
  GateId and_(GateId a, GateId b) { return push(GateKind::kAnd, a, b); }
  GateId not_(GateId a) { return push(GateKind::kNot, a, 0); }
  GateId output(GateId a);

  // Validates and hands over the circuit; the builder is left empty.
  Circuit build();

 private:
  GateId push(GateKind kind, GateId a, GateId b);
  Circuit circuit_;
};

// Throws StructuralError describing the first violated invariant.
void validate(const Circuit& c);

struct LayerPlan {
  struct Layer {
    std::vector<GateId> local;
    std::vector<GateId> interactive;
  };
  std::vector<std::uint32_t> layer_of;
  // layers[0] holds sources and local gates over them; every later layer
  // holds at least one interactive gate and is one exchange round.
  std::vector<Layer> layers;
  std::size_t round_count = 0;
};

LayerPlan assign_layers(const Circuit& c);

enum class MillionaireVariant : std::uint8_t { kRipple = 0, kTree = 1 };

std::string_view variant_name(MillionaireVariant v);
MillionaireVariant parse_variant(std::string_view name);

// Sum_i x_i * y_i mod 2^l, party 0 holds x and party 1 holds y.
Circuit build_inner_product(std::size_t n, const RingSpec& spec);
// One output bit, 1 iff x > y as unsigned n_bits-wide integers (LSB-first inputs).
Circuit build_millionaire(std::size_t n_bits, MillionaireVariant variant);

// Gate values over plaintext, one u64 per input gate (0/1 in the Boolean world).
std::vector<u64> eval_plaintext(const Circuit& c, std::span<const u64> x0, std::span<const u64> x1);

struct InteractiveCounts {
  std::size_t n_mul = 0;
  std::size_t n_and = 0;
  std::size_t n_output = 0;
  friend bool operator==(const InteractiveCounts&, const InteractiveCounts&) = default;
};
InteractiveCounts count_interactive(const Circuit& c);

// `world=B l=1 inputs0=4 inputs1=4 outputs=1` followed by `<id> <KIND> [<in1> [<in2>]]` lines.
std::string dump_circuit(const Circuit& c);

// One u64 per bit, bit 0 first.
std::vector<u64> unpack_bits(const BitVector& bits);
BitVector pack_bits(std::span<const u64> values);

}  // namespace hetmpc
