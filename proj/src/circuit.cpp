#include "hetmpc/circuit.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "hetmpc/errors.hpp"

namespace hetmpc {

std::string_view kind_name(GateKind kind) {
  switch (kind) {
    case GateKind::kInputP0: return "INPUT_P0";
    case GateKind::kInputP1: return "INPUT_P1";
    case GateKind::kConstZero: return "CONST_ZERO";
    case GateKind::kConstOne: return "CONST_ONE";
    case GateKind::kAdd: return "ADD";
    case GateKind::kMul: return "MUL";
    case GateKind::kXor: return "XOR";
    case GateKind::kAnd: return "AND";
    case GateKind::kNot: return "NOT";
    case GateKind::kOutput: return "OUTPUT";
  }
  return "?";
}

std::size_t arity_of(GateKind kind) {
  switch (kind) {
    case GateKind::kInputP0:
    case GateKind::kInputP1:
    case GateKind::kConstZero:
    case GateKind::kConstOne:
      return 0;
    case GateKind::kNot:
    case GateKind::kOutput:
      return 1;
    default:
      return 2;
  }
}

namespace {

bool allowed_in(GateKind kind, World world) {
  switch (kind) {
    case GateKind::kAdd:
    case GateKind::kMul:
      return world == World::kArithmetic;
    case GateKind::kXor:
    case GateKind::kAnd:
    case GateKind::kNot:
    case GateKind::kConstZero:
    case GateKind::kConstOne:
      return world == World::kBoolean;
    default:
      return true;
  }
}

}  // namespace

CircuitBuilder::CircuitBuilder(World world, RingSpec ring) {
  circuit_.world = world;
  circuit_.ring = world == World::kBoolean ? RingSpec(1) : ring;
}

GateId CircuitBuilder::push(GateKind kind, GateId a, GateId b) {
  const auto id = static_cast<GateId>(circuit_.gates.size());
  Gate g{id, kind, {a, b}, circuit_.world};
  if (arity_of(kind) < 2) g.inputs[1] = 0;
  if (arity_of(kind) < 1) g.inputs[0] = 0;
  circuit_.gates.push_back(g);
  return id;
}

GateId CircuitBuilder::input(unsigned party) {
  const GateId id = push(party == 0 ? GateKind::kInputP0 : GateKind::kInputP1, 0, 0);
  circuit_.input_map[party == 0 ? 0 : 1].push_back(id);
  return id;
}

GateId CircuitBuilder::constant(bool one) {
  return push(one ? GateKind::kConstOne : GateKind::kConstZero, 0, 0);
}

GateId CircuitBuilder::output(GateId a) {
  const GateId id = push(GateKind::kOutput, a, 0);
  circuit_.output_ids.push_back(id);
  return id;
}

Circuit CircuitBuilder::build() {
  Circuit c = std::move(circuit_);
  circuit_ = Circuit{};
  circuit_.world = c.world;
  circuit_.ring = c.ring;
  validate(c);
  return c;
}

void validate(const Circuit& c) {
  std::array<std::size_t, 2> next_input{0, 0};
  std::size_t next_output = 0;
  std::vector<std::uint8_t> from_input(c.gates.size(), 0);

  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    if (g.id != i) throw StructuralError(fmt::format("gate at index {} has id {}", i, g.id));
    if (g.world != c.world) {
      throw StructuralError(fmt::format("gate {} is in the wrong share world", i));
    }
    if (!allowed_in(g.kind, c.world)) {
      throw StructuralError(fmt::format("gate {} of kind {} not allowed in {} world", i,
                                        kind_name(g.kind),
                                        c.world == World::kArithmetic ? "arithmetic" : "boolean"));
    }
    for (GateId in : g.input_ids()) {
      if (in >= g.id) {
        throw StructuralError(
            fmt::format("gate {} reads gate {}: inputs must have smaller ids", g.id, in));
      }
      if (c.gates[in].kind == GateKind::kOutput) {
        throw StructuralError(fmt::format("gate {} reads OUTPUT gate {}", g.id, in));
      }
      from_input[i] |= from_input[in];
    }
    if (g.kind == GateKind::kInputP0 || g.kind == GateKind::kInputP1) {
      const unsigned p = g.kind == GateKind::kInputP0 ? 0 : 1;
      const auto& ids = c.input_map[p];
      if (next_input[p] >= ids.size() || ids[next_input[p]] != g.id) {
        throw StructuralError(fmt::format("input gate {} missing from party {} input map", g.id, p));
      }
      ++next_input[p];
      from_input[i] = 1;
    }
    if (g.kind == GateKind::kOutput) {
      if (next_output >= c.output_ids.size() || c.output_ids[next_output] != g.id) {
        throw StructuralError(fmt::format("output gate {} missing from output list", g.id));
      }
      ++next_output;
      if (!from_input[i]) {
        throw StructuralError(fmt::format("output gate {} does not depend on any input", g.id));
      }
    }
  }
  for (unsigned p = 0; p < 2; ++p) {
    if (next_input[p] != c.input_map[p].size()) {
      throw StructuralError(fmt::format("party {} input map lists non-input gates", p));
    }
  }
  if (next_output != c.output_ids.size()) {
    throw StructuralError("output list names gates that are not OUTPUT gates");
  }
}

LayerPlan assign_layers(const Circuit& c) {
  LayerPlan plan;
  plan.layer_of.assign(c.gates.size(), 0);
  plan.layers.emplace_back();
  for (const Gate& g : c.gates) {
    std::uint32_t layer = 0;
    for (GateId in : g.input_ids()) {
      if (in >= g.id) {
        throw StructuralError(fmt::format("cycle through gate {} (reads gate {})", g.id, in));
      }
      layer = std::max(layer, plan.layer_of[in]);
    }
    if (is_interactive(g.kind)) ++layer;
    plan.layer_of[g.id] = layer;
    if (layer >= plan.layers.size()) plan.layers.resize(layer + 1);
    auto& slot = plan.layers[layer];
    (is_interactive(g.kind) ? slot.interactive : slot.local).push_back(g.id);
  }
  plan.round_count = static_cast<std::size_t>(
      std::count_if(plan.layers.begin(), plan.layers.end(),
                    [](const LayerPlan::Layer& l) { return !l.interactive.empty(); }));
  return plan;
}

std::string_view variant_name(MillionaireVariant v) {
  return v == MillionaireVariant::kRipple ? "ripple" : "tree";
}

MillionaireVariant parse_variant(std::string_view name) {
  if (name == "ripple") return MillionaireVariant::kRipple;
  if (name == "tree") return MillionaireVariant::kTree;
  throw DomainError(fmt::format("unknown millionaire variant '{}'", name));
}

Circuit build_inner_product(std::size_t n, const RingSpec& spec) {
  if (n == 0) throw DomainError("inner product needs at least one element");
  CircuitBuilder b(World::kArithmetic, spec);
  std::vector<GateId> x(n), y(n);
  for (auto& id : x) id = b.input(0);
  for (auto& id : y) id = b.input(1);

  std::vector<GateId> level(n);
  for (std::size_t i = 0; i < n; ++i) level[i] = b.mul(x[i], y[i]);
  // Balanced pairwise reduction; an odd tail carries up unchanged.
  while (level.size() > 1) {
    std::vector<GateId> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(b.add(level[i], level[i + 1]));
    if (level.size() % 2 == 1) next.push_back(level.back());
    level = std::move(next);
  }
  b.output(level.front());
  return b.build();
}

namespace {

// gt_{i+1} = x_i ^ ((x_i ^ gt_i) & (y_i ^ gt_i)), scanning from the LSB.
GateId ripple_gt(CircuitBuilder& b, std::span<const GateId> x, std::span<const GateId> y) {
  GateId gt = b.constant(false);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const GateId t = b.and_(b.xor_(x[i], gt), b.xor_(y[i], gt));
    gt = b.xor_(x[i], t);
  }
  return gt;
}

GateId tree_gt(CircuitBuilder& b, std::span<const GateId> x, std::span<const GateId> y) {
  struct Block {
    GateId gt;
    GateId eq;
  };
  std::vector<Block> level(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    level[i].gt = b.and_(x[i], b.not_(y[i]));
    level[i].eq = b.not_(b.xor_(x[i], y[i]));
  }
  // Adjacent blocks (lo, hi) merge into GT = gt_hi ^ (eq_hi & gt_lo), EQ = eq_hi & eq_lo.
  while (level.size() > 1) {
    std::vector<Block> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
      const Block& lo = level[i];
      const Block& hi = level[i + 1];
      next.push_back({b.xor_(hi.gt, b.and_(hi.eq, lo.gt)), b.and_(hi.eq, lo.eq)});
    }
    if (level.size() % 2 == 1) next.push_back(level.back());
    level = std::move(next);
  }
  return level.front().gt;
}

}  // namespace

Circuit build_millionaire(std::size_t n_bits, MillionaireVariant variant) {
  if (n_bits == 0) throw DomainError("millionaire comparison needs at least one bit");
  CircuitBuilder b(World::kBoolean, RingSpec(1));
  std::vector<GateId> x(n_bits), y(n_bits);
  for (auto& id : x) id = b.input(0);
  for (auto& id : y) id = b.input(1);
  const GateId gt = variant == MillionaireVariant::kRipple ? ripple_gt(b, x, y) : tree_gt(b, x, y);
  b.output(gt);
  return b.build();
}

std::vector<u64> eval_plaintext(const Circuit& c, std::span<const u64> x0,
                                std::span<const u64> x1) {
  const std::array<std::span<const u64>, 2> inputs{x0, x1};
  for (unsigned p = 0; p < 2; ++p) {
    if (inputs[p].size() != c.input_map[p].size()) {
      throw DomainError(fmt::format("party {} supplied {} inputs, circuit expects {}", p,
                                    inputs[p].size(), c.input_map[p].size()));
    }
  }
  const u64 mask = c.world == World::kBoolean ? 1 : c.ring.mask();
  std::vector<u64> v(c.gates.size(), 0);
  std::array<std::size_t, 2> next{0, 0};
  for (const Gate& g : c.gates) {
    const u64 a = arity_of(g.kind) > 0 ? v[g.inputs[0]] : 0;
    const u64 b = arity_of(g.kind) > 1 ? v[g.inputs[1]] : 0;
    u64 out = 0;
    switch (g.kind) {
      case GateKind::kInputP0:
      case GateKind::kInputP1: {
        const unsigned p = g.kind == GateKind::kInputP0 ? 0 : 1;
        out = inputs[p][next[p]++];
        if ((out & ~mask) != 0) {
          throw DomainError(fmt::format("input {} of party {} out of range", out, p));
        }
        break;
      }
      case GateKind::kConstZero: out = 0; break;
      case GateKind::kConstOne: out = 1; break;
      case GateKind::kAdd: out = a + b; break;
      case GateKind::kMul: out = a * b; break;
      case GateKind::kXor: out = a ^ b; break;
      case GateKind::kAnd: out = a & b; break;
      case GateKind::kNot: out = a ^ 1; break;
      case GateKind::kOutput: out = a; break;
    }
    v[g.id] = out & mask;
  }
  std::vector<u64> outputs;
  outputs.reserve(c.output_ids.size());
  for (GateId id : c.output_ids) outputs.push_back(v[id]);
  return outputs;
}

InteractiveCounts count_interactive(const Circuit& c) {
  InteractiveCounts n;
  for (const Gate& g : c.gates) {
    n.n_mul += g.kind == GateKind::kMul;
    n.n_and += g.kind == GateKind::kAnd;
    n.n_output += g.kind == GateKind::kOutput;
  }
  return n;
}

std::string dump_circuit(const Circuit& c) {
  std::string out = fmt::format("world={} l={} inputs0={} inputs1={} outputs={}\n",
                                c.world == World::kArithmetic ? 'A' : 'B', c.ring.bit_length(),
                                c.input_map[0].size(), c.input_map[1].size(), c.output_ids.size());
  for (const Gate& g : c.gates) {
    out += fmt::format("{} {}", g.id, kind_name(g.kind));
    for (GateId in : g.input_ids()) out += fmt::format(" {}", in);
    out += '\n';
  }
  return out;
}

std::vector<u64> unpack_bits(const BitVector& bits) {
  std::vector<u64> out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) out[i] = bits.get(i);
  return out;
}

BitVector pack_bits(std::span<const u64> values) {
  BitVector out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out.set(i, (values[i] & 1) != 0);
  return out;
}

}  // namespace hetmpc
