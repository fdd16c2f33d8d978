#include "hetmpc/session.hpp"

#include <fmt/format.h>

#include <exception>
#include <thread>

#include "hetmpc/errors.hpp"
#include "hetmpc/sharing.hpp"
#include "hetmpc/simd/kernels.hpp"

namespace hetmpc {

Session::Session(PartyId party, Transport& transport, const Circuit& circuit,
                 const LayerPlan& plan, TripleStore pools, ClockMode clock,
                 ThrottleConfig throttle)
    : party_(party),
      transport_(transport),
      circuit_(circuit),
      plan_(plan),
      pools_(std::move(pools)),
      clock_(clock),
      throttle_(throttle),
      meter_(party.value(), std::move(clock), throttle),
      wires_(circuit.gates.size(), 0),
      evaluated_(circuit.gates.size(), 0) {
  if (plan.layer_of.size() != circuit.gates.size()) {
    throw DomainError("layer plan does not belong to this circuit");
  }
}

HelloParams Session::handshake(const HelloParams& local) {
  transport_.send({MsgType::kHello, 0, encode_hello(local)});
  const Frame f = transport_.receive();
  if (f.type != MsgType::kHello) {
    throw ProtocolError(fmt::format("expected HELLO, got message type 0x{:02x}",
                                    static_cast<unsigned>(f.type)));
  }
  const HelloParams remote = decode_hello(f.payload);
  check_hello(local, remote);
  return remote;
}

void Session::check_inputs(std::span<const u64> local_inputs) const {
  const auto& ids = circuit_.input_map[party_.value()];
  if (local_inputs.size() != ids.size()) {
    throw DomainError(fmt::format("party {} has {} input gates but got {} values", party_.value(),
                                  ids.size(), local_inputs.size()));
  }
}

void Session::distribute_inputs(std::span<const u64> local_inputs, SeededRng& rng) {
  check_inputs(local_inputs);
  std::vector<u64> masks(local_inputs.size());
  if (circuit_.world == World::kArithmetic) {
    for (auto& r : masks) r = rng.next_bits(circuit_.ring.bit_length());
  } else {
    masks = unpack_bits(random_bits(local_inputs.size(), rng));
  }
  distribute_inputs_with_masks(local_inputs, masks);
}

void Session::distribute_inputs_with_masks(std::span<const u64> local_inputs,
                                           std::span<const u64> masks) {
  check_inputs(local_inputs);
  if (masks.size() != local_inputs.size()) throw DomainError("one mask per input required");
  const unsigned me = party_.value();
  const auto& own_ids = circuit_.input_map[me];
  const auto& peer_ids = circuit_.input_map[1 - me];
  const bool arith = circuit_.world == World::kArithmetic;
  const RingSpec& ring = circuit_.ring;

  Frame out{MsgType::kInputShare, 0, {}};
  if (arith) {
    for (std::size_t i = 0; i < own_ids.size(); ++i) {
      const auto [mine, theirs] = arith_share_with_mask(local_inputs[i], masks[i], ring);
      wires_[own_ids[i]] = mine.value;
      evaluated_[own_ids[i]] = 1;
    }
    encode_ring_elements(masks, ring, out.payload);
  } else {
    for (std::size_t i = 0; i < own_ids.size(); ++i) {
      if (local_inputs[i] > 1 || masks[i] > 1) throw DomainError("Boolean inputs must be bits");
      wires_[own_ids[i]] = local_inputs[i] ^ masks[i];
      evaluated_[own_ids[i]] = 1;
    }
    out.payload = pack_bits(masks).to_bytes();
  }
  meter_.compute(Step::kInteractive, clock_.costs.interactive_prepare * own_ids.size(),
                 [&] { transport_.send(out); });

  const Frame in = meter_.exchange([&] { return receive_expected(MsgType::kInputShare, 0); });
  meter_.compute(Step::kLayerFinish, clock_.costs.layer_finish * peer_ids.size(), [&] {
    std::vector<u64> shares;
    if (arith) {
      if (in.payload.size() != peer_ids.size() * ring.byte_width()) {
        throw ProtocolError("INPUT_SHARE payload does not match the peer's input count");
      }
      shares = decode_ring_elements(in.payload, peer_ids.size(), ring);
    } else {
      if (in.payload.size() != bytes_for_bits(peer_ids.size())) {
        throw ProtocolError("INPUT_SHARE payload does not match the peer's input count");
      }
      shares = unpack_bits(BitVector::from_bytes(in.payload, peer_ids.size()));
    }
    for (std::size_t i = 0; i < peer_ids.size(); ++i) {
      wires_[peer_ids[i]] = shares[i];
      evaluated_[peer_ids[i]] = 1;
    }
  });
}

Frame Session::receive_expected(MsgType type, std::uint32_t layer) {
  Frame f = transport_.receive();
  if (f.type != type) {
    throw ProtocolError(fmt::format("expected message type 0x{:02x}, got 0x{:02x}",
                                    static_cast<unsigned>(type), static_cast<unsigned>(f.type)));
  }
  if (f.layer_id != layer) {
    throw ProtocolError(fmt::format("frame for layer {} arrived while in layer {}", f.layer_id, layer));
  }
  return f;
}

double Session::local_cost(std::size_t n_gates) const {
  if (circuit_.world == World::kArithmetic) return clock_.costs.local_arith_gate * n_gates;
  return clock_.costs.local_bool_word * static_cast<double>(words_for_bits(n_gates));
}

void Session::evaluate_local(const std::vector<GateId>& gates) {
  const u64 mask = circuit_.world == World::kBoolean ? 1 : circuit_.ring.mask();
  const u64 const_one = party_.is_first() ? 1 : 0;
  for (GateId id : gates) {
    const Gate& g = circuit_.gates[id];
    if (g.kind == GateKind::kInputP0 || g.kind == GateKind::kInputP1) {
      if (!evaluated_[id]) throw DomainError(fmt::format("input gate {} was never shared", id));
      continue;
    }
    const u64 a = arity_of(g.kind) > 0 ? wires_[g.inputs[0]] : 0;
    const u64 b = arity_of(g.kind) > 1 ? wires_[g.inputs[1]] : 0;
    u64 v = 0;
    switch (g.kind) {
      case GateKind::kConstZero: v = 0; break;
      // Party 0 holds the constant in the clear, party 1 holds a zero share.
      case GateKind::kConstOne: v = const_one; break;
      case GateKind::kAdd: v = (a + b) & mask; break;
      case GateKind::kXor: v = a ^ b; break;
      case GateKind::kNot: v = a ^ const_one; break;
      default:
        throw StructuralError(fmt::format("gate {} ({}) is not local", id, kind_name(g.kind)));
    }
    wires_[id] = v;
    evaluated_[id] = 1;
  }
}

namespace {

void split_interactive(const Circuit& c, const std::vector<GateId>& gates,
                       std::vector<GateId>& masked, std::vector<GateId>& outputs) {
  masked.clear();
  outputs.clear();
  for (GateId id : gates) {
    (c.gates[id].kind == GateKind::kOutput ? outputs : masked).push_back(id);
  }
}

}  // namespace

Frame Session::prepare_arith(std::uint32_t layer, const std::vector<GateId>& gates) {
  Pending& p = pending_;
  split_interactive(circuit_, gates, p.masked, p.outputs);
  const std::size_t k = p.masked.size();
  std::vector<u64> x(k), y(k);
  for (std::size_t i = 0; i < k; ++i) {
    x[i] = wires_[circuit_.gates[p.masked[i]].inputs[0]];
    y[i] = wires_[circuit_.gates[p.masked[i]].inputs[1]];
  }
  p.arith = pools_.arith.take(k);
  p.d.resize(k);
  p.e.resize(k);
  const u64 mask = circuit_.ring.mask();
  simd::ring_sub(p.d, x, p.arith.a, mask);
  simd::ring_sub(p.e, y, p.arith.b, mask);
  p.own_outputs.resize(p.outputs.size());
  for (std::size_t i = 0; i < p.outputs.size(); ++i) {
    p.own_outputs[i] = wires_[circuit_.gates[p.outputs[i]].inputs[0]];
  }
  return {MsgType::kLayerData, layer, encode_layer_payload(circuit_.ring, p.d, p.e, p.own_outputs)};
}

void Session::finish_arith(const Frame& peer, const std::vector<GateId>&) {
  Pending& p = pending_;
  const RingSpec& ring = circuit_.ring;
  const ArithLayerValues theirs =
      decode_arith_layer_payload(peer.payload, ring, {p.masked.size(), p.outputs.size()});
  const std::size_t k = p.masked.size();
  std::vector<u64> d(k), e(k), z(k);
  simd::ring_add(d, p.d, theirs.d, ring.mask());
  simd::ring_add(e, p.e, theirs.e, ring.mask());
  simd::arith_beaver_finish(z, d, e, p.arith.a, p.arith.b, p.arith.c, !party_.is_first(),
                            ring.mask());
  for (std::size_t i = 0; i < k; ++i) {
    wires_[p.masked[i]] = z[i];
    evaluated_[p.masked[i]] = 1;
  }
  for (std::size_t i = 0; i < p.outputs.size(); ++i) {
    wires_[p.outputs[i]] = ring.add(p.own_outputs[i], theirs.outputs[i]);
    evaluated_[p.outputs[i]] = 1;
  }
}

Frame Session::prepare_bool(std::uint32_t layer, const std::vector<GateId>& gates) {
  Pending& p = pending_;
  split_interactive(circuit_, gates, p.masked, p.outputs);
  const std::size_t k = p.masked.size();
  BitVector x(k), y(k);
  for (std::size_t i = 0; i < k; ++i) {
    const Gate& g = circuit_.gates[p.masked[i]];
    x.set(i, wires_[g.inputs[0]] & 1);
    y.set(i, wires_[g.inputs[1]] & 1);
  }
  p.boolean = pools_.boolean.take(k);
  p.bd = BitVector(k);
  p.be = BitVector(k);
  simd::xor_words(p.bd.mutable_words(), x.words(), p.boolean.a.words());
  simd::xor_words(p.be.mutable_words(), y.words(), p.boolean.b.words());
  p.bown_outputs = BitVector(p.outputs.size());
  for (std::size_t i = 0; i < p.outputs.size(); ++i) {
    p.bown_outputs.set(i, wires_[circuit_.gates[p.outputs[i]].inputs[0]] & 1);
  }
  return {MsgType::kLayerData, layer, encode_layer_payload(p.bd, p.be, p.bown_outputs)};
}

void Session::finish_bool(const Frame& peer, const std::vector<GateId>&) {
  Pending& p = pending_;
  BoolLayerValues theirs = decode_bool_layer_payload(peer.payload, {p.masked.size(), p.outputs.size()});
  const std::size_t k = p.masked.size();
  theirs.d ^= p.bd;
  theirs.e ^= p.be;
  BitVector z(k);
  simd::bool_beaver_finish(z.mutable_words(), theirs.d.words(), theirs.e.words(),
                           p.boolean.a.words(), p.boolean.b.words(), p.boolean.c.words(),
                           !party_.is_first());
  z.clear_padding();
  for (std::size_t i = 0; i < k; ++i) {
    wires_[p.masked[i]] = z.get(i);
    evaluated_[p.masked[i]] = 1;
  }
  for (std::size_t i = 0; i < p.outputs.size(); ++i) {
    wires_[p.outputs[i]] = p.bown_outputs.get(i) ^ theirs.outputs.get(i);
    evaluated_[p.outputs[i]] = 1;
  }
}

OnlineResult Session::evaluate() {
  const bool arith = circuit_.world == World::kArithmetic;
  const auto& layers = plan_.layers;
  for (std::size_t k = 1; k < layers.size(); ++k) {
    const auto layer_id = static_cast<std::uint32_t>(k);
    const auto& interactive = layers[k].interactive;

    // Step 1: local gates whose producers are all final.
    meter_.compute(Step::kLocal, local_cost(layers[k - 1].local.size()),
                   [&] { evaluate_local(layers[k - 1].local); });

    // Step 2: mask against triples, stage output shares, serialize and send.
    meter_.compute(Step::kInteractive, clock_.costs.interactive_prepare * interactive.size(), [&] {
      transport_.send(arith ? prepare_arith(layer_id, interactive) : prepare_bool(layer_id, interactive));
    });

    // Step 3: wait for the peer's data for this layer.
    const Frame peer =
        meter_.exchange([&] { return receive_expected(MsgType::kLayerData, layer_id); });

    // Step 4: open d and e, finish the products, reconstruct outputs.
    meter_.compute(Step::kLayerFinish, clock_.costs.layer_finish * interactive.size(), [&] {
      if (arith) {
        finish_arith(peer, interactive);
      } else {
        finish_bool(peer, interactive);
      }
    });
  }
  if (!layers.empty() && !layers.back().local.empty()) {
    meter_.compute(Step::kLocal, local_cost(layers.back().local.size()),
                   [&] { evaluate_local(layers.back().local); });
  }

  OnlineResult result;
  result.timings = meter_.finish();
  result.outputs.reserve(circuit_.output_ids.size());
  for (GateId id : circuit_.output_ids) result.outputs.push_back(wires_[id]);
  return result;
}

OnlineResult Session::run_online(std::span<const u64> local_inputs, SeededRng& rng,
                                 const OnlineOptions& options) {
  const auto start = [&] {
    if (options.align_start && clock_.kind == ClockKind::kReal) {
      meter_.start_at(options.align_start(std::chrono::steady_clock::now()));
    } else {
      meter_.start();
    }
  };
  if (options.time_input_sharing) {
    start();
    distribute_inputs(local_inputs, rng);
  } else {
    distribute_inputs(local_inputs, rng);
    start();
  }
  return evaluate();
}

bool Session::confirm_outputs(std::span<const u64> outputs) {
  Frame done{MsgType::kDone, 0, {}};
  encode_ring_elements(outputs, RingSpec(64), done.payload);
  transport_.send(done);
  const Frame peer = receive_expected(MsgType::kDone, 0);
  return peer.payload == done.payload;
}

LoopbackResult run_loopback(LoopbackSetup setup) {
  if (setup.circuit == nullptr || setup.plan == nullptr) throw DomainError("loopback needs a circuit");
  if (setup.clock.kind == ClockKind::kVirtual) setup.clock.barrier = std::make_shared<VirtualBarrier>();
  LoopbackLink link;
  std::array<std::unique_ptr<RecordingTransport>, 2> rec{
      std::make_unique<RecordingTransport>(link.endpoint(0)),
      std::make_unique<RecordingTransport>(link.endpoint(1))};
  LoopbackResult out;
  std::array<std::exception_ptr, 2> errors;
  std::array<bool, 2> agree{false, false};
  // Virtual time needs no alignment; real clocks start together so that
  // start skew on a shared core is not billed to either party.
  VirtualBarrier start_line;

  auto party_main = [&](unsigned p) {
    try {
      Session s(PartyId(p), *rec[p], *setup.circuit, *setup.plan, std::move(setup.pools[p]),
                setup.clock, setup.throttle[p]);
      s.handshake(setup.hello);
      SeededRng masks(setup.mask_seeds[p]);
      OnlineOptions options = setup.options;
      if (setup.clock.kind == ClockKind::kReal) {
        options.align_start = [&start_line, p](std::chrono::steady_clock::time_point own) {
          using Ns = std::chrono::nanoseconds;
          const auto ns = std::chrono::duration_cast<Ns>(own.time_since_epoch()).count();
          const double peer = start_line.exchange(p, static_cast<double>(ns));
          return std::max(own, std::chrono::steady_clock::time_point(
                                   Ns(static_cast<Ns::rep>(peer))));
        };
      }
      out.party[p] = s.run_online(setup.inputs[p], masks, options);
      agree[p] = s.confirm_outputs(out.party[p].outputs);
      out.pools_after[p] = s.release_pools();
    } catch (...) {
      errors[p] = std::current_exception();
      // Unblock the peer so both threads join.
      link.close();
      start_line.close();
      if (setup.clock.barrier) setup.clock.barrier->close();
    }
  };

  {
    std::jthread t1(party_main, 1u);
    party_main(0);
  }
  // Report the root cause, not the peer's resulting disconnect.
  for (const auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const ConnectionError&) {
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (unsigned p = 0; p < 2; ++p) {
    out.transcript[p] = rec[p]->transcript();
    out.frames[p] = rec[p]->frames_sent();
    out.layer_frames[p] = rec[p]->frames_sent(MsgType::kLayerData);
    out.payload_bytes[p] = rec[p]->payload_bytes_sent();
  }
  out.outputs_agree = agree[0] && agree[1] && out.party[0].outputs == out.party[1].outputs;
  return out;
}

}  // namespace hetmpc
