#include <gtest/gtest.h>

#include <thread>
#include <unistd.h>

#include "hetmpc/errors.hpp"
#include "hetmpc/session.hpp"
#include "hetmpc/sharing.hpp"

namespace hetmpc {
namespace {

std::vector<u64> bits_of(u64 v, std::size_t n) {
  std::vector<u64> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (v >> i) & 1;
  return out;
}

// Splits a concatenation of encoded frames.
std::vector<Frame> split_frames(const std::vector<std::uint8_t>& bytes) {
  std::vector<Frame> out;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const std::size_t len = bytes[pos] | bytes[pos + 1] << 8 | bytes[pos + 2] << 16 |
                            static_cast<std::size_t>(bytes[pos + 3]) << 24;
    const std::size_t end = pos + kFrameHeaderBytes + len;
    out.push_back(decode_frame({bytes.data() + pos, end - pos}));
    pos = end;
  }
  return out;
}

LoopbackResult run_pair(const Circuit& c, const LayerPlan& plan, std::vector<u64> x0,
                        std::vector<u64> x1, std::uint64_t seed,
                        ClockMode clock = ClockMode::virtual_clock(0.1),
                        std::array<double, 2> throttle = {1, 1}) {
  LoopbackSetup s;
  s.circuit = &c;
  s.plan = &plan;
  auto [p0, p1] = deal_for(c, 1, seed);
  s.pools = {std::move(p0), std::move(p1)};
  s.inputs = {std::move(x0), std::move(x1)};
  s.mask_seeds = {hash64(seed, "m", 0), hash64(seed, "m", 1)};
  s.clock = clock;
  s.throttle = {ThrottleConfig{throttle[0]}, ThrottleConfig{throttle[1]}};
  return run_loopback(std::move(s));
}

TEST(Loopback, InnerProductExample) {
  const Circuit c = build_inner_product(2, RingSpec(16));
  const LayerPlan plan = assign_layers(c);
  const auto r = run_pair(c, plan, {3, 5}, {7, 11}, 1);
  EXPECT_EQ(r.party[0].outputs, std::vector<u64>{76});
  EXPECT_EQ(r.party[1].outputs, std::vector<u64>{76});
  EXPECT_TRUE(r.outputs_agree);
}

TEST(Loopback, MillionaireExhaustiveFourBits) {
  for (auto v : {MillionaireVariant::kRipple, MillionaireVariant::kTree}) {
    const Circuit c = build_millionaire(4, v);
    const LayerPlan plan = assign_layers(c);
    for (u64 x = 0; x < 16; ++x) {
      for (u64 y = 0; y < 16; ++y) {
        const auto r = run_pair(c, plan, bits_of(x, 4), bits_of(y, 4), x * 16 + y);
        ASSERT_EQ(r.party[0].outputs, std::vector<u64>{x > y ? 1u : 0u}) << x << ">" << y;
        ASSERT_TRUE(r.outputs_agree);
      }
    }
  }
}

TEST(Loopback, BeaverWorkedExample) {
  // x=3, y=5, triple a=2 b=7 c=14 (all held by party 0): d=1, e=65534, z=15.
  const Circuit c = build_inner_product(1, RingSpec(16));
  const LayerPlan plan = assign_layers(c);
  const RingSpec r(16);
  LoopbackSetup s;
  s.circuit = &c;
  s.plan = &plan;
  s.pools[0].arith = ArithTriplePool(r, {2}, {7}, {14});
  s.pools[1].arith = ArithTriplePool(r, {0}, {0}, {0});
  s.inputs = {std::vector<u64>{3}, std::vector<u64>{5}};
  s.mask_seeds = {1, 2};
  s.clock = ClockMode::virtual_clock(0.1);
  const auto res = run_loopback(std::move(s));
  EXPECT_EQ(res.party[0].outputs, std::vector<u64>{15});

  std::array<ArithLayerValues, 2> sent;
  for (unsigned p = 0; p < 2; ++p) {
    for (const Frame& f : split_frames(res.transcript[p])) {
      if (f.type == MsgType::kLayerData && f.layer_id == 1) {
        sent[p] = decode_arith_layer_payload(f.payload, r, {1, 0});
      }
    }
  }
  EXPECT_EQ(r.add(sent[0].d[0], sent[1].d[0]), 1u);
  EXPECT_EQ(r.add(sent[0].e[0], sent[1].e[0]), 65534u);
}

TEST(Session, InputDistributionStoresShares) {
  const Circuit c = build_inner_product(1, RingSpec(16));
  const LayerPlan plan = assign_layers(c);
  LoopbackLink link;
  Session s0(PartyId(0), link.endpoint(0), c, plan, {}, ClockMode::real(), {});
  Session s1(PartyId(1), link.endpoint(1), c, plan, {}, ClockMode::real(), {});
  std::jthread t([&] { s1.distribute_inputs_with_masks(std::vector<u64>{9}, std::vector<u64>{4}); });
  s0.distribute_inputs_with_masks(std::vector<u64>{76}, std::vector<u64>{100});
  t.join();
  const GateId x = c.input_map[0][0], y = c.input_map[1][0];
  EXPECT_EQ(s0.wire_store()[x], 65512u);
  EXPECT_EQ(s1.wire_store()[x], 100u);
  EXPECT_EQ(s1.wire_store()[y], 5u);
  EXPECT_EQ(s0.wire_store()[y], 4u);
}

TEST(Session, InputCountMismatch) {
  const Circuit c = build_inner_product(3, RingSpec(16));
  const LayerPlan plan = assign_layers(c);
  LoopbackLink link;
  Session s0(PartyId(0), link.endpoint(0), c, plan, {}, ClockMode::real(), {});
  SeededRng rng(1);
  EXPECT_THROW(s0.distribute_inputs(std::vector<u64>{1, 2}, rng), DomainError);
}

TEST(Session, WrongLayerIdIsProtocolError) {
  const Circuit c = build_inner_product(1, RingSpec(16));
  const LayerPlan plan = assign_layers(c);
  auto [p0, p1] = deal_for(c, 1, 3);
  LoopbackLink link;
  Session s0(PartyId(0), link.endpoint(0), c, plan, std::move(p0), ClockMode::real(), {});
  Transport& peer = link.endpoint(1);
  peer.send({MsgType::kInputShare, 0, {0x05, 0x00}});
  peer.send({MsgType::kLayerData, 2, {0, 0, 0, 0}});
  s0.distribute_inputs_with_masks(std::vector<u64>{3}, std::vector<u64>{1});
  EXPECT_THROW(s0.evaluate(), ProtocolError);
}

TEST(Session, ExhaustedPoolFailsRun) {
  const Circuit c = build_inner_product(4, RingSpec(16));
  const LayerPlan plan = assign_layers(c);
  LoopbackSetup s;
  s.circuit = &c;
  s.plan = &plan;
  auto [p0, p1] = deal_arith_triples(3, RingSpec(16), 1);
  s.pools[0].arith = std::move(p0);
  s.pools[1].arith = std::move(p1);
  s.inputs = {std::vector<u64>{1, 2, 3, 4}, std::vector<u64>{1, 2, 3, 4}};
  s.clock = ClockMode::virtual_clock(0.1);
  EXPECT_THROW(run_loopback(std::move(s)), PoolExhaustedError);
}

TEST(Session, HandshakeMismatch) {
  const Circuit c = build_inner_product(1, RingSpec(16));
  const LayerPlan plan = assign_layers(c);
  LoopbackLink link;
  Session s0(PartyId(0), link.endpoint(0), c, plan, {}, ClockMode::real(), {});
  HelloParams theirs;
  theirs.bit_length = 32;
  link.endpoint(1).send({MsgType::kHello, 0, encode_hello(theirs)});
  try {
    s0.handshake(HelloParams{});
    FAIL();
  } catch (const HandshakeError& e) {
    EXPECT_EQ(e.field(), "l");
  }
}

TEST(Loopback, FramesMatchRoundsAndAreSymmetric) {
  for (const Circuit& c : {build_inner_product(1, RingSpec(16)), build_inner_product(300, RingSpec(32)),
                           build_millionaire(17, MillionaireVariant::kRipple),
                           build_millionaire(17, MillionaireVariant::kTree)}) {
    const LayerPlan plan = assign_layers(c);
    const auto r = run_pair(c, plan, std::vector<u64>(c.input_count(0), 1),
                            std::vector<u64>(c.input_count(1), 0), 5);
    EXPECT_EQ(r.layer_frames[0], plan.round_count);
    EXPECT_EQ(r.layer_frames[1], plan.round_count);
    EXPECT_EQ(r.frames[0], r.frames[1]);
    EXPECT_EQ(r.payload_bytes[0], r.payload_bytes[1]);
    EXPECT_EQ(r.transcript[0].size(), r.transcript[1].size());
  }
}

TEST(Loopback, TranscriptDeterministic) {
  const Circuit c = build_millionaire(32, MillionaireVariant::kTree);
  const LayerPlan plan = assign_layers(c);
  const auto a = run_pair(c, plan, bits_of(123456, 32), bits_of(654321, 32), 8);
  const auto b = run_pair(c, plan, bits_of(123456, 32), bits_of(654321, 32), 8);
  EXPECT_EQ(a.transcript, b.transcript);
  EXPECT_EQ(a.party[0].timings, b.party[0].timings);
  EXPECT_EQ(a.party[1].timings, b.party[1].timings);
  const auto other = run_pair(c, plan, bits_of(123456, 32), bits_of(654321, 32), 9);
  EXPECT_NE(a.transcript, other.transcript);
}

TEST(Loopback, ZeroLayerOutputOnlyCircuit) {
  CircuitBuilder b(World::kArithmetic, RingSpec(16));
  b.output(b.add(b.input(0), b.input(1)));
  const Circuit c = b.build();
  const LayerPlan plan = assign_layers(c);
  const auto r = run_pair(c, plan, {40000}, {40000}, 1);
  EXPECT_EQ(r.party[0].outputs, std::vector<u64>{14464});
}

TEST(Tcp, LocalhostRunMatchesLoopback) {
  const Circuit c = build_inner_product(64, RingSpec(16));
  const LayerPlan plan = assign_layers(c);
  std::vector<u64> x(64), y(64);
  for (std::size_t i = 0; i < 64; ++i) {
    x[i] = i * 977 % 65536;
    y[i] = i * 31 + 7;
  }
  auto [p0, p1] = deal_for(c, 1, 2);
  const auto port = static_cast<std::uint16_t>(40000 + getpid() % 20000);
  std::vector<u64> out1;
  std::jthread server([&, pools = std::move(p1)]() mutable {
    auto t = TcpTransport::listen(port, 10);
    Session s(PartyId(1), *t, c, plan, std::move(pools), ClockMode::real(), {});
    s.handshake(HelloParams{});
    SeededRng rng(11);
    out1 = s.run_online(y, rng).outputs;
    s.confirm_outputs(out1);
  });
  auto t = TcpTransport::connect("127.0.0.1", port, 10);
  Session s(PartyId(0), *t, c, plan, std::move(p0), ClockMode::real(), {});
  s.handshake(HelloParams{});
  SeededRng rng(10);
  const auto out0 = s.run_online(x, rng).outputs;
  EXPECT_TRUE(s.confirm_outputs(out0));
  server.join();
  EXPECT_EQ(out0, out1);
  EXPECT_EQ(out0, eval_plaintext(c, x, y));
}

}  // namespace
}  // namespace hetmpc
