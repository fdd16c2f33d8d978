#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hetmpc/circuit.hpp"
#include "hetmpc/clock.hpp"
#include "hetmpc/preprocessing.hpp"
#include "hetmpc/rng.hpp"
#include "hetmpc/transport.hpp"
#include "hetmpc/wire.hpp"

namespace hetmpc {

struct OnlineOptions {
  // Count input-share distribution as part of the timed online phase.
  bool time_input_sharing = false;
  // Real clock only: maps this party's ready instant to the instant the
  // online clock starts from. Loopback runs use the later of the two parties'
  // ready instants so that thread start skew is not billed to either side.
  std::function<std::chrono::steady_clock::time_point(std::chrono::steady_clock::time_point)>
      align_start;
};

struct OnlineResult {
  std::vector<u64> outputs;  // reconstructed, in circuit.output_ids order
  StepTimings timings;
};

// One party's side of a two-party execution. Strictly single-threaded: the
// four online steps run one after another for every layer.
class Session {
 public:
  Session(PartyId party, Transport& transport, const Circuit& circuit, const LayerPlan& plan,
          TripleStore pools, ClockMode clock, ThrottleConfig throttle);

  PartyId party() const { return party_; }

  // Send-then-receive HELLO; throws HandshakeError on any mismatch.
  HelloParams handshake(const HelloParams& local);

  // Shares this party's inputs, masks drawn from `rng`, and absorbs the
  // peer's INPUT_SHARE frame.
  void distribute_inputs(std::span<const u64> local_inputs, SeededRng& rng);
  void distribute_inputs_with_masks(std::span<const u64> local_inputs,
                                    std::span<const u64> masks);

  // distribute_inputs followed by the layered online phase.
  OnlineResult run_online(std::span<const u64> local_inputs, SeededRng& rng,
                          const OnlineOptions& options = {});
  // Layered online phase only; inputs must already be distributed.
  OnlineResult evaluate();

  // Exchanges DONE frames carrying each side's outputs; true iff they agree.
  bool confirm_outputs(std::span<const u64> outputs);

  const std::vector<u64>& wire_store() const { return wires_; }
  const TripleStore& pools() const { return pools_; }
  // Hands back the (partly consumed) triple pools.
  TripleStore release_pools() { return std::move(pools_); }

 private:
  void check_inputs(std::span<const u64> local_inputs) const;
  void evaluate_local(const std::vector<GateId>& gates);
  double local_cost(std::size_t n_gates) const;
  Frame prepare_arith(std::uint32_t layer, const std::vector<GateId>& gates);
  Frame prepare_bool(std::uint32_t layer, const std::vector<GateId>& gates);
  void finish_arith(const Frame& peer, const std::vector<GateId>& gates);
  void finish_bool(const Frame& peer, const std::vector<GateId>& gates);
  Frame receive_expected(MsgType type, std::uint32_t layer);

  PartyId party_;
  Transport& transport_;
  const Circuit& circuit_;
  const LayerPlan& plan_;
  TripleStore pools_;
  ClockMode clock_;
  ThrottleConfig throttle_;
  StepMeter meter_;
  std::vector<u64> wires_;
  std::vector<std::uint8_t> evaluated_;

  // Per-layer scratch shared between step 2 and step 4.
  struct Pending {
    std::vector<GateId> masked;  // MUL/AND in gate-id order
    std::vector<GateId> outputs;
    std::vector<u64> d, e, own_outputs;
    ArithTripleBatch arith;
    BitVector bd, be, bown_outputs;
    BoolTripleBatch boolean;
  } pending_;
};

// Everything needed to run both parties in one process.
struct LoopbackSetup {
  const Circuit* circuit = nullptr;
  const LayerPlan* plan = nullptr;
  HelloParams hello;
  std::array<TripleStore, 2> pools;
  std::array<std::vector<u64>, 2> inputs;
  std::array<std::uint64_t, 2> mask_seeds{0, 0};
  ClockMode clock;
  std::array<ThrottleConfig, 2> throttle;
  OnlineOptions options;
};

struct LoopbackResult {
  std::array<OnlineResult, 2> party;
  std::array<std::vector<std::uint8_t>, 2> transcript;
  std::array<std::size_t, 2> layer_frames{0, 0};
  std::array<std::size_t, 2> frames{0, 0};
  std::array<std::size_t, 2> payload_bytes{0, 0};
  bool outputs_agree = false;
  std::array<TripleStore, 2> pools_after;
};

// Runs handshake, input distribution, the online phase and the DONE
// exchange for both parties on two threads over an in-memory link.
LoopbackResult run_loopback(LoopbackSetup setup);

}  // namespace hetmpc
