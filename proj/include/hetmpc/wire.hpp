#pragma once

// Bit-exact wire format. Every frame is
//   length  u32 LE  (payload bytes)
//   type    u8
//   layer   u32 LE  (0 where not applicable)
//   payload
// followed by nothing else; frames are delivered in order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hetmpc/bitvec.hpp"
#include "hetmpc/circuit.hpp"
#include "hetmpc/ring.hpp"

namespace hetmpc {

enum class MsgType : std::uint8_t {
  kHello = 0x01,
  kInputShare = 0x02,
  kLayerData = 0x03,
  kOutputShare = 0x04,
  kDone = 0x05,
};

constexpr std::size_t kFrameHeaderBytes = 9;

struct Frame {
  MsgType type = MsgType::kHello;
  std::uint32_t layer_id = 0;
  std::vector<std::uint8_t> payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

std::vector<std::uint8_t> encode_frame(const Frame& f);
void append_frame(const Frame& f, std::vector<std::uint8_t>& out);

struct FrameHeader {
  std::uint32_t length;
  MsgType type;
  std::uint32_t layer_id;
};
// Throws ProtocolError on an unknown type byte.
FrameHeader decode_frame_header(std::span<const std::uint8_t, kFrameHeaderBytes> bytes);
// Decodes one whole frame; `bytes` must be exactly header + payload.
Frame decode_frame(std::span<const std::uint8_t> bytes);

enum class AppId : std::uint8_t { kInnerProduct = 1, kMillionaire = 2 };

constexpr std::uint16_t kProtocolVersion = 1;
constexpr std::size_t kHelloPayloadBytes = 23;

// HELLO payload: version u16, app u8, world u8, l u16, size u64, variant u8,
// seed u64, all little-endian. `seed` carries a commitment to the run seed.
struct HelloParams {
  std::uint16_t version = kProtocolVersion;
  AppId app = AppId::kInnerProduct;
  World world = World::kArithmetic;
  std::uint16_t bit_length = 16;
  std::uint64_t size = 0;
  MillionaireVariant variant = MillionaireVariant::kTree;
  std::uint64_t seed_commitment = 0;

  friend bool operator==(const HelloParams&, const HelloParams&) = default;
};

std::vector<std::uint8_t> encode_hello(const HelloParams& p);
HelloParams decode_hello(std::span<const std::uint8_t> payload);
// Throws HandshakeError naming the first mismatching field.
void check_hello(const HelloParams& local, const HelloParams& remote);

// Shape of one layer's exchange: how many MUL/AND gates and how many OUTPUT
// gates, in gate-id order.
struct LayerSchedule {
  std::size_t n_masked = 0;
  std::size_t n_output = 0;
};

std::size_t layer_payload_bytes(World world, const RingSpec& ring, const LayerSchedule& s);

// Arithmetic: d_0 e_0 d_1 e_1 ... then output shares, each ceil(l/8) bytes LE.
std::vector<std::uint8_t> encode_layer_payload(const RingSpec& ring, std::span<const u64> d,
                                               std::span<const u64> e,
                                               std::span<const u64> outputs);
struct ArithLayerValues {
  std::vector<u64> d, e, outputs;
};
ArithLayerValues decode_arith_layer_payload(std::span<const std::uint8_t> payload,
                                            const RingSpec& ring, const LayerSchedule& s);

// Boolean: bits d_0 e_0 d_1 e_1 ... then output bits, packed LSB-first,
// padded with zeros to a byte boundary.
std::vector<std::uint8_t> encode_layer_payload(const BitVector& d, const BitVector& e,
                                               const BitVector& outputs);
struct BoolLayerValues {
  BitVector d, e, outputs;
};
BoolLayerValues decode_bool_layer_payload(std::span<const std::uint8_t> payload,
                                          const LayerSchedule& s);

}  // namespace hetmpc
