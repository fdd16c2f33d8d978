#include "hetmpc/wire.hpp"

#include <fmt/format.h>

#include "hetmpc/errors.hpp"

namespace hetmpc {
namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(std::span<const std::uint8_t> in, std::size_t at, std::size_t width) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width; ++i) v |= std::uint64_t{in[at + i]} << (8 * i);
  return v;
}

bool known_type(std::uint8_t t) { return t >= 0x01 && t <= 0x05; }

// Bit i of x moves to bit 2i.
std::uint64_t spread32(std::uint64_t x) {
  x &= 0xffffffffULL;
  x = (x | (x << 16)) & 0x0000ffff0000ffffULL;
  x = (x | (x << 8)) & 0x00ff00ff00ff00ffULL;
  x = (x | (x << 4)) & 0x0f0f0f0f0f0f0f0fULL;
  x = (x | (x << 2)) & 0x3333333333333333ULL;
  x = (x | (x << 1)) & 0x5555555555555555ULL;
  return x;
}

// Inverse of spread32 on the even bits.
std::uint64_t compact32(std::uint64_t x) {
  x &= 0x5555555555555555ULL;
  x = (x | (x >> 1)) & 0x3333333333333333ULL;
  x = (x | (x >> 2)) & 0x0f0f0f0f0f0f0f0fULL;
  x = (x | (x >> 4)) & 0x00ff00ff00ff00ffULL;
  x = (x | (x >> 8)) & 0x0000ffff0000ffffULL;
  x = (x | (x >> 16)) & 0x00000000ffffffffULL;
  return x;
}

void copy_bits(BitVector& dst, std::size_t offset, const BitVector& src) {
  auto out = dst.mutable_words();
  const auto in = src.words();
  const unsigned shift = offset & 63;
  const std::size_t base = offset >> 6;
  for (std::size_t w = 0; w < in.size(); ++w) {
    out[base + w] |= in[w] << shift;
    if (shift != 0 && base + w + 1 < out.size()) out[base + w + 1] |= in[w] >> (64 - shift);
  }
}

}  // namespace

void append_frame(const Frame& f, std::vector<std::uint8_t>& out) {
  if (f.payload.size() > UINT32_MAX) throw ProtocolError("frame payload exceeds 4 GiB");
  out.reserve(out.size() + kFrameHeaderBytes + f.payload.size());
  put_u32(out, static_cast<std::uint32_t>(f.payload.size()));
  out.push_back(static_cast<std::uint8_t>(f.type));
  put_u32(out, f.layer_id);
  out.insert(out.end(), f.payload.begin(), f.payload.end());
}

std::vector<std::uint8_t> encode_frame(const Frame& f) {
  std::vector<std::uint8_t> out;
  append_frame(f, out);
  return out;
}

FrameHeader decode_frame_header(std::span<const std::uint8_t, kFrameHeaderBytes> bytes) {
  if (!known_type(bytes[4])) {
    throw ProtocolError(fmt::format("unknown message type 0x{:02x}", bytes[4]));
  }
  return {static_cast<std::uint32_t>(get_le(bytes, 0, 4)), static_cast<MsgType>(bytes[4]),
          static_cast<std::uint32_t>(get_le(bytes, 5, 4))};
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFrameHeaderBytes) throw ProtocolError("frame shorter than its header");
  const FrameHeader h = decode_frame_header(bytes.first<kFrameHeaderBytes>());
  if (bytes.size() - kFrameHeaderBytes != h.length) {
    throw ProtocolError(fmt::format("frame length field {} but {} payload bytes", h.length,
                                    bytes.size() - kFrameHeaderBytes));
  }
  return {h.type, h.layer_id, {bytes.begin() + kFrameHeaderBytes, bytes.end()}};
}

std::vector<std::uint8_t> encode_hello(const HelloParams& p) {
  std::vector<std::uint8_t> out;
  out.reserve(kHelloPayloadBytes);
  put_u16(out, p.version);
  out.push_back(static_cast<std::uint8_t>(p.app));
  out.push_back(static_cast<std::uint8_t>(p.world));
  put_u16(out, p.bit_length);
  put_u64(out, p.size);
  out.push_back(static_cast<std::uint8_t>(p.variant));
  put_u64(out, p.seed_commitment);
  return out;
}

HelloParams decode_hello(std::span<const std::uint8_t> payload) {
  if (payload.size() != kHelloPayloadBytes) {
    throw ProtocolError(fmt::format("HELLO payload is {} bytes, expected {}", payload.size(),
                                    kHelloPayloadBytes));
  }
  HelloParams p;
  p.version = static_cast<std::uint16_t>(get_le(payload, 0, 2));
  p.app = static_cast<AppId>(payload[2]);
  p.world = static_cast<World>(payload[3]);
  p.bit_length = static_cast<std::uint16_t>(get_le(payload, 4, 2));
  p.size = get_le(payload, 6, 8);
  p.variant = static_cast<MillionaireVariant>(payload[14]);
  p.seed_commitment = get_le(payload, 15, 8);
  return p;
}

void check_hello(const HelloParams& local, const HelloParams& remote) {
  auto mismatch = [](const char* field, auto mine, auto theirs) {
    if (mine != theirs) {
      throw HandshakeError(field, fmt::format("handshake mismatch on {}: local {} vs peer {}", field,
                                              static_cast<std::uint64_t>(mine),
                                              static_cast<std::uint64_t>(theirs)));
    }
  };
  mismatch("version", local.version, remote.version);
  mismatch("app", static_cast<unsigned>(local.app), static_cast<unsigned>(remote.app));
  mismatch("world", static_cast<unsigned>(local.world), static_cast<unsigned>(remote.world));
  mismatch("l", local.bit_length, remote.bit_length);
  mismatch("size", local.size, remote.size);
  mismatch("variant", static_cast<unsigned>(local.variant), static_cast<unsigned>(remote.variant));
  mismatch("seed", local.seed_commitment, remote.seed_commitment);
}

std::size_t layer_payload_bytes(World world, const RingSpec& ring, const LayerSchedule& s) {
  if (world == World::kArithmetic) return (2 * s.n_masked + s.n_output) * ring.byte_width();
  return bytes_for_bits(2 * s.n_masked + s.n_output);
}

std::vector<std::uint8_t> encode_layer_payload(const RingSpec& ring, std::span<const u64> d,
                                               std::span<const u64> e,
                                               std::span<const u64> outputs) {
  if (d.size() != e.size()) throw DomainError("d and e differ in length");
  std::vector<std::uint8_t> out;
  out.reserve((2 * d.size() + outputs.size()) * ring.byte_width());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const u64 pair[2] = {d[i], e[i]};
    encode_ring_elements(pair, ring, out);
  }
  encode_ring_elements(outputs, ring, out);
  return out;
}

ArithLayerValues decode_arith_layer_payload(std::span<const std::uint8_t> payload,
                                            const RingSpec& ring, const LayerSchedule& s) {
  const std::size_t expected = layer_payload_bytes(World::kArithmetic, ring, s);
  if (payload.size() != expected) {
    throw ProtocolError(fmt::format("layer payload is {} bytes, schedule needs {}", payload.size(),
                                    expected));
  }
  const std::vector<u64> de = decode_ring_elements(payload, 2 * s.n_masked, ring);
  ArithLayerValues v;
  v.d.resize(s.n_masked);
  v.e.resize(s.n_masked);
  for (std::size_t i = 0; i < s.n_masked; ++i) {
    v.d[i] = de[2 * i];
    v.e[i] = de[2 * i + 1];
  }
  v.outputs =
      decode_ring_elements(payload.subspan(2 * s.n_masked * ring.byte_width()), s.n_output, ring);
  return v;
}

std::vector<std::uint8_t> encode_layer_payload(const BitVector& d, const BitVector& e,
                                               const BitVector& outputs) {
  if (d.size() != e.size()) throw DomainError("d and e differ in length");
  const std::size_t n = d.size();
  BitVector packed(2 * n + outputs.size());
  auto words = packed.mutable_words();
  for (std::size_t w = 0; w < d.word_count(); ++w) {
    const std::uint64_t dw = d.words()[w];
    const std::uint64_t ew = e.words()[w];
    words[2 * w] = spread32(dw) | (spread32(ew) << 1);
    if (2 * w + 1 < words.size()) words[2 * w + 1] = spread32(dw >> 32) | (spread32(ew >> 32) << 1);
  }
  copy_bits(packed, 2 * n, outputs);
  packed.clear_padding();
  return packed.to_bytes();
}

BoolLayerValues decode_bool_layer_payload(std::span<const std::uint8_t> payload,
                                          const LayerSchedule& s) {
  const std::size_t total = 2 * s.n_masked + s.n_output;
  if (payload.size() != bytes_for_bits(total)) {
    throw ProtocolError(fmt::format("layer payload is {} bytes, schedule needs {}", payload.size(),
                                    bytes_for_bits(total)));
  }
  const BitVector packed = BitVector::from_bytes(payload, total);
  BoolLayerValues v{BitVector(s.n_masked), BitVector(s.n_masked), packed.slice(2 * s.n_masked, s.n_output)};
  const BitVector de = packed.slice(0, 2 * s.n_masked);
  auto dw = v.d.mutable_words();
  auto ew = v.e.mutable_words();
  const auto in = de.words();
  for (std::size_t w = 0; w < dw.size(); ++w) {
    const std::uint64_t lo = 2 * w < in.size() ? in[2 * w] : 0;
    const std::uint64_t hi = 2 * w + 1 < in.size() ? in[2 * w + 1] : 0;
    dw[w] = compact32(lo) | (compact32(hi) << 32);
    ew[w] = compact32(lo >> 1) | (compact32(hi >> 1) << 32);
  }
  return v;
}

}  // namespace hetmpc
