#include "hetmpc/ring.hpp"

#include <fmt/format.h>

#include "hetmpc/errors.hpp"

namespace hetmpc {

RingSpec::RingSpec(unsigned bit_length) : bits_(bit_length) {
  if (bit_length < 1 || bit_length > 64) {
    throw DomainError(fmt::format("ring bit length {} outside [1, 64]", bit_length));
  }
  mask_ = bit_length == 64 ? ~u64{0} : (u64{1} << bit_length) - 1;
}

PartyId PartyId::checked(long long id) {
  if (id != 0 && id != 1) throw DomainError(fmt::format("party id {} is not 0 or 1", id));
  return PartyId(static_cast<unsigned>(id));
}

void encode_ring_elements(std::span<const u64> values, const RingSpec& spec,
                          std::vector<std::uint8_t>& out) {
  const std::size_t width = spec.byte_width();
  const std::size_t base = out.size();
  out.resize(base + values.size() * width);
  std::uint8_t* p = out.data() + base;
  for (u64 v : values) {
    for (std::size_t b = 0; b < width; ++b) *p++ = static_cast<std::uint8_t>(v >> (8 * b));
  }
}

std::vector<u64> decode_ring_elements(std::span<const std::uint8_t> in, std::size_t count,
                                      const RingSpec& spec) {
  const std::size_t width = spec.byte_width();
  if (in.size() < count * width) {
    throw DomainError(fmt::format("need {} bytes for {} ring elements, have {}", count * width,
                                  count, in.size()));
  }
  std::vector<u64> values(count);
  const std::uint8_t* p = in.data();
  for (auto& v : values) {
    u64 x = 0;
    for (std::size_t b = 0; b < width; ++b) x |= u64{*p++} << (8 * b);
    v = spec.reduce(x);
  }
  return values;
}

}  // namespace hetmpc
