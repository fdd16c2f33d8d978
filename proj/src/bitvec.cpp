#include "hetmpc/bitvec.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "hetmpc/errors.hpp"

namespace hetmpc {

BitVector::BitVector(std::size_t n_bits) : n_bits_(n_bits), words_(words_for_bits(n_bits), 0) {}

BitVector::BitVector(std::size_t n_bits, std::vector<std::uint64_t> words)
    : n_bits_(n_bits), words_(std::move(words)) {
  if (words_.size() != words_for_bits(n_bits)) {
    throw DomainError(fmt::format("{} words cannot hold exactly {} bits", words_.size(), n_bits));
  }
  clear_padding();
}

BitVector BitVector::from_binary(const std::string& msb_first) {
  BitVector v(msb_first.size());
  for (std::size_t i = 0; i < msb_first.size(); ++i) {
    const char ch = msb_first[msb_first.size() - 1 - i];
    if (ch != '0' && ch != '1') throw DomainError(fmt::format("'{}' is not a binary digit", ch));
    v.set(i, ch == '1');
  }
  return v;
}

BitVector BitVector::from_u64(std::uint64_t value, std::size_t n_bits) {
  if (n_bits > 64) throw DomainError("from_u64 takes at most 64 bits");
  BitVector v(n_bits);
  if (n_bits > 0) v.words_[0] = value;
  v.clear_padding();
  return v;
}

BitVector BitVector::from_bytes(std::span<const std::uint8_t> bytes, std::size_t n_bits) {
  if (bytes.size() < bytes_for_bits(n_bits)) {
    throw DomainError(
        fmt::format("need {} bytes for {} bits, have {}", bytes_for_bits(n_bits), n_bits, bytes.size()));
  }
  BitVector v(n_bits);
  for (std::size_t i = 0; i < bytes_for_bits(n_bits); ++i) {
    v.words_[i / 8] |= std::uint64_t{bytes[i]} << (8 * (i % 8));
  }
  v.clear_padding();
  return v;
}

void BitVector::set(std::size_t i, bool v) {
  const std::uint64_t bit = std::uint64_t{1} << (i & 63);
  if (v) {
    words_[i >> 6] |= bit;
  } else {
    words_[i >> 6] &= ~bit;
  }
}

void BitVector::clear_padding() noexcept {
  if (const std::size_t tail = n_bits_ & 63; tail != 0) {
    words_.back() &= (std::uint64_t{1} << tail) - 1;
  }
}

BitVector BitVector::slice(std::size_t start, std::size_t len) const {
  if (start > n_bits_ || len > n_bits_ - start) {
    throw DomainError(fmt::format("slice [{}, {}) outside {} bits", start, start + len, n_bits_));
  }
  BitVector out(len);
  const std::size_t word0 = start >> 6;
  const unsigned shift = start & 63;
  for (std::size_t w = 0; w < out.words_.size(); ++w) {
    std::uint64_t lo = words_[word0 + w] >> shift;
    if (shift != 0 && word0 + w + 1 < words_.size()) lo |= words_[word0 + w + 1] << (64 - shift);
    out.words_[w] = lo;
  }
  out.clear_padding();
  return out;
}

std::uint64_t BitVector::to_u64() const {
  if (n_bits_ > 64) throw DomainError(fmt::format("{} bits do not fit in 64", n_bits_));
  return words_.empty() ? 0 : words_[0];
}

std::string BitVector::to_binary() const {
  std::string s(n_bits_, '0');
  for (std::size_t i = 0; i < n_bits_; ++i) {
    if (get(i)) s[n_bits_ - 1 - i] = '1';
  }
  return s;
}

std::vector<std::uint8_t> BitVector::to_bytes() const {
  std::vector<std::uint8_t> out;
  append_bytes(out);
  return out;
}

void BitVector::append_bytes(std::vector<std::uint8_t>& out) const {
  const std::size_t n = bytes_for_bits(n_bits_);
  out.reserve(out.size() + n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(static_cast<std::uint8_t>(words_[i / 8] >> (8 * (i % 8))));
  }
}

BitVector& BitVector::operator^=(const BitVector& other) {
  if (other.n_bits_ != n_bits_) {
    throw DomainError(fmt::format("bit length mismatch: {} vs {}", n_bits_, other.n_bits_));
  }
  std::transform(words_.begin(), words_.end(), other.words_.begin(), words_.begin(),
                 [](std::uint64_t a, std::uint64_t b) { return a ^ b; });
  return *this;
}

BitVector& BitVector::operator&=(const BitVector& other) {
  if (other.n_bits_ != n_bits_) {
    throw DomainError(fmt::format("bit length mismatch: {} vs {}", n_bits_, other.n_bits_));
  }
  std::transform(words_.begin(), words_.end(), other.words_.begin(), words_.begin(),
                 [](std::uint64_t a, std::uint64_t b) { return a & b; });
  return *this;
}

}  // namespace hetmpc
