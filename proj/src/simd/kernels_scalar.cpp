#include "hetmpc/simd/kernels.hpp"

namespace hetmpc::simd {
namespace {

void xor_words_scalar(u64* dst, const u64* a, const u64* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] ^ b[i];
}

void and_words_scalar(u64* dst, const u64* a, const u64* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] & b[i];
}

void bool_beaver_finish_scalar(u64* z, const u64* d, const u64* e, const u64* a, const u64* b,
                               const u64* c, bool add_de, std::size_t n) {
  const u64 de_mask = add_de ? ~u64{0} : 0;
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = (d[i] & e[i] & de_mask) ^ (d[i] & b[i]) ^ (e[i] & a[i]) ^ c[i];
  }
}

void ring_add_scalar(u64* dst, const u64* a, const u64* b, u64 mask, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = (a[i] + b[i]) & mask;
}

void ring_sub_scalar(u64* dst, const u64* a, const u64* b, u64 mask, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = (a[i] - b[i]) & mask;
}

void arith_beaver_finish_scalar(u64* z, const u64* d, const u64* e, const u64* a, const u64* b,
                                const u64* c, bool add_de, u64 mask, std::size_t n) {
  const u64 de_mask = add_de ? ~u64{0} : 0;
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = ((d[i] * e[i] & de_mask) + d[i] * b[i] + e[i] * a[i] + c[i]) & mask;
  }
}

constexpr KernelTable kScalar{
    Isa::kScalar,        "scalar",        xor_words_scalar,           and_words_scalar,
    bool_beaver_finish_scalar, ring_add_scalar, ring_sub_scalar, arith_beaver_finish_scalar,
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace hetmpc::simd
