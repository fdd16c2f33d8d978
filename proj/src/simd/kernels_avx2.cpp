// Built with -mavx2; only reached after a runtime CPU check.

#include <immintrin.h>

#include "hetmpc/simd/kernels.hpp"

namespace hetmpc::simd {
namespace {

inline __m256i load(const u64* p) { return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p)); }
inline void store(u64* p, __m256i v) { _mm256_storeu_si256(reinterpret_cast<__m256i*>(p), v); }

// Low 64 bits of a 64x64 product; AVX2 only has 32x32->64 multiplies.
inline __m256i mullo64(__m256i a, __m256i b) {
  const __m256i lo = _mm256_mul_epu32(a, b);
  const __m256i cross = _mm256_add_epi64(_mm256_mul_epu32(_mm256_srli_epi64(a, 32), b),
                                         _mm256_mul_epu32(a, _mm256_srli_epi64(b, 32)));
  return _mm256_add_epi64(lo, _mm256_slli_epi64(cross, 32));
}

void xor_words_avx2(u64* dst, const u64* a, const u64* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) store(dst + i, _mm256_xor_si256(load(a + i), load(b + i)));
  for (; i < n; ++i) dst[i] = a[i] ^ b[i];
}

void and_words_avx2(u64* dst, const u64* a, const u64* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) store(dst + i, _mm256_and_si256(load(a + i), load(b + i)));
  for (; i < n; ++i) dst[i] = a[i] & b[i];
}

void bool_beaver_finish_avx2(u64* z, const u64* d, const u64* e, const u64* a, const u64* b,
                             const u64* c, bool add_de, std::size_t n) {
  const u64 de_mask = add_de ? ~u64{0} : 0;
  const __m256i vmask = _mm256_set1_epi64x(static_cast<long long>(de_mask));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i vd = load(d + i);
    const __m256i ve = load(e + i);
    __m256i acc = _mm256_and_si256(_mm256_and_si256(vd, ve), vmask);
    acc = _mm256_xor_si256(acc, _mm256_and_si256(vd, load(b + i)));
    acc = _mm256_xor_si256(acc, _mm256_and_si256(ve, load(a + i)));
    store(z + i, _mm256_xor_si256(acc, load(c + i)));
  }
  for (; i < n; ++i) z[i] = (d[i] & e[i] & de_mask) ^ (d[i] & b[i]) ^ (e[i] & a[i]) ^ c[i];
}

void ring_add_avx2(u64* dst, const u64* a, const u64* b, u64 mask, std::size_t n) {
  const __m256i vmask = _mm256_set1_epi64x(static_cast<long long>(mask));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    store(dst + i, _mm256_and_si256(_mm256_add_epi64(load(a + i), load(b + i)), vmask));
  }
  for (; i < n; ++i) dst[i] = (a[i] + b[i]) & mask;
}

void ring_sub_avx2(u64* dst, const u64* a, const u64* b, u64 mask, std::size_t n) {
  const __m256i vmask = _mm256_set1_epi64x(static_cast<long long>(mask));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    store(dst + i, _mm256_and_si256(_mm256_sub_epi64(load(a + i), load(b + i)), vmask));
  }
  for (; i < n; ++i) dst[i] = (a[i] - b[i]) & mask;
}

void arith_beaver_finish_avx2(u64* z, const u64* d, const u64* e, const u64* a, const u64* b,
                              const u64* c, bool add_de, u64 mask, std::size_t n) {
  const u64 de_mask = add_de ? ~u64{0} : 0;
  const __m256i vmask = _mm256_set1_epi64x(static_cast<long long>(mask));
  const __m256i vde = _mm256_set1_epi64x(static_cast<long long>(de_mask));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i vd = load(d + i);
    const __m256i ve = load(e + i);
    __m256i acc = _mm256_and_si256(mullo64(vd, ve), vde);
    acc = _mm256_add_epi64(acc, mullo64(vd, load(b + i)));
    acc = _mm256_add_epi64(acc, mullo64(ve, load(a + i)));
    acc = _mm256_add_epi64(acc, load(c + i));
    store(z + i, _mm256_and_si256(acc, vmask));
  }
  for (; i < n; ++i) {
    z[i] = ((d[i] * e[i] & de_mask) + d[i] * b[i] + e[i] * a[i] + c[i]) & mask;
  }
}

}  // namespace

extern const KernelTable kAvx2Kernels;
const KernelTable kAvx2Kernels{
    Isa::kAvx2,           "avx2",         xor_words_avx2,           and_words_avx2,
    bool_beaver_finish_avx2, ring_add_avx2, ring_sub_avx2, arith_beaver_finish_avx2,
};

}  // namespace hetmpc::simd
