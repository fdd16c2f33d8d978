#pragma once

// Data-parallel inner loops of the online phase. Each kernel has a scalar
// reference implementation and, where the target supports it, an AVX2
// variant. The variant is chosen once at runtime from CPUID; set
// HETMPC_SIMD=scalar in the environment to force the reference path.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hetmpc::simd {

using u64 = std::uint64_t;

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  const char* name;

  void (*xor_words)(u64* dst, const u64* a, const u64* b, std::size_t n);
  void (*and_words)(u64* dst, const u64* a, const u64* b, std::size_t n);
  // z = (add_de ? d & e : 0) ^ (d & b) ^ (e & a) ^ c, word-wise.
  void (*bool_beaver_finish)(u64* z, const u64* d, const u64* e, const u64* a, const u64* b,
                             const u64* c, bool add_de, std::size_t n);
  void (*ring_add)(u64* dst, const u64* a, const u64* b, u64 mask, std::size_t n);
  void (*ring_sub)(u64* dst, const u64* a, const u64* b, u64 mask, std::size_t n);
  // z = ((add_de ? d * e : 0) + d * b + e * a + c) & mask.
  void (*arith_beaver_finish)(u64* z, const u64* d, const u64* e, const u64* a, const u64* b,
                              const u64* c, bool add_de, u64 mask, std::size_t n);
};

const KernelTable& scalar_kernels();
// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels();
const KernelTable& active_kernels();
std::vector<const KernelTable*> available_kernels();

// Span front-ends over active_kernels(). All spans must have equal length.
void xor_words(std::span<u64> dst, std::span<const u64> a, std::span<const u64> b);
void and_words(std::span<u64> dst, std::span<const u64> a, std::span<const u64> b);
void bool_beaver_finish(std::span<u64> z, std::span<const u64> d, std::span<const u64> e,
                        std::span<const u64> a, std::span<const u64> b, std::span<const u64> c,
                        bool add_de);
void ring_add(std::span<u64> dst, std::span<const u64> a, std::span<const u64> b, u64 mask);
void ring_sub(std::span<u64> dst, std::span<const u64> a, std::span<const u64> b, u64 mask);
void arith_beaver_finish(std::span<u64> z, std::span<const u64> d, std::span<const u64> e,
                         std::span<const u64> a, std::span<const u64> b, std::span<const u64> c,
                         bool add_de, u64 mask);

}  // namespace hetmpc::simd
