#include <cstdlib>
#include <string_view>

#include <fmt/format.h>

#include "hetmpc/errors.hpp"
#include "hetmpc/simd/kernels.hpp"

namespace hetmpc::simd {

#if defined(HETMPC_WITH_AVX2)
extern const KernelTable kAvx2Kernels;
#endif

const KernelTable* avx2_kernels() {
#if defined(HETMPC_WITH_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &kAvx2Kernels : nullptr;
#else
  return nullptr;
#endif
}

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> out{&scalar_kernels()};
  if (const auto* k = avx2_kernels()) out.push_back(k);
  return out;
}

const KernelTable& active_kernels() {
  static const KernelTable& table = [&]() -> const KernelTable& {
    const char* env = std::getenv("HETMPC_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar_kernels();
    if (const auto* k = avx2_kernels()) return *k;
    return scalar_kernels();
  }();
  return table;
}

namespace {

void require_same(std::size_t n, std::size_t other) {
  if (n != other) throw DomainError(fmt::format("kernel operand length {} != {}", other, n));
}

}  // namespace

void xor_words(std::span<u64> dst, std::span<const u64> a, std::span<const u64> b) {
  require_same(dst.size(), a.size());
  require_same(dst.size(), b.size());
  active_kernels().xor_words(dst.data(), a.data(), b.data(), dst.size());
}

void and_words(std::span<u64> dst, std::span<const u64> a, std::span<const u64> b) {
  require_same(dst.size(), a.size());
  require_same(dst.size(), b.size());
  active_kernels().and_words(dst.data(), a.data(), b.data(), dst.size());
}

void bool_beaver_finish(std::span<u64> z, std::span<const u64> d, std::span<const u64> e,
                        std::span<const u64> a, std::span<const u64> b, std::span<const u64> c,
                        bool add_de) {
  for (auto s : {d, e, a, b, c}) require_same(z.size(), s.size());
  active_kernels().bool_beaver_finish(z.data(), d.data(), e.data(), a.data(), b.data(), c.data(),
                                      add_de, z.size());
}

void ring_add(std::span<u64> dst, std::span<const u64> a, std::span<const u64> b, u64 mask) {
  require_same(dst.size(), a.size());
  require_same(dst.size(), b.size());
  active_kernels().ring_add(dst.data(), a.data(), b.data(), mask, dst.size());
}

void ring_sub(std::span<u64> dst, std::span<const u64> a, std::span<const u64> b, u64 mask) {
  require_same(dst.size(), a.size());
  require_same(dst.size(), b.size());
  active_kernels().ring_sub(dst.data(), a.data(), b.data(), mask, dst.size());
}

void arith_beaver_finish(std::span<u64> z, std::span<const u64> d, std::span<const u64> e,
                         std::span<const u64> a, std::span<const u64> b, std::span<const u64> c,
                         bool add_de, u64 mask) {
  for (auto s : {d, e, a, b, c}) require_same(z.size(), s.size());
  active_kernels().arith_beaver_finish(z.data(), d.data(), e.data(), a.data(), b.data(), c.data(),
                                       add_de, mask, z.size());
}

}  // namespace hetmpc::simd
