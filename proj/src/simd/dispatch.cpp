// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <stdexcept>

#include "oafmtl/simd/kernels.hpp"

namespace oafmtl::simd {
namespace {

std::atomic<const KernelTable*> g_active{nullptr};

const KernelTable* resolve(const std::string& name) {
  if (name == "scalar") return &scalar_kernels();
  if (name == "avx2") {
    const KernelTable* t = avx2_kernels();
    if (!t) throw std::runtime_error("avx2 kernels requested but not available on this CPU/build");
    return t;
  }
  if (name == "auto" || name.empty()) {
    const KernelTable* t = avx2_kernels();
    return t ? t : &scalar_kernels();
  }
  throw std::invalid_argument("unknown kernel set '" + name + "' (expected auto, scalar, avx2)");
}

}  // namespace

bool cpu_supports_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* avx2_kernels() {
#if defined(OAFMTL_HAVE_AVX2_TU)
  return cpu_supports_avx2() ? detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& kernels() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t) return *t;
  const char* env = std::getenv("OAFMTL_KERNELS");
  const KernelTable* chosen = resolve(env ? std::string(env) : std::string("auto"));
  const KernelTable* expected = nullptr;
  g_active.compare_exchange_strong(expected, chosen, std::memory_order_acq_rel);
  return *g_active.load(std::memory_order_acquire);
}

void select_kernels(const std::string& name) {
  g_active.store(resolve(name), std::memory_order_release);
}

std::vector<std::string> available_kernels() {
  std::vector<std::string> out{"scalar"};
  if (avx2_kernels()) out.push_back("avx2");
  return out;
}

}  // namespace oafmtl::simd
