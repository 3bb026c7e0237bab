#include <atomic>
#include <cstdlib>
#include <string>

#include "imbaug/error.hpp"
#include "imbaug/simd/kernels.hpp"

namespace imbaug::simd {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(IMBAUG_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  require(isa_available(isa), ErrorKind::config,
          "instruction set " + std::string(to_string(isa)) + " not available on this host");
#if defined(IMBAUG_BUILD_AVX2)
  if (isa == Isa::avx2) return detail::avx2_table;
#endif
  return detail::scalar_table;
}

namespace {

const KernelTable* pick_default() {
  if (const char* env = std::getenv("IMBAUG_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return &detail::scalar_table;
    if (v == "avx2" && isa_available(Isa::avx2)) return &kernels_for(Isa::avx2);
  }
  if (isa_available(Isa::avx2)) return &kernels_for(Isa::avx2);
  return &detail::scalar_table;
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{pick_default()};
  return table;
}

}  // namespace

const KernelTable& kernels() { return *active().load(std::memory_order_acquire); }

Isa active_isa() { return kernels().isa; }

void force_isa(Isa isa) { active().store(&kernels_for(isa), std::memory_order_release); }

}  // namespace imbaug::simd
