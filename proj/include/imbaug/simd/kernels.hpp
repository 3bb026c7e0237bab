#pragma once

// Arithmetic inner loops shared by the dense layers and the neighbor search.
//
// Every kernel has a portable scalar reference and, on x86-64, an AVX2+FMA
// variant. The active table is picked once at startup from CPUID and can be
// pinned with IMBAUG_SIMD=scalar|avx2 (or force_isa() in tests). Variants
// agree to rounding, not bit-for-bit: a run is reproducible only under the
// same ISA.

#include <cstddef>
#include <string_view>

namespace imbaug::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;
  // c[m x n] = a[m x k] * b[k x n]
  void (*gemm_nn)(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
                  double* c);
  // c[k x n] += a[m x k]^T * b[m x n]
  void (*gemm_tn_acc)(std::size_t m, std::size_t k, std::size_t n, const double* a,
                      const double* b, double* c);
  // c[m x k] = a[m x n] * b[k x n]^T
  void (*gemm_nt)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                  double* c);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
};

bool isa_available(Isa isa);
const KernelTable& kernels_for(Isa isa);

// The table used by the library.
const KernelTable& kernels();
Isa active_isa();
// Pins the active table; throws config error when the ISA is unavailable.
void force_isa(Isa isa);

namespace detail {
extern const KernelTable scalar_table;
#if defined(IMBAUG_BUILD_AVX2)
extern const KernelTable avx2_table;
#endif
}  // namespace detail

}  // namespace imbaug::simd
