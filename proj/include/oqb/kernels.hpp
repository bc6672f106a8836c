#pragma once

#include <complex>
#include <cstddef>
#include <string_view>
#include <vector>

// Arithmetic inner loops of the simulator: applying a cached 4x4 complex
// propagator to a vectorized density matrix, and accumulating per-realization
// curves into ensemble sums. Scalar reference kernels are the semantic
// definition; the AVX2 variants are selected at runtime when the CPU supports
// them and are equivalence-tested against the scalar ones.

#if defined(__x86_64__) || defined(_M_X64)
#define OQB_ARCH_X86_64 1
#else
#define OQB_ARCH_X86_64 0
#endif

namespace oqb::kernels {

using cplx = std::complex<double>;

// y = M x, M column-major 4x4 complex.
using matvec4_fn = void (*)(const cplx* m, const cplx* x, cplx* y);
// acc[i] += x[i] for i in [0, n). Element-wise, so every variant is bit-exact.
using accumulate_fn = void (*)(const double* x, double* acc, std::size_t n);

void matvec4_scalar(const cplx* m, const cplx* x, cplx* y) noexcept;
void accumulate_scalar(const double* x, double* acc, std::size_t n) noexcept;

#if OQB_ARCH_X86_64
void matvec4_avx2(const cplx* m, const cplx* x, cplx* y) noexcept;
void accumulate_avx2(const double* x, double* acc, std::size_t n) noexcept;
#endif

bool avx2_supported() noexcept;

struct dispatch_table {
  matvec4_fn matvec4;
  accumulate_fn accumulate;
  const char* name;
};

// Active table. Defaults to the best variant the CPU supports.
const dispatch_table& active() noexcept;

// Force a variant: "auto", "scalar" or "avx2". Returns false (and leaves the
// selection unchanged) if the name is unknown or unsupported on this CPU.
bool select(std::string_view name) noexcept;

std::vector<std::string_view> available();

}  // namespace oqb::kernels
