#include "oqb/kernels.hpp"

#if OQB_ARCH_X86_64

#include <immintrin.h>

namespace oqb::kernels {

// Complex 4-vectors are stored interleaved (re, im), two complex numbers per
// 256-bit register. fmaddsub gives the (re*re - im*im, im*re + re*im) lane
// pattern of a complex multiply directly.
void matvec4_avx2(const cplx* m, const cplx* x, cplx* y) noexcept {
  const double* md = reinterpret_cast<const double*>(m);
  const double* xd = reinterpret_cast<const double*>(x);
  __m256d acc_lo = _mm256_setzero_pd();  // y[0], y[1]
  __m256d acc_hi = _mm256_setzero_pd();  // y[2], y[3]
  for (int j = 0; j < 4; ++j) {
    const __m256d xr = _mm256_set1_pd(xd[2 * j]);
    const __m256d xi = _mm256_set1_pd(xd[2 * j + 1]);
    const __m256d col_lo = _mm256_loadu_pd(md + 8 * j);
    const __m256d col_hi = _mm256_loadu_pd(md + 8 * j + 4);
    // swap re/im within each complex lane pair
    const __m256d swp_lo = _mm256_permute_pd(col_lo, 0x5);
    const __m256d swp_hi = _mm256_permute_pd(col_hi, 0x5);
    acc_lo = _mm256_add_pd(acc_lo, _mm256_fmaddsub_pd(col_lo, xr, _mm256_mul_pd(swp_lo, xi)));
    acc_hi = _mm256_add_pd(acc_hi, _mm256_fmaddsub_pd(col_hi, xr, _mm256_mul_pd(swp_hi, xi)));
  }
  _mm256_storeu_pd(reinterpret_cast<double*>(y), acc_lo);
  _mm256_storeu_pd(reinterpret_cast<double*>(y) + 4, acc_hi);
}

void accumulate_avx2(const double* x, double* acc, std::size_t n) noexcept {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(acc + i);
    const __m256d b = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(acc + i, _mm256_add_pd(a, b));
  }
  for (; i < n; ++i) acc[i] += x[i];
}

}  // namespace oqb::kernels

#endif  // OQB_ARCH_X86_64
