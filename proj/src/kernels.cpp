#include "oqb/kernels.hpp"

#include <atomic>

namespace oqb::kernels {

void matvec4_scalar(const cplx* m, const cplx* x, cplx* y) noexcept {
  // Column sweep keeps the traversal order identical to the AVX2 variant.
  cplx acc0{}, acc1{}, acc2{}, acc3{};
  for (int j = 0; j < 4; ++j) {
    const cplx xj = x[j];
    const cplx* col = m + 4 * j;
    acc0 += col[0] * xj;
    acc1 += col[1] * xj;
    acc2 += col[2] * xj;
    acc3 += col[3] * xj;
  }
  y[0] = acc0;
  y[1] = acc1;
  y[2] = acc2;
  y[3] = acc3;
}

void accumulate_scalar(const double* x, double* acc, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

bool avx2_supported() noexcept {
#if OQB_ARCH_X86_64
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const dispatch_table scalar_table{matvec4_scalar, accumulate_scalar, "scalar"};
#if OQB_ARCH_X86_64
const dispatch_table avx2_table{matvec4_avx2, accumulate_avx2, "avx2"};
#endif

const dispatch_table* detect() noexcept {
#if OQB_ARCH_X86_64
  if (avx2_supported()) return &avx2_table;
#endif
  return &scalar_table;
}

std::atomic<const dispatch_table*> g_active{nullptr};

}  // namespace

const dispatch_table& active() noexcept {
  const dispatch_table* t = g_active.load(std::memory_order_acquire);
  if (!t) {
    t = detect();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

bool select(std::string_view name) noexcept {
  if (name == "auto") {
    g_active.store(detect(), std::memory_order_release);
    return true;
  }
  if (name == "scalar") {
    g_active.store(&scalar_table, std::memory_order_release);
    return true;
  }
#if OQB_ARCH_X86_64
  if (name == "avx2" && avx2_supported()) {
    g_active.store(&avx2_table, std::memory_order_release);
    return true;
  }
#endif
  return false;
}

std::vector<std::string_view> available() {
  std::vector<std::string_view> out{"scalar"};
#if OQB_ARCH_X86_64
  if (avx2_supported()) out.push_back("avx2");
#endif
  return out;
}

}  // namespace oqb::kernels
