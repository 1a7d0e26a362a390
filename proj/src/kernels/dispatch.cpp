#include <cstdlib>
#include <string_view>

#include "transmission/kernels/kernels.hpp"

namespace transmission::kernels {

#ifndef TRANSMISSION_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif

bool cpu_supports_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& active() {
  static const KernelTable& chosen = [] () -> const KernelTable& {
    const char* env = std::getenv("TRANSMISSION_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar_table();
    if (const KernelTable* t = avx2_table(); t != nullptr && cpu_supports_avx2()) return *t;
    return scalar_table();
  }();
  return chosen;
}

}  // namespace transmission::kernels
