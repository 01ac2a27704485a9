#include <cstdlib>
#include <string_view>

#include "axivort/simd/kernels.hpp"

namespace axivort::simd {

const KernelTable& active() {
  static const KernelTable& table = [] () -> const KernelTable& {
    const char* env = std::getenv("AXIVORT_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar_kernels();
    if (const KernelTable* t = avx2_kernels()) return *t;
    return scalar_kernels();
  }();
  return table;
}

}  // namespace axivort::simd
