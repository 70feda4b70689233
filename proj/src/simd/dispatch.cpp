// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <string_view>

#include "tables.hpp"

namespace genlog::simd {
namespace {

bool cpu_has_avx2() {
#if defined(GENLOG_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Kernels& select() {
  const char* env = std::getenv("GENLOG_SIMD");
  if (env != nullptr && std::string_view(env) == "scalar") return detail::scalar_table();
  if (const Kernels* k = kernels_for(Isa::avx2)) return *k;
  return detail::scalar_table();
}

}  // namespace

const Kernels* kernels_for(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &detail::scalar_table();
    case Isa::avx2:
#if defined(GENLOG_HAVE_AVX2)
      if (cpu_has_avx2()) return &detail::avx2_table();
#endif
      return nullptr;
  }
  return nullptr;
}

const Kernels& kernels() {
  static const Kernels& active = select();
  return active;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

}  // namespace genlog::simd
