// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "genlog/simd.hpp"

namespace genlog::simd::detail {

const Kernels& scalar_table();
#if defined(GENLOG_HAVE_AVX2)
const Kernels& avx2_table();
#endif

}  // namespace genlog::simd::detail
