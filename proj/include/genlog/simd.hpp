// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string_view>

// Inner-loop kernels for the LSTM and DTW hot paths. Every kernel has a
// scalar reference implementation; wider variants are picked at runtime from
// what the CPU reports and must agree with the reference: exactly for
// abs_diff, min_plus and adam, to rounding for the ones that use FMA or
// reorder a sum.
//
// Matrices are dense row-major.

namespace genlog::simd {

enum class Isa { scalar, avx2 };

struct Kernels {
  Isa isa;

  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y += A x, A is rows x cols
  void (*gemv)(const double* a, const double* x, double* y, std::size_t rows, std::size_t cols);
  /// y += A^T x, A is rows x cols
  void (*gemv_t)(const double* a, const double* x, double* y, std::size_t rows, std::size_t cols);
  /// A += u v^T, A is rows x cols
  void (*ger)(double* a, const double* u, const double* v, std::size_t rows, std::size_t cols);
  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// out[j] = |a - b[j]|
  void (*abs_diff)(double a, const double* b, double* out, std::size_t n);
  /// out[j] = cost[j] + min(prev[j-1], prev[j]) for j in [1, n)
  void (*min_plus)(const double* prev, const double* cost, double* out, std::size_t n);
  /// Bias-corrected Adam update; c1 = 1 - beta1^t, c2 = 1 - beta2^t.
  void (*adam)(double* p, const double* g, double* m, double* v, std::size_t n, double beta1,
               double beta2, double lr, double eps, double c1, double c2);
};

/// Kernel table chosen for this process. `GENLOG_SIMD=scalar` in the
/// environment forces the reference kernels.
const Kernels& kernels();

/// Table for a specific ISA, or nullptr when this build or CPU lacks it.
const Kernels* kernels_for(Isa isa);

std::string_view isa_name(Isa isa);

}  // namespace genlog::simd
