// SPDX-License-Identifier: Apache-2.0
// Reference kernels. Plain loops, one operation at a time; the other ISAs
// are tested against these.
#include <algorithm>
#include <cmath>

#include "tables.hpp"

namespace genlog::simd::detail {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void gemv(const double* a, const double* x, double* y, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) y[r] += dot(a + r * cols, x, cols);
}

void gemv_t(const double* a, const double* x, double* y, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double xr = x[r];
    const double* row = a + r * cols;
    for (std::size_t c = 0; c < cols; ++c) y[c] += row[c] * xr;
  }
}

void ger(double* a, const double* u, const double* v, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double ur = u[r];
    double* row = a + r * cols;
    for (std::size_t c = 0; c < cols; ++c) row[c] += ur * v[c];
  }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void abs_diff(double a, const double* b, double* out, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) out[j] = std::fabs(a - b[j]);
}

void min_plus(const double* prev, const double* cost, double* out, std::size_t n) {
  for (std::size_t j = 1; j < n; ++j) out[j] = cost[j] + std::min(prev[j - 1], prev[j]);
}

void adam(double* p, const double* g, double* m, double* v, std::size_t n, double beta1, double beta2,
          double lr, double eps, double c1, double c2) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i]);
    const double mhat = m[i] / c1;
    const double vhat = v[i] / c2;
    p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace

const Kernels& scalar_table() {
  static const Kernels table{Isa::scalar, dot, gemv, gemv_t, ger, axpy, abs_diff, min_plus, adam};
  return table;
}

}  // namespace genlog::simd::detail
