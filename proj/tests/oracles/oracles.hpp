// SPDX-License-Identifier: Apache-2.0
// Second implementations used to check the library. Deliberately written
// without calling into genlog and in a different shape from the real code.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace genlog::oracle {

struct Cell {
  std::vector<double> h, c;
  double y = 0.0;
};

// Flat layout, per gate k in (f, i, o, g): W[H], U[H*H] row-major, b[H]; then Wy[H], by.
inline Cell lstm_step(const std::vector<double>& P, std::size_t H, double x, const std::vector<double>& h,
                      const std::vector<double>& c) {
  const std::size_t block = H + H * H + H;
  auto pre = [&](std::size_t k, std::size_t r) {
    const double* W = P.data() + k * block;
    const double* U = W + H;
    const double* b = U + H * H;
    double s = b[r] + W[r] * x;
    for (std::size_t q = 0; q < H; ++q) s += U[r * H + q] * h[q];
    return s;
  };
  auto sig = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
  auto relu = [](double z) { return z > 0 ? z : 0.0; };
  Cell out;
  out.h.resize(H);
  out.c.resize(H);
  for (std::size_t r = 0; r < H; ++r) {
    const double f = sig(pre(0, r)), i = sig(pre(1, r)), o = sig(pre(2, r)), g = relu(pre(3, r));
    out.c[r] = f * c[r] + i * g;
    out.h[r] = o * relu(out.c[r]);
  }
  const double* Wy = P.data() + 4 * block;
  out.y = Wy[H];
  for (std::size_t r = 0; r < H; ++r) out.y += Wy[r] * out.h[r];
  return out;
}

inline double predict(const std::vector<double>& P, std::size_t H, const std::vector<double>& window) {
  Cell s{std::vector<double>(H, 0.0), std::vector<double>(H, 0.0), 0.0};
  for (double x : window) s = lstm_step(P, H, x, s.h, s.c);
  return s.y;
}

/// Value of the piecewise-linear function through (t, v) points at time `at`.
inline double interp_at(const std::vector<std::pair<long long, double>>& pts, double at) {
  if (at <= static_cast<double>(pts.front().first)) return pts.front().second;
  if (at >= static_cast<double>(pts.back().first)) return pts.back().second;
  auto hi = std::upper_bound(pts.begin(), pts.end(), at,
                             [](double t, const std::pair<long long, double>& p) { return t < static_cast<double>(p.first); });
  auto lo = hi - 1;
  const double span = static_cast<double>(hi->first - lo->first);
  const double frac = (at - static_cast<double>(lo->first)) / span;
  return lo->second + (hi->second - lo->second) * frac;
}

inline std::vector<double> resample_count(const std::vector<double>& v, long long count) {
  std::vector<double> out;
  const double last = static_cast<double>(v.size() - 1);
  for (long long k = 0; k < count; ++k) {
    const double pos = count == 1 ? 0.0 : last * static_cast<double>(k) / static_cast<double>(count - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    if (i + 1 >= v.size()) {
      out.push_back(v.back());
      continue;
    }
    out.push_back(v[i] + (v[i + 1] - v[i]) * (pos - static_cast<double>(i)));
  }
  return out;
}

namespace detail {
inline void walk(const std::vector<double>& a, const std::vector<double>& b, std::size_t i, std::size_t j, double acc,
                 double& best) {
  acc += std::fabs(a[i] - b[j]);
  if (acc >= best) return;
  if (i + 1 == a.size() && j + 1 == b.size()) {
    best = acc;
    return;
  }
  if (i + 1 < a.size() && j + 1 < b.size()) walk(a, b, i + 1, j + 1, acc, best);
  if (i + 1 < a.size()) walk(a, b, i + 1, j, acc, best);
  if (j + 1 < b.size()) walk(a, b, i, j + 1, acc, best);
}
}  // namespace detail

/// Minimum over every monotone warping path, by explicit enumeration
/// (branch-and-bound only cuts paths that are already no better).
inline double dtw_bruteforce(const std::vector<double>& a, const std::vector<double>& b) {
  double best = std::numeric_limits<double>::infinity();
  detail::walk(a, b, 0, 0, 0.0, best);
  return best;
}

/// Hyndman-Fan type 7 on 1-based ranks.
inline double quantile7(std::vector<double> x, double p) {
  std::sort(x.begin(), x.end());
  const double h = static_cast<double>(x.size() - 1) * p + 1.0;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo >= x.size()) return x.back();
  return x[lo - 1] + (h - static_cast<double>(lo)) * (x[lo] - x[lo - 1]);
}

}  // namespace genlog::oracle
