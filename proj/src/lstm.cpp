// SPDX-License-Identifier: Apache-2.0
#include "genlog/lstm.hpp"

#include <algorithm>
#include <cmath>

#include "genlog/error.hpp"
#include "genlog/simd.hpp"

namespace genlog {
namespace {

constexpr std::size_t kGates = 4;
constexpr Gate kGateOrder[kGates] = {Gate::forget, Gate::input, Gate::output, Gate::candidate};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double relu(double x) { return x > 0.0 ? x : 0.0; }

// Activations of every step of one window, kept for the backward pass.
struct Trace {
  std::size_t hidden = 0;
  std::size_t steps = 0;
  std::vector<double> act[kGates];  // f, i, o, g after activation; steps x H
  std::vector<double> cand_pre;     // pre-activation of g
  std::vector<double> c;
  std::vector<double> h;
  double y = 0.0;

  void resize(std::size_t H, std::size_t L) {
    hidden = H;
    steps = L;
    for (auto& a : act) a.assign(H * L, 0.0);
    cand_pre.assign(H * L, 0.0);
    c.assign(H * L, 0.0);
    h.assign(H * L, 0.0);
  }
  double* row(std::vector<double>& v, std::size_t t) { return v.data() + t * hidden; }
};

// Pre-activation W x + U h_prev + b into `out`.
void gate_input(const LstmParams& p, Gate g, double x, const double* h_prev, double* out,
                const simd::Kernels& k) {
  const std::size_t H = p.hidden();
  const auto b = p.bias(g);
  std::copy(b.begin(), b.end(), out);
  k.axpy(x, p.input_weights(g).data(), out, H);
  if (h_prev != nullptr) k.gemv(p.recurrent_weights(g).data(), h_prev, out, H, H);
}

void forward(const LstmParams& p, std::span<const double> window, Trace& tr, const simd::Kernels& k) {
  const std::size_t H = p.hidden();
  tr.resize(H, window.size());
  for (std::size_t t = 0; t < window.size(); ++t) {
    const double x = window[t];
    const double* h_prev = t > 0 ? tr.row(tr.h, t - 1) : nullptr;
    const double* c_prev = t > 0 ? tr.row(tr.c, t - 1) : nullptr;
    double* f = tr.row(tr.act[0], t);
    double* i = tr.row(tr.act[1], t);
    double* o = tr.row(tr.act[2], t);
    double* g = tr.row(tr.act[3], t);
    double* gp = tr.row(tr.cand_pre, t);
    gate_input(p, Gate::forget, x, h_prev, f, k);
    gate_input(p, Gate::input, x, h_prev, i, k);
    gate_input(p, Gate::output, x, h_prev, o, k);
    gate_input(p, Gate::candidate, x, h_prev, gp, k);
    double* c = tr.row(tr.c, t);
    double* h = tr.row(tr.h, t);
    for (std::size_t u = 0; u < H; ++u) {
      f[u] = sigmoid(f[u]);
      i[u] = sigmoid(i[u]);
      o[u] = sigmoid(o[u]);
      g[u] = relu(gp[u]);
      c[u] = (c_prev != nullptr ? f[u] * c_prev[u] : 0.0) + i[u] * g[u];
      h[u] = o[u] * relu(c[u]);
    }
  }
  const double* h_last = window.empty() ? nullptr : tr.row(tr.h, window.size() - 1);
  tr.y = p.head_bias() + (h_last != nullptr ? k.dot(p.head_weights().data(), h_last, H) : 0.0);
}

// Accumulates d(dy * y)/d(params) for one window into `grad`.
void backward(const LstmParams& p, std::span<const double> window, Trace& tr, double dy, LstmParams& grad,
              const simd::Kernels& k) {
  const std::size_t H = p.hidden();
  const std::size_t L = window.size();
  if (L == 0) {
    grad.head_bias() += dy;
    return;
  }

  k.axpy(dy, tr.row(tr.h, L - 1), grad.head_weights().data(), H);
  grad.head_bias() += dy;

  std::vector<double> dh(H, 0.0), dc(H, 0.0), dh_prev(H), dc_prev(H);
  k.axpy(dy, p.head_weights().data(), dh.data(), H);
  std::vector<double> da[kGates];
  for (auto& v : da) v.assign(H, 0.0);

  for (std::size_t t = L; t-- > 0;) {
    const double* f = tr.row(tr.act[0], t);
    const double* i = tr.row(tr.act[1], t);
    const double* o = tr.row(tr.act[2], t);
    const double* g = tr.row(tr.act[3], t);
    const double* gp = tr.row(tr.cand_pre, t);
    const double* c = tr.row(tr.c, t);
    const double* c_prev = t > 0 ? tr.row(tr.c, t - 1) : nullptr;
    const double* h_prev = t > 0 ? tr.row(tr.h, t - 1) : nullptr;

    for (std::size_t u = 0; u < H; ++u) {
      const double r = relu(c[u]);
      const double d_out = dh[u] * r;
      if (c[u] > 0.0) dc[u] += dh[u] * o[u];
      const double cp = c_prev != nullptr ? c_prev[u] : 0.0;
      da[0][u] = dc[u] * cp * f[u] * (1.0 - f[u]);
      da[1][u] = dc[u] * g[u] * i[u] * (1.0 - i[u]);
      da[2][u] = d_out * o[u] * (1.0 - o[u]);
      da[3][u] = gp[u] > 0.0 ? dc[u] * i[u] : 0.0;
      dc_prev[u] = dc[u] * f[u];
    }

    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    for (std::size_t q = 0; q < kGates; ++q) {
      const Gate gate = kGateOrder[q];
      k.axpy(window[t], da[q].data(), grad.input_weights(gate).data(), H);
      k.axpy(1.0, da[q].data(), grad.bias(gate).data(), H);
      if (h_prev != nullptr) {
        k.ger(grad.recurrent_weights(gate).data(), da[q].data(), h_prev, H, H);
        k.gemv_t(p.recurrent_weights(gate).data(), da[q].data(), dh_prev.data(), H, H);
      }
    }
    std::swap(dh, dh_prev);
    std::swap(dc, dc_prev);
  }
}

void check_set(const LstmParams& p, const SupervisedSet& set) {
  if (set.size() == 0) throw Error("supervised set is empty");
  if (p.hidden() == 0) throw Error("LSTM hidden size must be at least 1");
  if (set.features.size() != set.size() * set.lookback) throw Error("supervised set features are inconsistent");
}

}  // namespace

LstmParams::LstmParams(std::size_t hidden) : hidden_(hidden), data_(flat_size(hidden), 0.0) {}

std::size_t LstmParams::flat_size(std::size_t hidden) {
  return kGates * (hidden + hidden * hidden + hidden) + hidden + 1;
}

std::size_t LstmParams::gate_offset(Gate g) const {
  return static_cast<std::size_t>(g) * (2 * hidden_ + hidden_ * hidden_);
}

std::span<double> LstmParams::input_weights(Gate g) {
  return std::span<double>(data_).subspan(gate_offset(g), hidden_);
}
std::span<const double> LstmParams::input_weights(Gate g) const {
  return std::span<const double>(data_).subspan(gate_offset(g), hidden_);
}
std::span<double> LstmParams::recurrent_weights(Gate g) {
  return std::span<double>(data_).subspan(gate_offset(g) + hidden_, hidden_ * hidden_);
}
std::span<const double> LstmParams::recurrent_weights(Gate g) const {
  return std::span<const double>(data_).subspan(gate_offset(g) + hidden_, hidden_ * hidden_);
}
std::span<double> LstmParams::bias(Gate g) {
  return std::span<double>(data_).subspan(gate_offset(g) + hidden_ + hidden_ * hidden_, hidden_);
}
std::span<const double> LstmParams::bias(Gate g) const {
  return std::span<const double>(data_).subspan(gate_offset(g) + hidden_ + hidden_ * hidden_, hidden_);
}
std::span<double> LstmParams::head_weights() {
  return std::span<double>(data_).subspan(kGates * (2 * hidden_ + hidden_ * hidden_), hidden_);
}
std::span<const double> LstmParams::head_weights() const {
  return std::span<const double>(data_).subspan(kGates * (2 * hidden_ + hidden_ * hidden_), hidden_);
}
double& LstmParams::head_bias() { return data_.back(); }
double LstmParams::head_bias() const { return data_.back(); }

StepResult lstm_step(const LstmParams& p, double x, std::span<const double> h_prev, std::span<const double> c_prev) {
  const std::size_t H = p.hidden();
  if (h_prev.size() != H || c_prev.size() != H) throw Error("state size does not match hidden size");
  const auto& k = simd::kernels();
  std::vector<double> pre[kGates];
  for (std::size_t q = 0; q < kGates; ++q) {
    pre[q].resize(H);
    gate_input(p, kGateOrder[q], x, h_prev.data(), pre[q].data(), k);
  }
  StepResult r;
  r.h.resize(H);
  r.c.resize(H);
  for (std::size_t u = 0; u < H; ++u) {
    const double f = sigmoid(pre[0][u]);
    const double i = sigmoid(pre[1][u]);
    const double o = sigmoid(pre[2][u]);
    const double g = relu(pre[3][u]);
    r.c[u] = f * c_prev[u] + i * g;
    r.h[u] = o * relu(r.c[u]);
  }
  r.y = k.dot(p.head_weights().data(), r.h.data(), H) + p.head_bias();
  return r;
}

double predict_window(const LstmParams& p, std::span<const double> window) {
  if (window.empty()) throw Error("window is empty");
  if (p.hidden() == 0) throw Error("LSTM hidden size must be at least 1");
  Trace tr;
  forward(p, window, tr, simd::kernels());
  return tr.y;
}

double predict_window(const LstmParams& p, std::span<const double> window, std::size_t lookback) {
  if (window.size() != lookback)
    throw Error("window has " + std::to_string(window.size()) + " values, model expects " + std::to_string(lookback));
  return predict_window(p, window);
}

void SupervisedSet::append(const SupervisedSet& other) {
  if (other.size() == 0) return;
  if (size() == 0) lookback = other.lookback;
  if (other.lookback != lookback) throw Error("cannot merge supervised sets with different lookback");
  features.insert(features.end(), other.features.begin(), other.features.end());
  targets.insert(targets.end(), other.targets.begin(), other.targets.end());
}

SupervisedSet make_supervised(std::span<const double> values, std::size_t lookback) {
  if (lookback == 0) throw Error("lookback must be at least 1");
  if (values.size() < lookback + 1)
    throw Error("series too short: need at least " + std::to_string(lookback + 1) + " values, got " +
                std::to_string(values.size()));
  SupervisedSet set;
  set.lookback = lookback;
  const std::size_t n = values.size() - lookback;
  set.features.reserve(n * lookback);
  set.targets.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    set.features.insert(set.features.end(), values.begin() + k, values.begin() + k + lookback);
    set.targets.push_back(values[k + lookback]);
  }
  return set;
}

double mse(std::span<const double> preds, std::span<const double> targets) {
  if (preds.empty()) throw Error("mse of empty vectors");
  if (preds.size() != targets.size()) throw Error("mse length mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < preds.size(); ++k) {
    const double d = preds[k] - targets[k];
    s += d * d;
  }
  return s / static_cast<double>(preds.size());
}

double dataset_loss(const LstmParams& p, const SupervisedSet& set) {
  check_set(p, set);
  const auto& k = simd::kernels();
  Trace tr;
  std::vector<double> preds(set.size());
  for (std::size_t w = 0; w < set.size(); ++w) {
    forward(p, set.window(w), tr, k);
    preds[w] = tr.y;
  }
  return mse(preds, set.targets);
}

LstmGradients bptt_gradients(const LstmParams& p, const SupervisedSet& set) {
  check_set(p, set);
  const auto& k = simd::kernels();
  LstmGradients out{LstmParams(p.hidden()), 0.0};
  const double n = static_cast<double>(set.size());
  Trace tr;
  double sq = 0.0;
  for (std::size_t w = 0; w < set.size(); ++w) {
    forward(p, set.window(w), tr, k);
    const double resid = tr.y - set.targets[w];
    sq += resid * resid;
    backward(p, set.window(w), tr, 2.0 * resid / n, out.grad, k);
  }
  out.loss = sq / n;
  return out;
}

LstmGradients fd_gradient_oracle(const LstmParams& p, const SupervisedSet& set, double step) {
  if (!(step > 0.0)) throw Error("finite-difference step must be positive");
  LstmGradients out{LstmParams(p.hidden()), dataset_loss(p, set)};
  LstmParams probe = p;
  auto flat = probe.flat();
  auto g = out.grad.flat();
  for (std::size_t idx = 0; idx < flat.size(); ++idx) {
    const double orig = flat[idx];
    flat[idx] = orig + step;
    const double up = dataset_loss(probe, set);
    flat[idx] = orig - step;
    const double down = dataset_loss(probe, set);
    flat[idx] = orig;
    g[idx] = (up - down) / (2.0 * step);
  }
  return out;
}

}  // namespace genlog
