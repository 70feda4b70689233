// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace genlog {

enum class Gate : std::size_t { forget = 0, input = 1, output = 2, candidate = 3 };

/// Single-layer LSTM over a scalar input with a dense scalar head.
///
/// All parameters live in one flat buffer in the order
///   Wf, Uf, bf, Wi, Ui, bi, Wo, Uo, bo, Wg, Ug, bg, Wy, by
/// where W* are H x 1, U* are H x H (row-major, row = receiving unit),
/// b* are H, Wy is 1 x H and by is a scalar.
class LstmParams {
 public:
  LstmParams() = default;
  explicit LstmParams(std::size_t hidden);

  static std::size_t flat_size(std::size_t hidden);

  std::size_t hidden() const noexcept { return hidden_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<double> flat() noexcept { return data_; }
  std::span<const double> flat() const noexcept { return data_; }

  std::span<double> input_weights(Gate g);
  std::span<const double> input_weights(Gate g) const;
  std::span<double> recurrent_weights(Gate g);
  std::span<const double> recurrent_weights(Gate g) const;
  std::span<double> bias(Gate g);
  std::span<const double> bias(Gate g) const;
  std::span<double> head_weights();
  std::span<const double> head_weights() const;
  double& head_bias();
  double head_bias() const;

  friend bool operator==(const LstmParams&, const LstmParams&) = default;

 private:
  std::size_t gate_offset(Gate g) const;

  std::size_t hidden_ = 0;
  std::vector<double> data_;
};

struct StepResult {
  std::vector<double> h;
  std::vector<double> c;
  double y = 0.0;
};

/// One cell update:
///   f = sig(Wf x + Uf h + bf), i = sig(..), o = sig(..)
///   g = relu(Wg x + Ug h + bg)
///   c = f * c_prev + i * g,  h = o * relu(c),  y = Wy h + by
StepResult lstm_step(const LstmParams& p, double x, std::span<const double> h_prev,
                     std::span<const double> c_prev);

/// Runs the cell over `window` from a zero state and returns the final head output.
double predict_window(const LstmParams& p, std::span<const double> window);
/// As above, rejecting windows whose length is not `lookback`.
double predict_window(const LstmParams& p, std::span<const double> window, std::size_t lookback);

/// Sliding windows of length `lookback` and the value that follows each.
struct SupervisedSet {
  std::size_t lookback = 0;
  std::vector<double> features;  // size() x lookback, row-major
  std::vector<double> targets;

  std::size_t size() const noexcept { return targets.size(); }
  std::span<const double> window(std::size_t k) const {
    return std::span<const double>(features).subspan(k * lookback, lookback);
  }
  /// Appends every window of `other` (same lookback).
  void append(const SupervisedSet& other);
};

SupervisedSet make_supervised(std::span<const double> values, std::size_t lookback);

double mse(std::span<const double> preds, std::span<const double> targets);

/// Mean-over-windows MSE of `p` on `set`; every window starts from a zero state.
double dataset_loss(const LstmParams& p, const SupervisedSet& set);

struct LstmGradients {
  LstmParams grad;
  double loss = 0.0;
};

/// Exact gradients of dataset_loss by backpropagation through time.
LstmGradients bptt_gradients(const LstmParams& p, const SupervisedSet& set);

/// Central finite differences of dataset_loss, one parameter at a time.
LstmGradients fd_gradient_oracle(const LstmParams& p, const SupervisedSet& set, double step);

}  // namespace genlog
