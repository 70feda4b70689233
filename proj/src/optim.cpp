// SPDX-License-Identifier: Apache-2.0
#include "genlog/optim.hpp"

#include <cmath>

#include "genlog/error.hpp"
#include "genlog/simd.hpp"

namespace genlog {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, std::int64_t t,
               const AdamConfig& cfg) {
  if (t < 1) throw Error("Adam step counter starts at 1");
  if (grads.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size())
    throw Error("Adam buffers do not match the parameter count");
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  simd::kernels().adam(params.data(), grads.data(), state.m.data(), state.v.data(), params.size(), cfg.beta1,
                       cfg.beta2, cfg.learning_rate, cfg.epsilon, c1, c2);
}

}  // namespace genlog
