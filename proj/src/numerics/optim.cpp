/* Copyright 2026 The airgraph Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "airgraph/optim.hpp"

#include <cmath>
#include <string>

#include "airgraph/error.hpp"

namespace airgraph::num {

template <typename T>
void rmsprop_step(std::span<Tensor<T>> params, std::span<const Tensor<T>> grads,
                  RmspropState<T>& state, const RmspropConfig& cfg) {
  if (!(cfg.lr >= 0.0) || !(cfg.alpha > 0.0 && cfg.alpha < 1.0) || !(cfg.eps > 0.0)) {
    throw ConfigError("rmsprop: need lr >= 0, 0 < alpha < 1, eps > 0");
  }
  if (params.size() != grads.size()) {
    throw ShapeError("rmsprop: " + std::to_string(params.size()) + " parameters but " +
                     std::to_string(grads.size()) + " gradients");
  }
  if (state.acc.empty()) {
    for (const auto& p : params) state.acc.emplace_back(p.size(), T(0));
  }
  if (state.acc.size() != params.size()) throw ShapeError("rmsprop: state does not match parameters");

  const T lr = static_cast<T>(cfg.lr);
  const T alpha = static_cast<T>(cfg.alpha);
  const T eps = static_cast<T>(cfg.eps);
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k].shape() != grads[k].shape() || state.acc[k].size() != params[k].size()) {
      throw ShapeError("rmsprop: parameter " + std::to_string(k) + " shape " +
                       shape_str(params[k].shape()) + " vs gradient " +
                       shape_str(grads[k].shape()));
    }
    auto p = params[k].mutable_data();
    const auto g = grads[k].data();
    auto& acc = state.acc[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      acc[i] = alpha * acc[i] + (T(1) - alpha) * g[i] * g[i];
      p[i] -= lr * g[i] / (std::sqrt(acc[i]) + eps);
    }
  }
  ++state.step;
}

template <typename T>
Tensor<T> mse_loss(const Tensor<T>& pred, const Tensor<T>& truth) {
  if (pred.shape() != truth.shape()) {
    throw ShapeError("mse_loss: shape mismatch " + shape_str(pred.shape()) + " vs " +
                     shape_str(truth.shape()));
  }
  const Tensor<T> r = sub(pred, truth);
  return mean(mul(r, r));
}

template void rmsprop_step(std::span<Tensor<float>>, std::span<const Tensor<float>>,
                           RmspropState<float>&, const RmspropConfig&);
template void rmsprop_step(std::span<Tensor<double>>, std::span<const Tensor<double>>,
                           RmspropState<double>&, const RmspropConfig&);
template Tensor<float> mse_loss(const Tensor<float>&, const Tensor<float>&);
template Tensor<double> mse_loss(const Tensor<double>&, const Tensor<double>&);

}  // namespace airgraph::num
