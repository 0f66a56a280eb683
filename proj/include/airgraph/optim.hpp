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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "airgraph/tensor.hpp"

namespace airgraph::num {

struct RmspropConfig {
  double lr = 5e-4;
  double alpha = 0.99;
  double eps = 1e-8;
};

template <typename T>
struct RmspropState {
  // One running mean-square accumulator per parameter, same length.
  std::vector<std::vector<T>> acc;
  std::uint64_t step = 0;
};

// acc <- alpha*acc + (1-alpha)*g^2 ;  p <- p - lr*g/(sqrt(acc)+eps)
// Parameters must be off-tape. An empty state is sized on first use.
template <typename T>
void rmsprop_step(std::span<Tensor<T>> params, std::span<const Tensor<T>> grads,
                  RmspropState<T>& state, const RmspropConfig& cfg);

// Mean of squared residuals over every entry. For [T,N] inputs this is the
// per-step average of the per-node average.
template <typename T>
Tensor<T> mse_loss(const Tensor<T>& pred, const Tensor<T>& truth);

}  // namespace airgraph::num
