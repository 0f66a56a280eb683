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

#include <cstddef>
#include <functional>
#include <vector>

#include "airgraph/tensor.hpp"

namespace airgraph::num {

// A deterministic scalar function of a parameter list. It is called once
// with the parameters on a tape and many times with plain constants.
using ScalarFn = std::function<Tensor<double>(const std::vector<Tensor<double>>& params)>;

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  std::size_t entries_checked = 0;
};

// Compares tape gradients against central differences, entry by entry:
//   |g_ad - g_fd| / max(1e-12, |g_ad| + |g_fd|)
// NaN anywhere in f yields a NaN max_relative_error.
GradCheckReport grad_check(const ScalarFn& f, const std::vector<Tensor<double>>& params,
                           double eps = 1e-5);

}  // namespace airgraph::num
