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

#include "airgraph/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "airgraph/error.hpp"

namespace airgraph::num {

GradCheckReport grad_check(const ScalarFn& f, const std::vector<Tensor<double>>& params,
                           double eps) {
  if (!(eps > 0.0)) throw ConfigError("grad_check: eps must be positive");

  std::vector<Tensor<double>> analytic;
  {
    Tape<double> tape;
    std::vector<Tensor<double>> watched;
    watched.reserve(params.size());
    for (const auto& p : params) watched.push_back(tape.watch(p.detach()));
    const Tensor<double> loss = f(watched);
    if (!loss.on_tape()) {
      // Constant function of the parameters.
      for (const auto& p : params) analytic.push_back(Tensor<double>::zeros(p.shape()));
    } else {
      analytic = tape.backward(loss);
    }
  }

  GradCheckReport report;
  std::vector<Tensor<double>> probe;
  for (const auto& p : params) probe.push_back(p.detach());
  for (std::size_t k = 0; k < probe.size(); ++k) {
    for (std::size_t i = 0; i < probe[k].size(); ++i) {
      const double original = probe[k].at(i);
      probe[k].mutable_data()[i] = original + eps;
      const double up = f(probe).item();
      probe[k].mutable_data()[i] = original - eps;
      const double down = f(probe).item();
      probe[k].mutable_data()[i] = original;

      const double fd = (up - down) / (2.0 * eps);
      const double ad = analytic[k].at(i);
      const double err = std::abs(ad - fd) / std::max(1e-12, std::abs(ad) + std::abs(fd));
      ++report.entries_checked;
      if (std::isnan(err)) {
        report.max_relative_error = std::numeric_limits<double>::quiet_NaN();
        report.worst_param = k;
        report.worst_index = i;
        return report;
      }
      if (err > report.max_relative_error) {
        report.max_relative_error = err;
        report.worst_param = k;
        report.worst_index = i;
      }
    }
  }
  return report;
}

}  // namespace airgraph::num
