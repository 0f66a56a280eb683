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

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "airgraph/geograph.hpp"
#include "airgraph/tensor.hpp"

namespace testing {

using airgraph::num::Shape;
using airgraph::num::Tensor;

inline Tensor<double> random_tensor(std::mt19937_64& rng, Shape shape, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(airgraph::num::numel(shape));
  for (double& x : v) x = d(rng);
  return Tensor<double>(std::move(shape), std::move(v));
}

// Values bounded away from zero, for probing kinks with finite differences.
inline Tensor<double> away_from_zero(std::mt19937_64& rng, Shape shape) {
  Tensor<double> t = random_tensor(rng, std::move(shape));
  for (double& x : t.mutable_data()) {
    if (std::abs(x) < 0.05) x = x < 0 ? -0.05 - std::abs(x) : 0.05 + x;
  }
  return t;
}

inline std::size_t uniform_int(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline double max_abs_diff(const Tensor<double>& a, const Tensor<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.at(i) - b.at(i)));
  return m;
}

// Cities on a small lattice jittered by the rng, ids 0..n-1.
inline std::vector<airgraph::geo::City> random_cities(std::mt19937_64& rng, std::size_t n,
                                                      double lat0 = 30.0, double lon0 = 110.0,
                                                      double span = 2.0) {
  std::uniform_real_distribution<double> u(0.0, span);
  std::vector<airgraph::geo::City> out;
  for (std::size_t i = 0; i < n; ++i) {
    airgraph::geo::City c;
    c.id = i;
    c.name = "c" + std::to_string(i);
    c.lat = lat0 + u(rng);
    c.lon = lon0 + u(rng);
    out.push_back(c);
  }
  return out;
}

// Random directed edge list over n nodes with no self loops.
inline std::vector<airgraph::geo::Edge> random_edges(std::mt19937_64& rng, std::size_t n,
                                                     std::size_t m) {
  std::vector<airgraph::geo::Edge> out;
  while (out.size() < m && n > 1) {
    const std::size_t a = uniform_int(rng, 0, n - 1), b = uniform_int(rng, 0, n - 1);
    if (a != b) out.push_back({a, b});
  }
  return out;
}

}  // namespace testing
