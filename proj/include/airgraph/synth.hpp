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

// Synthetic transport world and brute-force reference implementations.
//
// The generator places cities in a box, raises Gaussian mountains on an
// elevation grid, draws persistent winds and boundary-layer weather, then
// evolves PM2.5 with a wind-driven exchange between connected cities:
//
//   X[t+1,i] = clamp(r[t,i] X[t,i]
//                    + kappa sum_j (S[t,j->i] X[t,j] - S[t,i->j] X[t,i])
//                    + E[t,i], 0, 500)
//
// r is the retention, lower under a deep boundary layer or rain.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "airgraph/dataio.hpp"
#include "airgraph/featurize.hpp"
#include "airgraph/geograph.hpp"
#include "airgraph/model.hpp"
#include "airgraph/tensor.hpp"

namespace airgraph::synth {

struct Mountain {
  double lat = 0.0;
  double lon = 0.0;
  double height_m = 0.0;
  double radius_deg = 0.0;  // Gaussian sigma

  bool operator==(const Mountain&) const = default;
};

// "lat:lon:height:radius" items separated by ';'. Empty string -> none.
std::vector<Mountain> parse_mountains(std::string_view text);
std::string format_mountains(const std::vector<Mountain>& mountains);

struct SynthConfig {
  std::uint64_t seed = 7;
  std::size_t n_cities = 12;
  double lat_min = 34.0, lat_max = 38.0;
  double lon_min = 110.0, lon_max = 114.0;
  double min_separation_km = 25.0;
  std::size_t n_timesteps = 1440;
  std::size_t burn_in = 56;
  std::int64_t t0 = 1420416000;  // 2015-01-05T00:00:00Z, a Monday

  double kappa = 0.15;
  double decay_base = 0.95;
  // Retention multiplier 1 - pbl_weight * s((PBL - pbl_mid) / pbl_scale)
  // times 1 - rain_weight * min(rain_mm, 1).
  double pbl_weight = 0.1;
  double pbl_mid = 800.0;
  double pbl_scale = 200.0;
  double rain_weight = 0.3;

  double emission_min = 6.5;
  double emission_max = 6.5;
  double diurnal_amplitude = 0.4;

  double wind_u = 1.5;       // m/s, regional mean
  double wind_v = 1.0;
  double wind_noise = 3.0;   // stationary std of the regional AR(1)
  double local_wind_noise = 0.8;
  double wind_phi = 0.95;

  double pbl_mean = 800.0;
  double pbl_amplitude = 500.0;
  double pbl_noise = 250.0;

  std::vector<Mountain> mountains{{36.0, 112.0, 1800.0, 0.3}};
  double grid_margin_deg = 0.5;
  double grid_step_deg = 0.05;
  double d_theta_km = geo::kDefaultDistanceThresholdKm;
  double m_theta_m = geo::kDefaultRidgeThresholdM;

  // Throws ConfigError.
  void validate() const;
};

struct World {
  std::vector<geo::City> cities;
  geo::ElevationGrid grid;
  geo::GraphTopology topology;
  std::int64_t t0 = 0;
  num::Tensor<double> meteo;     // [T, N, 8]
  num::Tensor<double> pm25;      // [T, N]
  num::Tensor<double> emission;  // [T, N], E[t] enters X[t+1]
  num::Tensor<double> retention; // [T, N]
  num::Tensor<double> advection; // [T, M], S per topology edge
};

// Retention multiplier applied to decay_base.
double retention_factor(const SynthConfig& cfg, double pbl_m, double precip_m);

World generate_world(const SynthConfig& cfg);

// One application of the ground-truth recurrence from step t to t+1.
std::vector<double> transport_step(const SynthConfig& cfg, const geo::GraphTopology& topology,
                                   std::span<const double> x, std::span<const double> retention,
                                   std::span<const double> advection,
                                   std::span<const double> emission);

io::Dataset to_dataset(const World& world, const std::string& name);

// Least-squares fit of X[t+1,i] on [1, X[t,i], sum_j S[j->i] X[t,j],
// X[t,i] sum_j S[i->j], E[t,i]] over every step; returns R^2.
double learnability_r2(const World& world);

// Loop transliterations of the graph model, no tensor primitives. Rows of
// `xi` are nodes, rows of `edge_features` follow topology.edges.
num::Tensor<double> bruteforce_spatial(const num::Tensor<double>& xi,
                                       const num::Tensor<double>& edge_features,
                                       const geo::GraphTopology& topology,
                                       const model::ParamSet<double>& params, bool no_export);

num::Tensor<double> bruteforce_rollout(const num::Tensor<double>& x0,
                                       std::span<const num::Tensor<double>> node_features,
                                       std::span<const num::Tensor<double>> edge_features,
                                       const geo::GraphTopology& topology,
                                       const model::ParamSet<double>& params,
                                       const model::ModelSpec& spec);

}  // namespace airgraph::synth
