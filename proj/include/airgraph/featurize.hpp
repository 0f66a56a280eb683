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

// Node and edge feature panels, the wind advection coefficient, and the
// train-range standardizer.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "airgraph/geograph.hpp"
#include "airgraph/tensor.hpp"

namespace airgraph::feat {

inline constexpr std::int64_t kStepSeconds = 10800;  // 3 hours
inline constexpr std::size_t kMeteoFeatures = 8;
inline constexpr std::size_t kTemporalFeatures = 4;
inline constexpr std::size_t kNodeFeatures = kMeteoFeatures + kTemporalFeatures;
inline constexpr std::size_t kEdgeFeatures = 5;
inline constexpr double kPm25Min = 0.0;
inline constexpr double kPm25Max = 500.0;

// Column order of the raw meteorology tensor [T, N, 8].
enum MeteoColumn : std::size_t {
  kPblHeight = 0,      // m
  kKIndex = 1,         // K
  kUWind = 2,          // m/s, eastward, 950 hPa
  kVWind = 3,          // m/s, northward, 950 hPa
  kTemperature2m = 4,  // K
  kRelHumidity = 5,    // %
  kPrecipitation = 6,  // m
  kSurfacePressure = 7,  // Pa
};

enum EdgeColumn : std::size_t {
  kWindSpeedKmh = 0,
  kDistKm = 1,
  kWindDirDeg = 2,
  kEdgeDirDeg = 3,
  kAdvection = 4,
};

const std::array<std::string, kMeteoFeatures>& meteo_feature_names();
const std::array<std::string, kTemporalFeatures>& temporal_feature_names();
const std::array<std::string, kEdgeFeatures>& edge_feature_names();

// `toward`: wind direction is where the air moves to, so wind blowing from
// source to sink gives alpha = 0. `from` is the meteorological reporting
// convention (where the air comes from).
enum class WindConvention { kToward, kFrom };
WindConvention parse_wind_convention(std::string_view s);
std::string_view to_string(WindConvention c);

struct Advection {
  double speed_kmh = 0.0;
  double wind_dir_deg = 0.0;
  double coefficient = 0.0;  // S >= 0
};

// S = ReLU(|v| / d * cos(alpha)), alpha = |gamma - beta| folded into [0, 180].
Advection advection_coefficient(double u_ms, double v_ms, double dist_km, double edge_bearing_deg,
                                WindConvention convention = WindConvention::kToward);

// [sin, cos] of the hour-of-day phase, then of the day-of-week phase
// (Monday = 0). UTC.
std::array<double, kTemporalFeatures> temporal_encoding(std::int64_t epoch_seconds);

struct NodePanel {
  num::Tensor<double> values;  // [T, N, p]
  std::vector<std::string> feature_names;
  std::vector<std::int64_t> timestamps;

  std::size_t steps() const { return values.dim(0); }
  std::size_t nodes() const { return values.dim(1); }
  std::size_t features() const { return values.dim(2); }
};

struct EdgePanel {
  num::Tensor<double> values;  // [T, M, 5], rows follow topology.edges
  std::vector<std::string> feature_names;
};

// Raw meteorology [T, N, 8] plus four temporal columns.
NodePanel build_node_panel(const num::Tensor<double>& meteo, std::int64_t t0,
                           std::int64_t step_seconds = kStepSeconds);

// Table of edge attributes per step, using the SOURCE node's wind. Reads the
// u/v columns of the panel, which must be unstandardized.
EdgePanel build_edge_panel(const NodePanel& raw, const geo::GraphTopology& topology,
                           WindConvention convention = WindConvention::kToward);

struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive

  std::size_t size() const { return end - begin; }
  bool operator==(const IndexRange&) const = default;
};

struct Standardizer {
  std::vector<double> node_mean, node_std;
  std::vector<double> edge_mean, edge_std;
  double pm25_mean = 0.0;
  double pm25_std = 1.0;
  bool fitted = false;
  std::vector<std::string> warnings;

  num::Tensor<double> apply_nodes(const num::Tensor<double>& values) const;
  num::Tensor<double> apply_edges(const num::Tensor<double>& values) const;
  num::Tensor<double> apply_pm25(const num::Tensor<double>& values) const;
  double apply_pm25(double value) const;
  // sigma * x + mu, clamped to [0, 500].
  double invert_prediction(double standardized) const;
  std::vector<double> invert_prediction(std::span<const double> standardized) const;
};

// Per-column mean and population standard deviation over the given training
// steps only. Zero-variance columns get std = 1 and a warning.
Standardizer fit_standardizer(const NodePanel& nodes, const EdgePanel& edges,
                              const num::Tensor<double>& pm25,
                              std::span<const IndexRange> train_ranges);

}  // namespace airgraph::feat
