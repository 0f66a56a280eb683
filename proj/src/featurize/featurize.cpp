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

#include "airgraph/featurize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "airgraph/error.hpp"

namespace airgraph::feat {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Two-pass mean/std over strided columns for accuracy.
void column_stats(const num::Tensor<double>& values, std::span<const IndexRange> ranges,
                  const std::vector<std::string>& names, std::vector<double>& mean,
                  std::vector<double>& stddev, std::vector<std::string>& warnings,
                  const char* panel) {
  const std::size_t rows = values.dim(1), cols = values.dim(2);
  const auto x = values.data();
  mean.assign(cols, 0.0);
  stddev.assign(cols, 0.0);
  std::vector<std::size_t> count(cols, 0);
  for (const IndexRange& r : ranges) {
    for (std::size_t t = r.begin; t < r.end; ++t) {
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t c = 0; c < cols; ++c) {
          const double v = x[(t * rows + i) * cols + c];
          if (!std::isfinite(v)) continue;
          mean[c] += v;
          ++count[c];
        }
      }
    }
  }
  for (std::size_t c = 0; c < cols; ++c) {
    if (count[c] == 0) throw DataError(DataError::Kind::kValidation, "standardizer: empty training range");
    mean[c] /= static_cast<double>(count[c]);
  }
  for (const IndexRange& r : ranges) {
    for (std::size_t t = r.begin; t < r.end; ++t) {
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t c = 0; c < cols; ++c) {
          const double v = x[(t * rows + i) * cols + c];
          if (!std::isfinite(v)) continue;
          stddev[c] += (v - mean[c]) * (v - mean[c]);
        }
      }
    }
  }
  for (std::size_t c = 0; c < cols; ++c) {
    stddev[c] = std::sqrt(stddev[c] / static_cast<double>(count[c]));
    if (!(stddev[c] > 0.0)) {
      stddev[c] = 1.0;
      warnings.push_back(std::string(panel) + " feature '" + (c < names.size() ? names[c] : "?") +
                         "' has zero variance on the training range; std set to 1");
    }
  }
}

num::Tensor<double> apply_columns(const num::Tensor<double>& values, const std::vector<double>& mean,
                                  const std::vector<double>& stddev, const char* what) {
  if (values.rank() == 0 || values.shape().back() != mean.size()) {
    throw ShapeError(std::string("standardizer: ") + what + " tensor has shape " +
                     num::shape_str(values.shape()) + ", expected last dim " +
                     std::to_string(mean.size()));
  }
  num::Tensor<double> out = values.detach();
  auto y = out.mutable_data();
  const std::size_t cols = mean.size();
  for (std::size_t k = 0; k < y.size(); ++k) {
    const std::size_t c = k % cols;
    y[k] = (y[k] - mean[c]) / stddev[c];
  }
  return out;
}

}  // namespace

const std::array<std::string, kMeteoFeatures>& meteo_feature_names() {
  static const std::array<std::string, kMeteoFeatures> names = {
      "pbl_height", "k_index",      "u_wind",        "v_wind",
      "temp_2m",    "rel_humidity", "precipitation", "surface_pressure"};
  return names;
}

const std::array<std::string, kTemporalFeatures>& temporal_feature_names() {
  static const std::array<std::string, kTemporalFeatures> names = {"hour_sin", "hour_cos",
                                                                   "weekday_sin", "weekday_cos"};
  return names;
}

const std::array<std::string, kEdgeFeatures>& edge_feature_names() {
  static const std::array<std::string, kEdgeFeatures> names = {
      "wind_speed_kmh", "dist_km", "wind_dir_deg", "edge_dir_deg", "advection_S"};
  return names;
}

WindConvention parse_wind_convention(std::string_view s) {
  if (s == "toward") return WindConvention::kToward;
  if (s == "from") return WindConvention::kFrom;
  throw ConfigError("wind convention must be 'toward' or 'from', got '" + std::string(s) + "'");
}

std::string_view to_string(WindConvention c) {
  return c == WindConvention::kToward ? "toward" : "from";
}

Advection advection_coefficient(double u_ms, double v_ms, double dist_km, double edge_bearing_deg,
                                WindConvention convention) {
  if (!(dist_km > 0.0)) {
    throw GeometryError("advection_coefficient: distance must be positive, got " +
                        std::to_string(dist_km));
  }
  Advection out;
  out.speed_kmh = 3.6 * std::hypot(u_ms, v_ms);
  double beta = std::atan2(u_ms, v_ms) / kDegToRad;
  if (convention == WindConvention::kFrom) beta += 180.0;
  beta = std::fmod(beta + 360.0, 360.0);
  if (beta >= 360.0) beta = 0.0;
  out.wind_dir_deg = beta;

  double alpha = std::fmod(std::abs(edge_bearing_deg - beta), 360.0);
  if (alpha > 180.0) alpha = 360.0 - alpha;
  out.coefficient = std::max(0.0, out.speed_kmh / dist_km * std::cos(alpha * kDegToRad));
  return out;
}

std::array<double, kTemporalFeatures> temporal_encoding(std::int64_t epoch_seconds) {
  constexpr std::int64_t kDay = 86400;
  std::int64_t days = epoch_seconds / kDay;
  std::int64_t secs = epoch_seconds % kDay;
  if (secs < 0) {
    secs += kDay;
    --days;
  }
  // 1970-01-01 was a Thursday.
  std::int64_t weekday = (days + 3) % 7;
  if (weekday < 0) weekday += 7;
  const double hour_phase = 2.0 * std::numbers::pi * static_cast<double>(secs) / kDay;
  const double day_phase = 2.0 * std::numbers::pi * static_cast<double>(weekday) / 7.0;
  return {std::sin(hour_phase), std::cos(hour_phase), std::sin(day_phase), std::cos(day_phase)};
}

NodePanel build_node_panel(const num::Tensor<double>& meteo, std::int64_t t0,
                           std::int64_t step_seconds) {
  if (meteo.rank() != 3 || meteo.dim(2) != kMeteoFeatures) {
    throw ShapeError("build_node_panel: meteorology must be [T, N, 8], got " +
                     num::shape_str(meteo.shape()));
  }
  if (step_seconds <= 0) throw ConfigError("build_node_panel: step must be positive");
  const std::size_t steps = meteo.dim(0), nodes = meteo.dim(1);
  NodePanel panel;
  std::vector<double> out(steps * nodes * kNodeFeatures);
  const auto x = meteo.data();
  for (std::size_t t = 0; t < steps; ++t) {
    const std::int64_t ts = t0 + static_cast<std::int64_t>(t) * step_seconds;
    panel.timestamps.push_back(ts);
    const auto enc = temporal_encoding(ts);
    for (std::size_t i = 0; i < nodes; ++i) {
      double* row = &out[(t * nodes + i) * kNodeFeatures];
      std::copy_n(&x[(t * nodes + i) * kMeteoFeatures], kMeteoFeatures, row);
      std::copy(enc.begin(), enc.end(), row + kMeteoFeatures);
    }
  }
  panel.values = num::Tensor<double>({steps, nodes, kNodeFeatures}, std::move(out));
  for (const auto& n : meteo_feature_names()) panel.feature_names.push_back(n);
  for (const auto& n : temporal_feature_names()) panel.feature_names.push_back(n);
  return panel;
}

EdgePanel build_edge_panel(const NodePanel& raw, const geo::GraphTopology& topology,
                           WindConvention convention) {
  if (raw.values.rank() != 3 || raw.features() < kMeteoFeatures) {
    throw ShapeError("build_edge_panel: node panel must be [T, N, p>=8], got " +
                     num::shape_str(raw.values.shape()));
  }
  if (raw.nodes() != topology.num_nodes()) {
    throw ShapeError("build_edge_panel: panel has " + std::to_string(raw.nodes()) +
                     " nodes but topology has " + std::to_string(topology.num_nodes()));
  }
  const std::size_t steps = raw.steps(), nodes = raw.nodes(), p = raw.features();
  const std::size_t m = topology.num_edges();
  std::vector<double> out(steps * m * kEdgeFeatures);
  const auto x = raw.values.data();
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t e = 0; e < m; ++e) {
      const std::size_t src = topology.edges[e].src;
      const double u = x[(t * nodes + src) * p + kUWind];
      const double v = x[(t * nodes + src) * p + kVWind];
      const Advection adv =
          advection_coefficient(u, v, topology.dist_km[e], topology.bearing_deg[e], convention);
      double* row = &out[(t * m + e) * kEdgeFeatures];
      row[kWindSpeedKmh] = adv.speed_kmh;
      row[kDistKm] = topology.dist_km[e];
      row[kWindDirDeg] = adv.wind_dir_deg;
      row[kEdgeDirDeg] = topology.bearing_deg[e];
      row[kAdvection] = adv.coefficient;
    }
  }
  EdgePanel panel;
  panel.values = num::Tensor<double>({steps, m, kEdgeFeatures}, std::move(out));
  for (const auto& n : edge_feature_names()) panel.feature_names.push_back(n);
  return panel;
}

Standardizer fit_standardizer(const NodePanel& nodes, const EdgePanel& edges,
                              const num::Tensor<double>& pm25,
                              std::span<const IndexRange> train_ranges) {
  const std::size_t steps = nodes.steps();
  if (train_ranges.empty()) throw DataError(DataError::Kind::kValidation, "standardizer: no training range");
  for (const IndexRange& r : train_ranges) {
    if (r.begin >= r.end || r.end > steps) {
      throw DataError(DataError::Kind::kValidation, "standardizer: training range outside the panel");
    }
  }
  if (pm25.rank() != 2 || pm25.dim(0) != steps || pm25.dim(1) != nodes.nodes()) {
    throw ShapeError("fit_standardizer: pm25 shape " + num::shape_str(pm25.shape()) +
                     " does not match node panel " + num::shape_str(nodes.values.shape()));
  }
  Standardizer s;
  column_stats(nodes.values, train_ranges, nodes.feature_names, s.node_mean, s.node_std,
               s.warnings, "node");
  if (edges.values.rank() == 3 && edges.values.dim(1) > 0) {
    column_stats(edges.values, train_ranges, edges.feature_names, s.edge_mean, s.edge_std,
                 s.warnings, "edge");
  } else {
    s.edge_mean.assign(kEdgeFeatures, 0.0);
    s.edge_std.assign(kEdgeFeatures, 1.0);
  }
  const num::Tensor<double> pm = reshape(pm25, {steps, nodes.nodes(), 1});
  std::vector<double> mu, sd;
  column_stats(pm, train_ranges, {"pm25"}, mu, sd, s.warnings, "target");
  s.pm25_mean = mu[0];
  s.pm25_std = sd[0];
  s.fitted = true;
  return s;
}

num::Tensor<double> Standardizer::apply_nodes(const num::Tensor<double>& values) const {
  if (!fitted) throw Error("standardizer: apply before fit");
  return apply_columns(values, node_mean, node_std, "node");
}

num::Tensor<double> Standardizer::apply_edges(const num::Tensor<double>& values) const {
  if (!fitted) throw Error("standardizer: apply before fit");
  return apply_columns(values, edge_mean, edge_std, "edge");
}

num::Tensor<double> Standardizer::apply_pm25(const num::Tensor<double>& values) const {
  if (!fitted) throw Error("standardizer: apply before fit");
  num::Tensor<double> out = values.detach();
  for (double& v : out.mutable_data()) v = (v - pm25_mean) / pm25_std;
  return out;
}

double Standardizer::apply_pm25(double value) const {
  if (!fitted) throw Error("standardizer: apply before fit");
  return (value - pm25_mean) / pm25_std;
}

double Standardizer::invert_prediction(double standardized) const {
  if (!fitted) throw Error("standardizer: invert before fit");
  return std::clamp(pm25_std * standardized + pm25_mean, kPm25Min, kPm25Max);
}

std::vector<double> Standardizer::invert_prediction(std::span<const double> standardized) const {
  std::vector<double> out;
  out.reserve(standardized.size());
  for (double v : standardized) out.push_back(invert_prediction(v));
  return out;
}

}  // namespace airgraph::feat
