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

// Forecast verification: RMSE/MAE and thresholded categorical scores.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace airgraph::metrics {

inline constexpr double kPollutionThreshold = 75.0;  // ug/m3, "good air" upper bound
inline constexpr std::size_t kStepHours = 3;

// Leadtimes (hours) reported in the per-leadtime breakdown.
const std::vector<std::size_t>& report_leadtimes();

struct ConfusionCounts {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t false_alarms = 0;
  std::uint64_t correct_negatives = 0;

  std::uint64_t total() const { return hits + misses + false_alarms + correct_negatives; }
  ConfusionCounts& operator+=(const ConfusionCounts& o);
  bool operator==(const ConfusionCounts&) const = default;
};

struct RmseMae {
  double rmse = 0.0;
  double mae = 0.0;
};

RmseMae rmse_mae(std::span<const double> pred, std::span<const double> truth);

// value > threshold counts as polluted.
ConfusionCounts binarize_and_count(std::span<const double> pred, std::span<const double> truth,
                                   double threshold = kPollutionThreshold);

struct CategoricalScores {
  double csi = 0.0;
  double pod = 0.0;
  double far = 0.0;
  // Which zero-denominator conventions fired, e.g. "pod:no_events".
  std::vector<std::string> degenerate;
};

// Zero denominators: POD -> 1, FAR -> 0, CSI -> 1.
CategoricalScores csi_pod_far(const ConfusionCounts& c);

struct LeadtimeMetrics {
  std::size_t leadtime_h = 0;
  double rmse = 0.0, mae = 0.0, csi = 0.0, pod = 0.0, far = 0.0;
};

struct MetricsReport {
  double rmse = 0.0, mae = 0.0, csi = 0.0, pod = 0.0, far = 0.0;
  ConfusionCounts counts;
  bool per_cell_categorical = false;
  std::vector<LeadtimeMetrics> per_leadtime;
  std::vector<std::string> notes;
};

// Forecast windows in physical units, laid out [window][step][city].
struct ForecastSet {
  std::size_t windows = 0;
  std::size_t steps = 0;
  std::size_t cities = 0;
  std::vector<double> pred;
  std::vector<double> truth;

  double pred_at(std::size_t w, std::size_t s, std::size_t c) const {
    return pred[(w * steps + s) * cities + c];
  }
  double truth_at(std::size_t w, std::size_t s, std::size_t c) const {
    return truth[(w * steps + s) * cities + c];
  }
};

// RMSE/MAE per (city, leadtime) cell over all windows, then averaged over
// cells. Categorical counts pooled over everything, unless
// per_cell_categorical, in which case CSI/POD/FAR are averaged over cells.
MetricsReport aggregate_report(const ForecastSet& forecasts, bool per_cell_categorical = false,
                               double threshold = kPollutionThreshold);

}  // namespace airgraph::metrics
