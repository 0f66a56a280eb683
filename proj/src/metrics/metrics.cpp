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

#include "airgraph/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "airgraph/error.hpp"

namespace airgraph::metrics {

const std::vector<std::size_t>& report_leadtimes() {
  static const std::vector<std::size_t> hours = {3, 12, 24, 36, 48, 60, 72};
  return hours;
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  hits += o.hits;
  misses += o.misses;
  false_alarms += o.false_alarms;
  correct_negatives += o.correct_negatives;
  return *this;
}

RmseMae rmse_mae(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) {
    throw ShapeError("rmse_mae: " + std::to_string(pred.size()) + " predictions vs " +
                     std::to_string(truth.size()) + " truths");
  }
  if (pred.empty()) throw ShapeError("rmse_mae: empty input");
  double sq = 0.0, abs_sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double r = truth[i] - pred[i];
    sq += r * r;
    abs_sum += std::abs(r);
  }
  const double n = static_cast<double>(pred.size());
  return {std::sqrt(sq / n), abs_sum / n};
}

ConfusionCounts binarize_and_count(std::span<const double> pred, std::span<const double> truth,
                                   double threshold) {
  if (pred.size() != truth.size()) {
    throw ShapeError("binarize_and_count: " + std::to_string(pred.size()) + " predictions vs " +
                     std::to_string(truth.size()) + " truths");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] > threshold;
    const bool t = truth[i] > threshold;
    if (p && t) ++c.hits;
    else if (!p && t) ++c.misses;
    else if (p && !t) ++c.false_alarms;
    else ++c.correct_negatives;
  }
  return c;
}

CategoricalScores csi_pod_far(const ConfusionCounts& c) {
  CategoricalScores s;
  const auto h = static_cast<double>(c.hits);
  const auto m = static_cast<double>(c.misses);
  const auto f = static_cast<double>(c.false_alarms);
  if (c.hits + c.misses + c.false_alarms == 0) {
    s.csi = 1.0;
    s.degenerate.push_back("csi:no_events");
  } else {
    s.csi = h / (h + m + f);
  }
  if (c.hits + c.misses == 0) {
    s.pod = 1.0;
    s.degenerate.push_back("pod:no_events");
  } else {
    s.pod = h / (h + m);
  }
  if (c.hits + c.false_alarms == 0) {
    s.far = 0.0;
    s.degenerate.push_back("far:no_alarms");
  } else {
    s.far = f / (h + f);
  }
  return s;
}

MetricsReport aggregate_report(const ForecastSet& fs, bool per_cell_categorical,
                               double threshold) {
  const std::size_t expected = fs.windows * fs.steps * fs.cities;
  if (expected == 0) throw ShapeError("aggregate_report: no forecasts");
  if (fs.pred.size() != expected || fs.truth.size() != expected) {
    throw ShapeError("aggregate_report: inconsistent city counts (expected " +
                     std::to_string(expected) + " values, got " + std::to_string(fs.pred.size()) +
                     " predictions and " + std::to_string(fs.truth.size()) + " truths)");
  }
  MetricsReport report;
  report.per_cell_categorical = per_cell_categorical;
  std::set<std::string> notes;

  struct Cell {
    RmseMae err;
    ConfusionCounts counts;
  };
  // cells[s * cities + c]
  std::vector<Cell> cells(fs.steps * fs.cities);
  std::vector<double> p(fs.windows), t(fs.windows);
  for (std::size_t s = 0; s < fs.steps; ++s) {
    for (std::size_t c = 0; c < fs.cities; ++c) {
      for (std::size_t w = 0; w < fs.windows; ++w) {
        p[w] = fs.pred_at(w, s, c);
        t[w] = fs.truth_at(w, s, c);
      }
      cells[s * fs.cities + c] = {rmse_mae(p, t), binarize_and_count(p, t, threshold)};
    }
  }

  const auto summarize = [&](std::size_t step_begin, std::size_t step_end, double& rmse,
                             double& mae, double& csi, double& pod, double& far,
                             ConfusionCounts& pooled) {
    double n = 0.0;
    rmse = mae = csi = pod = far = 0.0;
    for (std::size_t s = step_begin; s < step_end; ++s) {
      for (std::size_t c = 0; c < fs.cities; ++c) {
        const Cell& cell = cells[s * fs.cities + c];
        rmse += cell.err.rmse;
        mae += cell.err.mae;
        pooled += cell.counts;
        if (per_cell_categorical) {
          const CategoricalScores sc = csi_pod_far(cell.counts);
          csi += sc.csi;
          pod += sc.pod;
          far += sc.far;
          for (const auto& d : sc.degenerate) notes.insert("per-cell " + d);
        }
        n += 1.0;
      }
    }
    rmse /= n;
    mae /= n;
    if (per_cell_categorical) {
      csi /= n;
      pod /= n;
      far /= n;
    } else {
      const CategoricalScores sc = csi_pod_far(pooled);
      csi = sc.csi;
      pod = sc.pod;
      far = sc.far;
      for (const auto& d : sc.degenerate) notes.insert(d);
    }
  };

  summarize(0, fs.steps, report.rmse, report.mae, report.csi, report.pod, report.far,
            report.counts);

  for (std::size_t hours : report_leadtimes()) {
    const std::size_t step = hours / kStepHours;  // 1-based
    if (step == 0 || step > fs.steps) continue;
    LeadtimeMetrics lt;
    lt.leadtime_h = hours;
    ConfusionCounts pooled;
    summarize(step - 1, step, lt.rmse, lt.mae, lt.csi, lt.pod, lt.far, pooled);
    report.per_leadtime.push_back(lt);
  }
  report.notes.assign(notes.begin(), notes.end());
  return report;
}

}  // namespace airgraph::metrics
