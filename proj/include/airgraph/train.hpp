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

// Sample windows, the training loop and multi-seed experiments.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "airgraph/checkpoint.hpp"
#include "airgraph/dataio.hpp"
#include "airgraph/featurize.hpp"
#include "airgraph/geograph.hpp"
#include "airgraph/metrics.hpp"
#include "airgraph/model.hpp"
#include "airgraph/tensor.hpp"

namespace airgraph::train {

struct TrainingConfig {
  std::size_t epochs = 50;
  double lr = 5e-4;
  double rms_alpha = 0.99;
  double rms_eps = 1e-8;
  std::size_t batch_size = 8;
  std::size_t horizon = 24;
  std::size_t patience = 5;
  std::uint64_t seed = 0;
  model::Precision precision = model::Precision::kFloat32;
  // 0 keeps every training window; otherwise a seeded subset per epoch.
  std::size_t max_batches_per_epoch = 0;
  std::size_t eval_batch_size = 32;

  double d_theta_km = geo::kDefaultDistanceThresholdKm;
  double m_theta_m = geo::kDefaultRidgeThresholdM;
  std::size_t ridge_samples = geo::kDefaultRidgeSamples;
  feat::WindConvention wind_convention = feat::WindConvention::kToward;
  std::size_t max_fill_gap = 2;

  bool per_cell_categorical = false;
  double threshold = metrics::kPollutionThreshold;

  // Throws ConfigError.
  void validate() const;
};

// Forecast window: observe pm25[start], predict start+1 .. start+horizon.
struct Sample {
  std::size_t start = 0;
};

// Stride-one windows fully inside each range. With `pm25`, windows touching a
// missing value are dropped. Throws DataError for a range shorter than
// horizon + 1.
std::vector<Sample> make_samples(std::span<const feat::IndexRange> ranges, std::size_t horizon,
                                 const num::Tensor<double>* pm25 = nullptr);

// Everything a model needs, standardized with training-range statistics.
struct Prepared {
  geo::GraphTopology topology;
  feat::Standardizer standardizer;
  num::Tensor<double> nodes;     // [T, N, p] standardized
  num::Tensor<double> edges;     // [T, M, q] standardized
  num::Tensor<double> pm25;      // [T, N] standardized, NaN where missing
  num::Tensor<double> pm25_raw;  // [T, N] physical, short gaps filled
  std::vector<std::int64_t> timestamps;
  io::ResolvedSplits splits;

  model::FeatureDims dims() const;
};

Prepared prepare(const io::Dataset& dataset, const io::ResolvedSplits& splits,
                 const TrainingConfig& cfg);

// Same layout but standardized with a stored standardizer (no refit).
Prepared prepare_with(const io::Dataset& dataset, const feat::Standardizer& standardizer,
                      const TrainingConfig& cfg);

struct EpochRecord {
  std::size_t epoch = 0;  // 0 = before the first update
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_val_loss = 0.0;
  double wall_seconds = 0.0;
  bool stopped_early = false;

  const EpochRecord& best() const;
};

// Patience counter over validation losses. Epoch 0 (the untrained model) is
// a candidate like any other.
class EarlyStopping {
 public:
  EarlyStopping(std::size_t patience, double initial_loss);

  // Records one epoch; true when it is the new best.
  bool update(std::size_t epoch, double val_loss);
  bool should_stop() const { return stale_ >= patience_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }

 private:
  std::size_t patience_;
  std::size_t best_epoch_ = 0;
  double best_loss_;
  std::size_t stale_ = 0;
};

using TrainedModel = io::Checkpoint;

struct TrainResult {
  TrainedModel model;
  TrainHistory history;
};

TrainResult train_model(const model::ModelSpec& spec, const Prepared& data,
                        const TrainingConfig& cfg,
                        const std::map<std::string, std::string>& config_snapshot = {});

// Standardized forecasts for the given windows, [window][step][city].
std::vector<double> predict_standardized(const TrainedModel& model, const Prepared& data,
                                         std::span<const Sample> samples,
                                         std::size_t batch_size = 32);

// Physical-unit forecast [horizon, N] from one start index.
std::vector<double> predict(const TrainedModel& model, const Prepared& data, std::size_t start);

struct Evaluation {
  double loss = 0.0;  // standardized MSE
  metrics::MetricsReport report;
  metrics::ForecastSet forecasts;
  std::vector<Sample> samples;
};

Evaluation evaluate(const TrainedModel& model, const Prepared& data,
                    std::span<const feat::IndexRange> ranges, const TrainingConfig& cfg);

// Row names of the results table, in order.
const std::vector<std::string>& table_metrics();

struct RunSummary {
  std::string model;  // display name
  std::uint64_t seed = 0;
  std::map<std::string, double> values;  // keyed by table_metrics()
  TrainHistory history;
};

struct ExperimentResult {
  std::vector<std::string> models;  // column order
  std::vector<RunSummary> runs;

  // Population mean and std over seeds.
  std::pair<double, double> stat(const std::string& model, const std::string& metric) const;
  std::string table() const;  // rows metrics, columns models, "mean ± std"
  std::string csv(const std::string& dataset) const;
};

struct NamedSpec {
  std::string name;
  model::ModelSpec spec;
};

// Trains each spec with seeds seed .. seed+repeats-1 and scores the test
// ranges. `jobs` bounds the worker threads.
ExperimentResult run_experiment(const std::vector<NamedSpec>& specs, const Prepared& data,
                                const TrainingConfig& cfg, std::size_t repeats,
                                std::size_t jobs = 1);

// Output helpers.
std::string history_csv(const TrainHistory& history);
std::string metrics_json(const metrics::MetricsReport& report, double test_loss,
                         const TrainHistory* history);
std::string per_leadtime_csv(const std::string& model, const metrics::MetricsReport& report);

}  // namespace airgraph::train
