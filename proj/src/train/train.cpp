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

#include "airgraph/train.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "airgraph/error.hpp"
#include "airgraph/optim.hpp"
#include "airgraph/textio.hpp"

namespace airgraph::train {

namespace {

using num::Tensor;

template <typename T>
struct Batch {
  Tensor<T> x0;                  // [B*N, 1]
  std::vector<Tensor<T>> nodes;  // horizon x [B*N, p]
  std::vector<Tensor<T>> edges;  // horizon x [B*M, q]
  Tensor<T> truth;               // [horizon, B*N, 1]
};

template <typename T>
Batch<T> make_batch(const Prepared& d, std::span<const Sample> samples, std::size_t horizon) {
  const std::size_t n = d.pm25.dim(1), p = d.nodes.dim(2);
  const std::size_t m = d.edges.dim(1), q = d.edges.dim(2);
  const std::size_t b = samples.size();
  const auto pm = d.pm25.data();
  const auto nodes = d.nodes.data();
  const auto edges = d.edges.data();

  Batch<T> out;
  std::vector<T> x0(b * n);
  for (std::size_t k = 0; k < b; ++k) {
    for (std::size_t i = 0; i < n; ++i) x0[k * n + i] = static_cast<T>(pm[samples[k].start * n + i]);
  }
  out.x0 = Tensor<T>({b * n, 1}, std::move(x0));
  std::vector<T> truth(horizon * b * n);
  for (std::size_t s = 1; s <= horizon; ++s) {
    std::vector<T> pv(b * n * p), qv(b * m * q);
    for (std::size_t k = 0; k < b; ++k) {
      const std::size_t t = samples[k].start + s;
      std::transform(nodes.begin() + static_cast<std::ptrdiff_t>(t * n * p),
                     nodes.begin() + static_cast<std::ptrdiff_t>((t + 1) * n * p),
                     pv.begin() + static_cast<std::ptrdiff_t>(k * n * p),
                     [](double v) { return static_cast<T>(v); });
      std::transform(edges.begin() + static_cast<std::ptrdiff_t>(t * m * q),
                     edges.begin() + static_cast<std::ptrdiff_t>((t + 1) * m * q),
                     qv.begin() + static_cast<std::ptrdiff_t>(k * m * q),
                     [](double v) { return static_cast<T>(v); });
      for (std::size_t i = 0; i < n; ++i) {
        truth[((s - 1) * b + k) * n + i] = static_cast<T>(pm[t * n + i]);
      }
    }
    out.nodes.emplace_back(num::Shape{b * n, p}, std::move(pv));
    out.edges.emplace_back(num::Shape{b * m, q}, std::move(qv));
  }
  out.truth = Tensor<T>({horizon, b * n, 1}, std::move(truth));
  return out;
}

class EdgeIndexCache {
 public:
  explicit EdgeIndexCache(const geo::GraphTopology& topology) : topology_(topology) {}

  const model::EdgeIndex& get(std::size_t copies) {
    auto it = cache_.find(copies);
    if (it == cache_.end()) {
      it = cache_.emplace(copies, model::EdgeIndex::from_topology(topology_, copies)).first;
    }
    return it->second;
  }

 private:
  const geo::GraphTopology& topology_;
  std::map<std::size_t, model::EdgeIndex> cache_;
};

// Forecasts for `samples` in standardized space, [window][step][city], plus
// the summed squared error against the standardized truth.
template <typename T>
std::pair<std::vector<double>, double> forecast_windows(const model::ModelSpec& spec,
                                                        const model::ParamSet<T>& params,
                                                        const Prepared& d,
                                                        std::span<const Sample> samples,
                                                        std::size_t horizon,
                                                        std::size_t batch_size,
                                                        EdgeIndexCache& cache) {
  const std::size_t n = d.pm25.dim(1);
  std::vector<double> out(samples.size() * horizon * n);
  double sq = 0.0;
  for (std::size_t lo = 0; lo < samples.size(); lo += batch_size) {
    const std::size_t hi = std::min(samples.size(), lo + batch_size);
    const auto chunk = samples.subspan(lo, hi - lo);
    const Batch<T> batch = make_batch<T>(d, chunk, horizon);
    const model::EdgeIndex& ei = cache.get(chunk.size());
    const Tensor<T> pred = model::forecast<T>(spec, params, batch.x0, batch.nodes, batch.edges, ei);
    const auto pv = pred.data();
    const auto tv = batch.truth.data();
    for (std::size_t s = 0; s < horizon; ++s) {
      for (std::size_t k = 0; k < chunk.size(); ++k) {
        for (std::size_t i = 0; i < n; ++i) {
          const std::size_t src = (s * chunk.size() + k) * n + i;
          const double v = static_cast<double>(pv[src]);
          out[((lo + k) * horizon + s) * n + i] = v;
          const double r = v - static_cast<double>(tv[src]);
          sq += r * r;
        }
      }
    }
  }
  return {std::move(out), sq};
}

template <typename T>
double mean_loss(const model::ModelSpec& spec, const model::ParamSet<T>& params, const Prepared& d,
                 std::span<const Sample> samples, const TrainingConfig& cfg,
                 EdgeIndexCache& cache) {
  if (samples.empty()) return 0.0;
  const auto [pred, sq] =
      forecast_windows(spec, params, d, samples, cfg.horizon, cfg.eval_batch_size, cache);
  return sq / static_cast<double>(pred.size());
}

std::string describe_sample(std::span<const Sample> samples, std::size_t lo) {
  return "sample " + std::to_string(lo) + " (start index " + std::to_string(samples[lo].start) + ")";
}

template <typename T>
TrainResult train_impl(const model::ModelSpec& spec, const Prepared& d, const TrainingConfig& cfg,
                       const std::map<std::string, std::string>& snapshot) {
  const auto started = std::chrono::steady_clock::now();
  spec.validate();
  cfg.validate();
  const model::FeatureDims dims = d.dims();
  const std::vector<Sample> train = make_samples(d.splits.train, cfg.horizon, &d.pm25);
  const std::vector<Sample> val = make_samples(d.splits.validate, cfg.horizon, &d.pm25);
  if (train.empty()) throw DataError(DataError::Kind::kValidation, "no complete training windows");
  if (val.empty()) throw DataError(DataError::Kind::kValidation, "no complete validation windows");

  EdgeIndexCache cache(d.topology);
  model::ParamSet<T> params = model::init_params<T>(spec, dims);
  num::RmspropState<T> state;
  const num::RmspropConfig rms{cfg.lr, cfg.rms_alpha, cfg.rms_eps};
  std::mt19937_64 rng(cfg.seed);

  TrainHistory hist;
  const double val0 = mean_loss(spec, params, d, val, cfg, cache);
  hist.epochs.push_back({0, mean_loss(spec, params, d, train, cfg, cache), val0});
  EarlyStopping stopper(cfg.patience, val0);
  model::ParamSet<T> best = params;

  std::vector<std::size_t> order(train.size());
  std::vector<Sample> batch_samples;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t batches = (order.size() + cfg.batch_size - 1) / cfg.batch_size;
    if (cfg.max_batches_per_epoch > 0) batches = std::min(batches, cfg.max_batches_per_epoch);
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (std::size_t bi = 0; bi < batches; ++bi) {
      const std::size_t lo = bi * cfg.batch_size;
      const std::size_t hi = std::min(order.size(), lo + cfg.batch_size);
      batch_samples.clear();
      for (std::size_t k = lo; k < hi; ++k) batch_samples.push_back(train[order[k]]);
      const Batch<T> batch = make_batch<T>(d, batch_samples, cfg.horizon);

      num::Tape<T> tape;
      const model::ParamSet<T> watched = model::watch_params(params, tape);
      const Tensor<T> pred = model::forecast<T>(spec, watched, batch.x0, batch.nodes, batch.edges,
                                                cache.get(batch_samples.size()));
      const Tensor<T> loss = num::mse_loss(pred, batch.truth);
      const double value = static_cast<double>(loss.item());
      if (!std::isfinite(value)) {
        throw TrainingAborted("training diverged: loss " + text::format_double(value) +
                              " at epoch " + std::to_string(epoch) + ", batch " +
                              std::to_string(bi) + ", " +
                              describe_sample(train, order[lo]));
      }
      const std::vector<Tensor<T>> grads = tape.backward(loss);
      num::rmsprop_step<T>(params.values, grads, state, rms);
      loss_sum += value * static_cast<double>(hi - lo);
      loss_count += hi - lo;
    }
    const double val_loss = mean_loss(spec, params, d, val, cfg, cache);
    if (!std::isfinite(val_loss)) {
      throw TrainingAborted("validation loss is " + text::format_double(val_loss) + " at epoch " +
                            std::to_string(epoch));
    }
    hist.epochs.push_back({epoch, loss_sum / static_cast<double>(loss_count), val_loss});
    if (stopper.update(epoch, val_loss)) best = params;
    if (stopper.should_stop()) {
      hist.stopped_early = epoch < cfg.epochs;
      break;
    }
  }
  hist.best_epoch = stopper.best_epoch();
  hist.best_val_loss = stopper.best_loss();

  TrainResult out;
  TrainedModel& m = out.model;
  m.spec = spec;
  m.dims = dims;
  m.precision = cfg.precision;
  m.params = model::cast_params<double>(best);
  m.standardizer = d.standardizer;
  m.config = snapshot;
  m.d_theta_km = cfg.d_theta_km;
  m.m_theta_m = cfg.m_theta_m;
  m.ridge_samples = cfg.ridge_samples;
  m.wind_convention = cfg.wind_convention;
  m.horizon = cfg.horizon;
  m.final_val_loss = hist.best_val_loss;
  hist.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  out.history = std::move(hist);
  return out;
}

Prepared assemble(const io::Dataset& ds, const TrainingConfig& cfg) {
  cfg.validate();
  Prepared d;
  d.topology = geo::build_adjacency(ds.cities, ds.grid, cfg.d_theta_km, cfg.m_theta_m,
                                    cfg.ridge_samples);
  const feat::NodePanel raw =
      feat::build_node_panel(ds.meteo, ds.manifest.t0, ds.manifest.step_seconds);
  d.timestamps = raw.timestamps;
  const feat::EdgePanel edges = feat::build_edge_panel(raw, d.topology, cfg.wind_convention);
  d.nodes = raw.values;
  d.edges = edges.values;
  d.pm25_raw = ds.pm25.detach();
  io::fill_short_gaps(d.pm25_raw, cfg.max_fill_gap);
  return d;
}

void standardize(Prepared& d) {
  d.nodes = d.standardizer.apply_nodes(d.nodes);
  d.edges = d.standardizer.apply_edges(d.edges);
  d.pm25 = d.standardizer.apply_pm25(d.pm25_raw);
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

void TrainingConfig::validate() const {
  const auto fail = [](const std::string& msg) { throw ConfigError("train: " + msg); };
  if (epochs < 1) fail("epochs must be >= 1");
  if (!(lr >= 0) || !std::isfinite(lr)) fail("lr must be a finite value >= 0");
  if (!(rms_alpha > 0 && rms_alpha < 1)) fail("rms_alpha must lie in (0, 1)");
  if (!(rms_eps > 0)) fail("rms_eps must be > 0");
  if (batch_size < 1 || eval_batch_size < 1) fail("batch sizes must be >= 1");
  if (horizon < 1) fail("horizon must be >= 1");
  if (patience < 1) fail("patience must be >= 1");
  if (!(d_theta_km >= 0) || std::isnan(m_theta_m)) fail("bad graph thresholds");
  if (ridge_samples < 2) fail("ridge_samples must be >= 2");
}

std::vector<Sample> make_samples(std::span<const feat::IndexRange> ranges, std::size_t horizon,
                                 const num::Tensor<double>* pm25) {
  std::vector<Sample> out;
  for (const feat::IndexRange& r : ranges) {
    if (r.end < r.begin || r.size() < horizon + 1) {
      throw DataError(DataError::Kind::kValidation,
                      "range [" + std::to_string(r.begin) + ", " + std::to_string(r.end) +
                          ") holds " + std::to_string(r.end - r.begin) +
                          " steps, fewer than horizon + 1 = " + std::to_string(horizon + 1));
    }
    if (pm25 != nullptr && r.end > pm25->dim(0)) {
      throw DataError(DataError::Kind::kValidation, "range extends past the end of the data");
    }
    // missing[t]: the window starting at t contains a NaN; found by a sweep.
    std::size_t last_missing = SIZE_MAX;
    const std::size_t n = pm25 != nullptr ? pm25->dim(1) : 0;
    const auto row_missing = [&](std::size_t t) {
      for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(pm25->at(t * n + i))) return true;
      }
      return false;
    };
    for (std::size_t t = r.begin; t < r.begin + horizon && pm25 != nullptr; ++t) {
      if (row_missing(t)) last_missing = t;
    }
    for (std::size_t t = r.begin; t + horizon < r.end; ++t) {
      if (pm25 != nullptr && row_missing(t + horizon)) last_missing = t + horizon;
      if (last_missing != SIZE_MAX && last_missing >= t) continue;
      out.push_back({t});
    }
  }
  return out;
}

model::FeatureDims Prepared::dims() const {
  return {nodes.dim(2), edges.dim(2), pm25.dim(1)};
}

Prepared prepare(const io::Dataset& dataset, const io::ResolvedSplits& splits,
                 const TrainingConfig& cfg) {
  Prepared d = assemble(dataset, cfg);
  d.splits = splits;
  feat::NodePanel nodes{d.nodes, {}, d.timestamps};
  for (const auto& s : feat::meteo_feature_names()) nodes.feature_names.push_back(s);
  for (const auto& s : feat::temporal_feature_names()) nodes.feature_names.push_back(s);
  feat::EdgePanel edges{d.edges, {}};
  for (const auto& s : feat::edge_feature_names()) edges.feature_names.push_back(s);
  d.standardizer = feat::fit_standardizer(nodes, edges, d.pm25_raw, splits.train);
  standardize(d);
  return d;
}

Prepared prepare_with(const io::Dataset& dataset, const feat::Standardizer& standardizer,
                      const TrainingConfig& cfg) {
  Prepared d = assemble(dataset, cfg);
  d.standardizer = standardizer;
  standardize(d);
  return d;
}

EarlyStopping::EarlyStopping(std::size_t patience, double initial_loss)
    : patience_(patience), best_loss_(initial_loss) {}

bool EarlyStopping::update(std::size_t epoch, double val_loss) {
  if (val_loss < best_loss_) {
    best_loss_ = val_loss;
    best_epoch_ = epoch;
    stale_ = 0;
    return true;
  }
  ++stale_;
  return false;
}

const EpochRecord& TrainHistory::best() const {
  for (const EpochRecord& r : epochs) {
    if (r.epoch == best_epoch) return r;
  }
  throw Error("history has no record for the best epoch");
}

TrainResult train_model(const model::ModelSpec& spec, const Prepared& data,
                        const TrainingConfig& cfg,
                        const std::map<std::string, std::string>& config_snapshot) {
  if (cfg.precision == model::Precision::kFloat32) {
    return train_impl<float>(spec, data, cfg, config_snapshot);
  }
  return train_impl<double>(spec, data, cfg, config_snapshot);
}

std::vector<double> predict_standardized(const TrainedModel& model, const Prepared& data,
                                         std::span<const Sample> samples,
                                         std::size_t batch_size) {
  if (model.dims != data.dims()) {
    throw ShapeError("model was trained on " + std::to_string(model.dims.num_nodes) + " nodes, " +
                     std::to_string(model.dims.node_features) + " node and " +
                     std::to_string(model.dims.edge_features) +
                     " edge features; the data does not match");
  }
  for (const Sample& s : samples) {
    if (s.start + model.horizon >= data.pm25.dim(0)) {
      throw DataError(DataError::Kind::kValidation,
                      "forecast from step " + std::to_string(s.start) + " needs features up to step " +
                          std::to_string(s.start + model.horizon) + ", past the end of the data");
    }
  }
  EdgeIndexCache cache(data.topology);
  if (model.precision == model::Precision::kFloat32) {
    const auto params = model::cast_params<float>(model.params);
    return forecast_windows<float>(model.spec, params, data, samples, model.horizon, batch_size,
                                   cache)
        .first;
  }
  return forecast_windows<double>(model.spec, model.params, data, samples, model.horizon,
                                  batch_size, cache)
      .first;
}

std::vector<double> predict(const TrainedModel& model, const Prepared& data, std::size_t start) {
  const std::size_t n = data.pm25.dim(1);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(data.pm25.at(start * n + i))) {
      throw DataError(DataError::Kind::kValidation,
                      "no observed concentration for city " + std::to_string(i) + " at the start step");
    }
  }
  const Sample s{start};
  return model.standardizer.invert_prediction(
      predict_standardized(model, data, std::span<const Sample>(&s, 1), 1));
}

Evaluation evaluate(const TrainedModel& model, const Prepared& data,
                    std::span<const feat::IndexRange> ranges, const TrainingConfig& cfg) {
  Evaluation ev;
  ev.samples = make_samples(ranges, model.horizon, &data.pm25);
  if (ev.samples.empty()) throw DataError(DataError::Kind::kValidation, "no complete test windows");
  const std::vector<double> z =
      predict_standardized(model, data, ev.samples, cfg.eval_batch_size);
  const std::size_t n = data.pm25.dim(1), h = model.horizon;
  metrics::ForecastSet& fs = ev.forecasts;
  fs.windows = ev.samples.size();
  fs.steps = h;
  fs.cities = n;
  fs.pred = model.standardizer.invert_prediction(z);
  fs.truth.resize(z.size());
  double sq = 0.0;
  for (std::size_t w = 0; w < fs.windows; ++w) {
    for (std::size_t s = 0; s < h; ++s) {
      const std::size_t t = ev.samples[w].start + s + 1;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = (w * h + s) * n + i;
        fs.truth[k] = data.pm25_raw.at(t * n + i);
        const double r = z[k] - data.pm25.at(t * n + i);
        sq += r * r;
      }
    }
  }
  ev.loss = sq / static_cast<double>(z.size());
  ev.report = metrics::aggregate_report(fs, cfg.per_cell_categorical, cfg.threshold);
  return ev;
}

const std::vector<std::string>& table_metrics() {
  static const std::vector<std::string> rows = {"Train_Loss", "Validate_Loss", "Test_Loss", "RMSE",
                                                "MAE",        "CSI",           "POD",       "FAR"};
  return rows;
}

std::pair<double, double> ExperimentResult::stat(const std::string& model,
                                                 const std::string& metric) const {
  std::vector<double> v;
  for (const RunSummary& r : runs) {
    if (r.model == model) v.push_back(r.values.at(metric));
  }
  if (v.empty()) throw ConfigError("no runs for model '" + model + "'");
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

std::string ExperimentResult::table() const {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"metric"});
  for (const auto& m : models) cells.back().push_back(m);
  for (const auto& metric : table_metrics()) {
    cells.push_back({metric});
    for (const auto& m : models) {
      const auto [mean, sd] = stat(m, metric);
      cells.back().push_back(fixed(mean, 4) + " ± " + fixed(sd, 4));
    }
  }
  std::vector<std::size_t> width(cells[0].size(), 0);
  const auto display_len = [](const std::string& s) {
    // "±" is two bytes in UTF-8 but one column wide.
    std::size_t len = 0;
    for (unsigned char ch : s) len += (ch & 0xC0) != 0x80;
    return len;
  };
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], display_len(row[c]));
  }
  std::string out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      if (c > 0) out += " | ";
      out += cells[r][c] + std::string(width[c] - display_len(cells[r][c]), ' ');
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += "\n";
    if (r == 0) {
      for (std::size_t c = 0; c < width.size(); ++c) {
        if (c > 0) out += "-|-";
        out += std::string(width[c], '-');
      }
      out += "\n";
    }
  }
  return out;
}

std::string ExperimentResult::csv(const std::string& dataset) const {
  std::string out = "model,dataset,metric,mean,std\n";
  for (const auto& m : models) {
    for (const auto& metric : table_metrics()) {
      const auto [mean, sd] = stat(m, metric);
      out += m + "," + dataset + "," + metric + "," + text::format_double(mean) + "," +
             text::format_double(sd) + "\n";
    }
  }
  return out;
}

ExperimentResult run_experiment(const std::vector<NamedSpec>& specs, const Prepared& data,
                                const TrainingConfig& cfg, std::size_t repeats, std::size_t jobs) {
  if (repeats < 1) throw ConfigError("experiment: repeats must be >= 1");
  if (specs.empty()) throw ConfigError("experiment: no models given");
  ExperimentResult result;
  for (const auto& s : specs) result.models.push_back(s.name);
  const std::size_t tasks = specs.size() * repeats;
  result.runs.resize(tasks);
  std::vector<std::exception_ptr> errors(tasks);
  std::atomic<std::size_t> next{0};

  const auto worker = [&]() {
    for (std::size_t k = next++; k < tasks; k = next++) {
      try {
        const NamedSpec& ns = specs[k / repeats];
        const std::uint64_t seed = cfg.seed + k % repeats;
        model::ModelSpec spec = ns.spec;
        spec.seed = seed;
        TrainingConfig run_cfg = cfg;
        run_cfg.seed = seed;
        TrainResult tr = train_model(spec, data, run_cfg);
        const Evaluation ev = evaluate(tr.model, data, data.splits.test, run_cfg);
        RunSummary& r = result.runs[k];
        r.model = ns.name;
        r.seed = seed;
        r.values = {{"Train_Loss", tr.history.best().train_loss},
                    {"Validate_Loss", tr.history.best_val_loss},
                    {"Test_Loss", ev.loss},
                    {"RMSE", ev.report.rmse},
                    {"MAE", ev.report.mae},
                    {"CSI", ev.report.csi},
                    {"POD", ev.report.pod},
                    {"FAR", ev.report.far}};
        r.history = std::move(tr.history);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, tasks));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return result;
}

std::string history_csv(const TrainHistory& history) {
  std::string out = "epoch,train_loss,val_loss\n";
  for (const EpochRecord& r : history.epochs) {
    out += std::to_string(r.epoch) + "," + text::format_double(r.train_loss) + "," +
           text::format_double(r.val_loss) + "\n";
  }
  return out;
}

std::string metrics_json(const metrics::MetricsReport& report, double test_loss,
                         const TrainHistory* history) {
  nlohmann::ordered_json j;
  if (history != nullptr) {
    j["Train_Loss"] = history->best().train_loss;
    j["Validate_Loss"] = history->best_val_loss;
    j["best_epoch"] = history->best_epoch;
  }
  j["Test_Loss"] = test_loss;
  j["RMSE"] = report.rmse;
  j["MAE"] = report.mae;
  j["CSI"] = report.csi;
  j["POD"] = report.pod;
  j["FAR"] = report.far;
  j["categorical_aggregation"] = report.per_cell_categorical ? "per_cell" : "pooled";
  j["counts"] = {{"hits", report.counts.hits},
                 {"misses", report.counts.misses},
                 {"false_alarms", report.counts.false_alarms},
                 {"correct_negatives", report.counts.correct_negatives}};
  nlohmann::ordered_json lead = nlohmann::ordered_json::array();
  for (const auto& l : report.per_leadtime) {
    lead.push_back({{"leadtime_h", l.leadtime_h},
                    {"RMSE", l.rmse},
                    {"MAE", l.mae},
                    {"CSI", l.csi},
                    {"POD", l.pod},
                    {"FAR", l.far}});
  }
  j["per_leadtime"] = lead;
  j["notes"] = report.notes;
  return j.dump(2) + "\n";
}

std::string per_leadtime_csv(const std::string& model, const metrics::MetricsReport& report) {
  std::string out = "model,leadtime_h,rmse,mae,csi,pod,far\n";
  for (const auto& l : report.per_leadtime) {
    out += model + "," + std::to_string(l.leadtime_h) + "," + text::format_double(l.rmse) + "," +
           text::format_double(l.mae) + "," + text::format_double(l.csi) + "," +
           text::format_double(l.pod) + "," + text::format_double(l.far) + "\n";
  }
  return out;
}

}  // namespace airgraph::train
