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

#include <doctest.h>

#include <bit>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include "airgraph/checkpoint.hpp"
#include "airgraph/error.hpp"
#include "airgraph/synth.hpp"
#include "airgraph/train.hpp"
#include "helpers.hpp"

using namespace airgraph;
using num::Tensor;
using train::Sample;

namespace {

struct Fixture {
  io::Dataset dataset;
  train::TrainingConfig cfg;
  train::Prepared data;
};

Fixture make_fixture(std::size_t steps = 160) {
  synth::SynthConfig sc;
  sc.n_cities = 5;
  sc.n_timesteps = steps;
  Fixture f;
  f.dataset = synth::to_dataset(synth::generate_world(sc), "tiny");
  f.cfg.horizon = 6;
  f.cfg.epochs = 3;
  f.cfg.batch_size = 4;
  f.cfg.precision = model::Precision::kFloat64;
  f.cfg.seed = 5;
  const auto splits = io::resolve_splits(f.dataset.manifest, io::ratio_splits(f.dataset.manifest, 2, 1, 1));
  f.data = train::prepare(f.dataset, splits, f.cfg);
  return f;
}

model::ModelSpec tiny_spec(model::ModelKind kind = model::ModelKind::kPm25Gnn) {
  model::ModelSpec s;
  s.kind = kind;
  s.edge_hidden = s.edge_dim = s.spatial_dim = 4;
  s.hidden_dim = 6;
  s.mlp_hidden = 4;
  return s;
}

// Features of steps start+1 .. start+h for one window, one tensor per step.
std::vector<Tensor<double>> window(const Tensor<double>& panel, std::size_t start, std::size_t h) {
  const std::size_t rows = panel.dim(1), cols = panel.dim(2);
  std::vector<Tensor<double>> out;
  for (std::size_t s = 1; s <= h; ++s) {
    const auto src = panel.data().subspan((start + s) * rows * cols, rows * cols);
    out.emplace_back(num::Shape{rows, cols}, std::vector<double>(src.begin(), src.end()));
  }
  return out;
}

// Mean squared error over windows, one unbatched forecast at a time.
double hand_loss(const model::ModelSpec& spec, const model::ParamSet<double>& params,
                 const train::Prepared& d, std::span<const Sample> samples, std::size_t h) {
  const std::size_t n = d.pm25.dim(1);
  const auto edges = model::EdgeIndex::from_topology(d.topology);
  double sq = 0.0;
  for (const Sample& s : samples) {
    const auto x0src = d.pm25.data().subspan(s.start * n, n);
    const Tensor<double> x0({n, 1}, std::vector<double>(x0src.begin(), x0src.end()));
    const auto pred = model::forecast<double>(spec, params, x0, window(d.nodes, s.start, h),
                                              window(d.edges, s.start, h), edges);
    for (std::size_t t = 0; t < h; ++t) {
      for (std::size_t i = 0; i < n; ++i) {
        sq += std::pow(pred.at(t * n + i) - d.pm25.at((s.start + 1 + t) * n + i), 2);
      }
    }
  }
  return sq / double(samples.size() * h * n);
}

bool same_params(const model::ParamSet<double>& a, const model::ParamSet<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t i = 0; i < a.values[k].size(); ++i) {
      if (std::bit_cast<std::uint64_t>(a.values[k].at(i)) != std::bit_cast<std::uint64_t>(b.values[k].at(i))) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("train") {

TEST_CASE("sample counts") {
  const std::vector<feat::IndexRange> r25{{0, 25}}, r100{{10, 110}};
  CHECK(train::make_samples(r25, 24).size() == 1);
  CHECK(train::make_samples(r100, 24).size() == 76);
  CHECK(train::make_samples(r100, 24).front().start == 10);
  const std::vector<feat::IndexRange> short_range{{0, 24}};
  CHECK_THROWS_AS(train::make_samples(short_range, 24), DataError);
}

TEST_CASE("windows with missing truth are skipped") {
  Tensor<double> pm = Tensor<double>::filled({20, 2}, 1.0);
  pm.mutable_data()[10 * 2 + 1] = std::numeric_limits<double>::quiet_NaN();
  const std::vector<feat::IndexRange> r{{0, 20}};
  const auto s = train::make_samples(r, 4, &pm);
  // Starts 6..10 touch step 10.
  CHECK(s.size() == 16 - 5);
  for (const Sample& x : s) CHECK((x.start + 4 < 10 || x.start > 10));
}

TEST_CASE("samples never leave their range") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<feat::IndexRange> ranges;
    std::size_t at = testing::uniform_int(rng, 0, 10);
    const std::size_t h = testing::uniform_int(rng, 1, 30);
    for (int k = 0; k < 3; ++k) {
      const std::size_t len = testing::uniform_int(rng, h + 1, h + 40);
      ranges.push_back({at, at + len});
      at += len + testing::uniform_int(rng, 0, 5);
    }
    std::size_t expected = 0;
    for (const auto& r : ranges) expected += r.size() - h;
    const auto samples = train::make_samples(ranges, h);
    CHECK(samples.size() == expected);
    for (const Sample& s : samples) {
      const bool inside = std::any_of(ranges.begin(), ranges.end(), [&](const feat::IndexRange& r) {
        return s.start >= r.begin && s.start + h < r.end;
      });
      CHECK(inside);
    }
  }
}

TEST_CASE("early stopping on a manufactured curve") {
  const std::vector<double> curve{0.9, 0.7, 0.5, 0.6, 0.55, 0.52, 0.4};
  train::EarlyStopping stop(3, 1.0);
  std::size_t epoch = 0;
  for (double v : curve) {
    stop.update(++epoch, v);
    if (stop.should_stop()) break;
  }
  CHECK(epoch == 6);
  CHECK(stop.best_epoch() == 3);
  CHECK(stop.best_loss() == 0.5);

  train::EarlyStopping never(2, 0.1);
  CHECK_FALSE(never.update(1, 0.2));
  CHECK_FALSE(never.update(2, 0.1));
  CHECK(never.should_stop());
  CHECK(never.best_epoch() == 0);
}

TEST_CASE("training loss matches a hand loop") {
  Fixture f = make_fixture();
  f.cfg.lr = 0.0;
  f.cfg.epochs = 2;
  const auto spec = tiny_spec();
  const auto result = train::train_model(spec, f.data, f.cfg);
  const auto init = model::init_params<double>(spec, f.data.dims());
  CHECK(same_params(result.model.params, init));
  const auto train_samples = train::make_samples(f.data.splits.train, f.cfg.horizon, &f.data.pm25);
  const auto val_samples = train::make_samples(f.data.splits.validate, f.cfg.horizon, &f.data.pm25);
  const double tl = hand_loss(spec, init, f.data, train_samples, f.cfg.horizon);
  const double vl = hand_loss(spec, init, f.data, val_samples, f.cfg.horizon);
  REQUIRE(result.history.epochs.size() == 3);
  for (const auto& e : result.history.epochs) {
    CHECK(e.train_loss == doctest::Approx(tl).epsilon(1e-12));
    CHECK(e.val_loss == doctest::Approx(vl).epsilon(1e-12));
  }
  CHECK(result.history.best_epoch == 0);

  const auto ev = train::evaluate(result.model, f.data, f.data.splits.validate, f.cfg);
  CHECK(ev.loss == doctest::Approx(vl).epsilon(1e-12));
}

TEST_CASE("same seed gives identical parameters") {
  const Fixture f = make_fixture();
  for (auto precision : {model::Precision::kFloat64, model::Precision::kFloat32}) {
    train::TrainingConfig cfg = f.cfg;
    cfg.precision = precision;
    const auto a = train::train_model(tiny_spec(), f.data, cfg);
    const auto b = train::train_model(tiny_spec(), f.data, cfg);
    CHECK(same_params(a.model.params, b.model.params));
    CHECK(a.history.epochs.back().train_loss == b.history.epochs.back().train_loss);
    cfg.seed += 1;
    const auto c = train::train_model(tiny_spec(), f.data, cfg);
    CHECK_FALSE(same_params(a.model.params, c.model.params));
  }
}

TEST_CASE("best parameters are restored") {
  Fixture f = make_fixture();
  f.cfg.lr = 0.05;
  f.cfg.epochs = 12;
  f.cfg.patience = 3;
  const auto r = train::train_model(tiny_spec(), f.data, f.cfg);
  const auto& last = r.history.epochs.back();
  REQUIRE(r.history.best_epoch < last.epoch);
  for (const auto& e : r.history.epochs) CHECK(r.history.best_val_loss <= e.val_loss);
  const auto ev = train::evaluate(r.model, f.data, f.data.splits.validate, f.cfg);
  CHECK(ev.loss == doctest::Approx(r.history.best_val_loss).epsilon(1e-12));
  CHECK(ev.loss != doctest::Approx(last.val_loss).epsilon(1e-9));
}

TEST_CASE("divergence aborts with a diagnostic") {
  Fixture f = make_fixture();
  const auto train_samples = train::make_samples(f.data.splits.train, f.cfg.horizon, &f.data.pm25);
  const std::size_t n = f.data.nodes.dim(1), p = f.data.nodes.dim(2);
  for (std::size_t t = 0; t < f.data.nodes.dim(0); ++t) {
    f.data.nodes.mutable_data()[(t * n) * p + 1] = std::numeric_limits<double>::quiet_NaN();
  }
  try {
    train::train_model(tiny_spec(), f.data, f.cfg);
    FAIL("expected TrainingAborted");
  } catch (const TrainingAborted& e) {
    const std::string msg = e.what();
    CHECK(msg.find("epoch 1") != std::string::npos);
    CHECK(msg.find("sample") != std::string::npos);
  } catch (const std::exception& e) {
    // NaN in the untrained evaluation is reported before any update.
    CHECK(std::string(e.what()).find("nan") != std::string::npos);
  }
  CHECK_FALSE(train_samples.empty());
}

TEST_CASE("checkpoints reproduce forecasts") {
  const Fixture f = make_fixture();
  for (auto precision : {model::Precision::kFloat64, model::Precision::kFloat32}) {
    train::TrainingConfig cfg = f.cfg;
    cfg.precision = precision;
    const auto r = train::train_model(tiny_spec(), f.data, cfg);
    const std::size_t start = f.data.splits.test[0].begin;
    const auto before = train::predict(r.model, f.data, start);
    const auto dir = std::filesystem::temp_directory_path() / "airgraph_train_ckpt";
    std::filesystem::remove_all(dir);
    io::save_checkpoint(dir, r.model);
    const auto loaded = io::load_checkpoint(dir);
    const train::Prepared again = train::prepare_with(f.dataset, loaded.standardizer, cfg);
    const auto after = train::predict(loaded, again, start);
    REQUIRE(before.size() == cfg.horizon * 5);
    for (std::size_t k = 0; k < before.size(); ++k) {
      CHECK(std::bit_cast<std::uint64_t>(before[k]) == std::bit_cast<std::uint64_t>(after[k]));
      CHECK(before[k] >= 0.0);
      CHECK(before[k] <= 500.0);
    }
    std::filesystem::remove_all(dir);
  }
}

TEST_CASE("evaluation in physical units") {
  const Fixture f = make_fixture();
  const auto r = train::train_model(tiny_spec(), f.data, f.cfg);
  const auto ev = train::evaluate(r.model, f.data, f.data.splits.test, f.cfg);
  CHECK(ev.forecasts.windows == ev.samples.size());
  CHECK(ev.forecasts.steps == f.cfg.horizon);
  const auto& s0 = ev.samples.front();
  const auto direct = train::predict(r.model, f.data, s0.start);
  for (std::size_t k = 0; k < direct.size(); ++k) CHECK(ev.forecasts.pred[k] == doctest::Approx(direct[k]).epsilon(1e-12));
  for (std::size_t t = 0; t < f.cfg.horizon; ++t) {
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(ev.forecasts.truth_at(0, t, i) == f.data.pm25_raw.at((s0.start + 1 + t) * 5 + i));
    }
  }
  CHECK(ev.report.rmse == metrics::aggregate_report(ev.forecasts).rmse);
}

TEST_CASE("experiment tables") {
  const Fixture f = make_fixture();
  train::TrainingConfig cfg = f.cfg;
  cfg.epochs = 2;
  const std::vector<train::NamedSpec> specs{{"GNN", tiny_spec()}, {"GRU", tiny_spec(model::ModelKind::kGru)}};
  const auto one = train::run_experiment(specs, f.data, cfg, 1);
  CHECK(one.stat("GNN", "RMSE").second == 0.0);
  const auto serial = train::run_experiment(specs, f.data, cfg, 3, 1);
  const auto parallel = train::run_experiment(specs, f.data, cfg, 3, 3);
  REQUIRE(serial.runs.size() == 6);
  std::vector<std::uint64_t> seeds;
  for (const auto& r : serial.runs) {
    if (r.model == "GRU") seeds.push_back(r.seed);
  }
  std::sort(seeds.begin(), seeds.end());
  CHECK(seeds == std::vector<std::uint64_t>{5, 6, 7});
  for (const auto& metric : train::table_metrics()) {
    CHECK(serial.stat("GNN", metric) == parallel.stat("GNN", metric));
  }
  double mean = 0.0, sq = 0.0;
  for (const auto& r : serial.runs) {
    if (r.model == "GNN") mean += r.values.at("RMSE") / 3.0;
  }
  for (const auto& r : serial.runs) {
    if (r.model == "GNN") sq += std::pow(r.values.at("RMSE") - mean, 2) / 3.0;
  }
  CHECK(serial.stat("GNN", "RMSE").first == doctest::Approx(mean).epsilon(1e-12));
  CHECK(serial.stat("GNN", "RMSE").second == doctest::Approx(std::sqrt(sq)).epsilon(1e-9));

  const std::string table = serial.table();
  for (const auto& metric : train::table_metrics()) CHECK(table.find(metric) != std::string::npos);
  CHECK(table.find("±") != std::string::npos);
  const std::string csv = serial.csv("tiny");
  CHECK(csv.rfind("model,dataset,metric,mean,std\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * long(train::table_metrics().size()));
}

TEST_CASE("config validation") {
  train::TrainingConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.horizon = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.patience = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.lr = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

}  // TEST_SUITE
