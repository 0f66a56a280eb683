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

#include <filesystem>
#include <set>
#include <sstream>

#include <json.hpp>

#include "airgraph/cli.hpp"
#include "airgraph/config.hpp"
#include "airgraph/dataio.hpp"
#include "airgraph/error.hpp"
#include "airgraph/geograph.hpp"
#include "airgraph/textio.hpp"

using namespace airgraph;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "airgraph");
  std::ostringstream out, err;
  Run r;
  r.code = airgraph::cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

const std::vector<std::string> kSmallModel{
    "--model.edge_hidden", "6", "--model.edge_dim", "6", "--model.spatial_dim", "6",
    "--model.hidden_dim", "8", "--train.epochs", "2", "--train.batch_size", "16"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// One small synthetic dataset shared by the suite.
const fs::path& dataset() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "airgraph_cli_data";
    fs::remove_all(d);
    const Run r = invoke({"gen-synth", "--out", d.string(), "--synth.n_cities", "6",
                       "--synth.n_timesteps", "240"});
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

fs::path fresh(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("airgraph_cli_" + name);
  fs::remove_all(d);
  return d;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help and usage errors") {
  const Run help = invoke({"train", "--help"});
  CHECK(help.code == 0);
  for (const auto& k : cfg::schema()) {
    const bool shown = k.key.rfind("train.", 0) == 0 || k.key.rfind("model.", 0) == 0;
    if (shown) CHECK_MESSAGE(help.out.find("--" + k.key) != std::string::npos, k.key);
  }
  CHECK(help.out.find("[5e-04]") != std::string::npos);
  const Run gen = invoke({"gen-synth", "--help"});
  CHECK(gen.out.find("--synth.kappa") != std::string::npos);
  CHECK(gen.out.find("0.15") != std::string::npos);
  CHECK(invoke({"--version"}).out.find(cfg::kVersion) != std::string::npos);
  CHECK(invoke({"train", "--bogus"}).code == 2);
  CHECK(invoke({"no-such-command"}).code == 2);
  CHECK(invoke({}).code == 2);
}

TEST_CASE("config errors exit 2") {
  const fs::path out = fresh("cfgerr");
  CHECK(invoke({"train", "--data", dataset().string(), "--out", out.string(), "--train.lr", "fast"}).code == 2);
  CHECK(invoke({"train", "--data", dataset().string(), "--out", out.string(), "--model", "gc_lstm"}).code == 2);
  fs::create_directories(out);
  text::write_file_atomic(out / "bad.conf", "train.nonsense = 1\n");
  const Run r = invoke({"train", "--data", dataset().string(), "--out", out.string(), "--config",
                     (out / "bad.conf").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("train.nonsense") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("build-graph") {
  const fs::path out = fresh("graph");
  const std::string nodes = (dataset() / "nodes.csv").string();
  const std::string elev = (dataset() / "elevation.grid").string();

  SUBCASE("matches a pairwise recheck") {
    const Run r = invoke({"build-graph", "--nodes", nodes, "--elevation", elev, "--out", out.string()});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(text::read_file(out / "graph.json"));
    const auto cities = geo::read_nodes_csv(nodes);
    const auto grid = geo::read_elevation_grid(elev);
    std::set<std::pair<std::size_t, std::size_t>> expected, got;
    for (const auto& a : cities) {
      for (const auto& b : cities) {
        if (a.id != b.id && geo::haversine_km(a, b) < 300.0 && geo::ridge_height(grid, a, b) < 1200.0) {
          expected.insert({a.id, b.id});
        }
      }
    }
    for (const auto& e : j.at("edges")) got.insert({e[0].get<std::size_t>(), e[1].get<std::size_t>()});
    CHECK(got == expected);
    CHECK(r.out.find("edges: " + std::to_string(expected.size())) != std::string::npos);
    CHECK(r.out.find("degree histogram") != std::string::npos);
  }
  SUBCASE("zero distance gate warns") {
    const Run r = invoke({"build-graph", "--nodes", nodes, "--elevation", elev, "--d-theta", "0", "--out",
                       (out / "g.json").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("edges: 0") != std::string::npos);
    CHECK(r.err.find("warning") != std::string::npos);
    CHECK(fs::exists(out / "g.json"));
  }
  SUBCASE("missing elevation file") {
    const std::string missing = (out / "nowhere.grid").string();
    const Run r = invoke({"build-graph", "--nodes", nodes, "--elevation", missing, "--out", out.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find(missing) != std::string::npos);
  }
  fs::remove_all(out);
}

TEST_CASE("gen-synth writes a loadable dataset") {
  const auto ds = io::load_dataset(dataset());
  CHECK(ds.manifest.n_cities == 6);
  CHECK(ds.manifest.n_timesteps == 240);
  for (const char* f : {"splits.json", "graph.json", "synth.conf", "run_meta.json"}) {
    CHECK(fs::exists(dataset() / f));
  }
  // The written config reproduces the dataset.
  const fs::path again = fresh("regen");
  REQUIRE(invoke({"gen-synth", "--config", (dataset() / "synth.conf").string(), "--out", again.string()}).code == 0);
  CHECK(text::read_file(again / "pm25.knt") == text::read_file(dataset() / "pm25.knt"));
  CHECK(text::read_file(again / "manifest.json") == text::read_file(dataset() / "manifest.json"));
  fs::remove_all(again);
}

TEST_CASE("train, evaluate and predict") {
  const fs::path run = fresh("run"), run2 = fresh("run2");
  const auto train_args = with({"train", "--data", dataset().string(), "--model", "pm25gnn"}, kSmallModel);
  const Run a = invoke(with(train_args, {"--out", run.string()}));
  REQUIRE_MESSAGE(a.code == 0, a.err);
  for (const char* f : {"splits.json", "history.csv", "metrics.json", "per_leadtime.csv", "run_meta.json",
                        "checkpoint/checkpoint.json"}) {
    CHECK_MESSAGE(fs::exists(run / f), f);
  }
  CHECK(lines(text::read_file(run / "history.csv")).size() == 1 + 3);

  SUBCASE("identical runs give identical artifacts") {
    REQUIRE(invoke(with(train_args, {"--out", run2.string()})).code == 0);
    for (const char* f : {"history.csv", "metrics.json", "per_leadtime.csv", "splits.json",
                          "checkpoint/checkpoint.json"}) {
      CHECK_MESSAGE(text::read_file(run / f) == text::read_file(run2 / f), f);
    }
    for (const auto& entry : fs::directory_iterator(run / "checkpoint")) {
      CHECK(text::read_file(entry.path()) == text::read_file(run2 / "checkpoint" / entry.path().filename()));
    }
  }
  SUBCASE("evaluate") {
    const fs::path ev = run / "eval";
    const Run r = invoke({"evaluate", "--data", dataset().string(), "--checkpoint", (run / "checkpoint").string(),
                       "--out", ev.string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto j = nlohmann::json::parse(text::read_file(ev / "metrics.json"));
    for (const char* k : {"Train_Loss", "Validate_Loss", "Test_Loss", "RMSE", "MAE", "CSI", "POD", "FAR"}) {
      CHECK_MESSAGE(j.contains(k), k);
    }
    const auto train_metrics = nlohmann::json::parse(text::read_file(run / "metrics.json"));
    CHECK(j.at("RMSE").get<double>() == doctest::Approx(train_metrics.at("RMSE").get<double>()).epsilon(1e-12));
    CHECK(j.at("categorical_aggregation") == "pooled");
    for (const char* f : {"metrics.csv", "per_leadtime.csv", "traces.csv", "run_meta.json"}) {
      CHECK_MESSAGE(fs::exists(ev / f), f);
    }
    const Run pc = invoke({"evaluate", "--data", dataset().string(), "--checkpoint", (run / "checkpoint").string(),
                        "--out", (run / "eval2").string(), "--per-cell-categorical"});
    CHECK(pc.code == 0);
    CHECK(nlohmann::json::parse(text::read_file(run / "eval2" / "metrics.json")).at("categorical_aggregation") ==
          "per_cell");
  }
  SUBCASE("predict") {
    const Run r = invoke({"predict", "--data", dataset().string(), "--checkpoint", (run / "checkpoint").string(),
                       "--start", "100", "--out", (run / "pred").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto rows = lines(text::read_file(run / "pred" / "forecast.csv"));
    REQUIRE(rows.size() == 1 + 6 * 24);
    CHECK(rows[0] == "city_id,leadtime_h,pm25_ugm3");
    std::map<std::string, std::set<int>> leads;
    for (std::size_t k = 1; k < rows.size(); ++k) {
      const auto c1 = rows[k].find(','), c2 = rows[k].find(',', c1 + 1);
      leads[rows[k].substr(0, c1)].insert(std::stoi(rows[k].substr(c1 + 1, c2 - c1 - 1)));
      const double v = std::stod(rows[k].substr(c2 + 1));
      CHECK(v >= 0.0);
      CHECK(v <= 500.0);
    }
    CHECK(leads.size() == 6);
    std::set<int> want;
    for (int h = 3; h <= 72; h += 3) want.insert(h);
    for (const auto& [city, set] : leads) CHECK(set == want);

    const auto ds = io::load_dataset(dataset());
    const std::string iso = io::format_iso8601_utc(ds.manifest.t0 + 100 * ds.manifest.step_seconds);
    REQUIRE(invoke({"predict", "--data", dataset().string(), "--checkpoint", (run / "checkpoint").string(),
                 "--start", iso, "--out", (run / "iso.csv").string()}).code == 0);
    CHECK(text::read_file(run / "iso.csv") == text::read_file(run / "pred" / "forecast.csv"));
    CHECK(invoke({"predict", "--data", dataset().string(), "--checkpoint", (run / "checkpoint").string(),
               "--start", "100000", "--out", (run / "x.csv").string()}).code == 2);
  }
  fs::remove_all(run);
  fs::remove_all(run2);
}

TEST_CASE("data errors exit 3") {
  const fs::path broken = fresh("broken"), out = fresh("broken_out");
  fs::copy(dataset(), broken, fs::copy_options::recursive);
  const std::string pm = text::read_file(broken / "pm25.knt");
  text::write_file_atomic(broken / "pm25.knt", pm.substr(0, pm.size() / 2));
  const Run r = invoke(with({"train", "--data", broken.string(), "--out", out.string()}, kSmallModel));
  CHECK(r.code == 3);
  CHECK(r.err.find("pm25") != std::string::npos);
  fs::remove_all(broken);
  fs::remove_all(out);
}

TEST_CASE("divergence exits 4") {
  const fs::path data = fresh("nan_data"), out = fresh("nan_out");
  fs::copy(dataset(), data, fs::copy_options::recursive);
  auto meteo = io::read_knt(data / "meteo.knt");
  meteo.values[(50 * 6 + 2) * 8] = std::numeric_limits<double>::quiet_NaN();  // inside the training range
  io::write_knt(data / "meteo.knt", num::Tensor<double>(meteo.shape, meteo.values));
  auto j = nlohmann::json::parse(text::read_file(data / "manifest.json"));
  j["checksums"]["meteo.knt"] = io::sha256_hex(text::read_file(data / "meteo.knt"));
  text::write_file_atomic(data / "manifest.json", j.dump(2));
  const Run r = invoke(with({"train", "--data", data.string(), "--out", out.string()}, kSmallModel));
  CHECK_MESSAGE(r.code == 4, r.err);
  CHECK(r.err.find("epoch") != std::string::npos);
  fs::remove_all(data);
  fs::remove_all(out);
}

TEST_CASE("ablate and experiment tables") {
  const fs::path out = fresh("ablate");
  const Run r = invoke(with({"ablate", "--data", dataset().string(), "--out", out.string()},
                         kSmallModel));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const std::string md = text::read_file(out / "ablation.md");
  const auto header = lines(md).front();
  CHECK(header.find("pm25gnn") != std::string::npos);
  CHECK(header.find("no PBL height") != std::string::npos);
  CHECK(header.find("no export") != std::string::npos);
  CHECK(std::count(header.begin(), header.end(), '|') == 3);
  CHECK(fs::exists(out / "metrics.csv"));

  const fs::path ex = fresh("experiment");
  const Run e = invoke(with({"experiment", "--data", dataset().string(), "--out", ex.string(), "--models", "mlp,gru",
                          "--train.repeats", "2", "--jobs", "2"},
                         kSmallModel));
  REQUIRE_MESSAGE(e.code == 0, e.err);
  const std::string table = text::read_file(ex / "experiment.md");
  CHECK(table.find("MLP") != std::string::npos);
  CHECK(table.find("GRU") != std::string::npos);
  const auto csv = lines(text::read_file(ex / "metrics.csv"));
  CHECK(csv.front() == "model,dataset,metric,mean,std");
  CHECK(csv.size() == 1 + 2 * 8);
  fs::remove_all(out);
  fs::remove_all(ex);
}

TEST_CASE("config files and flag precedence") {
  cfg::RunConfig rc;
  rc.parse_text("# comment\ntrain.lr = 0.01\n\nmodel.kind = gru  # trailing\n");
  CHECK(rc.get("train.lr") == "0.01");
  CHECK(rc.model().kind == model::ModelKind::kGru);
  CHECK_THROWS_AS(rc.parse_text("train.lr 0.01\n"), ConfigError);
  CHECK_THROWS_AS(rc.set("train.unknown", "1"), ConfigError);
  try {
    rc.parse_text("train.epochs = 1\nbogus.key = 2\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
  cfg::RunConfig dumped;
  dumped.parse_text(rc.dump());
  CHECK(dumped.values() == rc.values());
  CHECK(cfg::parse_ratio("2:1:1") == std::vector<double>{2, 1, 1});
  CHECK_THROWS_AS(cfg::parse_ratio("2:1"), ConfigError);

  const fs::path out = fresh("precedence");
  fs::create_directories(out);
  text::write_file_atomic(out / "run.conf", "synth.n_cities = 4\nsynth.n_timesteps = 100\n");
  REQUIRE(invoke({"gen-synth", "--config", (out / "run.conf").string(), "--synth.n_cities", "5", "--out",
               (out / "d").string()}).code == 0);
  const auto m = io::load_dataset(out / "d").manifest;
  CHECK(m.n_cities == 5);
  CHECK(m.n_timesteps == 100);
  fs::remove_all(out);
}

}  // TEST_SUITE
