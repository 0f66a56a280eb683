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

#include "airgraph/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <map>
#include <memory>
#include <sstream>

#include "json.hpp"

#include "airgraph/checkpoint.hpp"
#include "airgraph/config.hpp"
#include "airgraph/dataio.hpp"
#include "airgraph/error.hpp"
#include "airgraph/geograph.hpp"
#include "airgraph/synth.hpp"
#include "airgraph/textio.hpp"
#include "airgraph/train.hpp"

namespace airgraph::cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

// Schema-backed `--section.key` flags attached to one subcommand.
class SchemaFlags {
 public:
  void attach(CLI::App* app, const std::vector<std::string>& sections) {
    for (const std::string& s : sections) {
      for (const cfg::KeySpec& k : cfg::section(s)) add(app, k);
    }
  }
  void attach_key(CLI::App* app, const std::string& key) {
    for (const cfg::KeySpec& k : cfg::schema()) {
      if (k.key == key) add(app, k);
    }
  }

  // Defaults, then the config file, then explicit flags.
  cfg::RunConfig resolve(const std::string& config_path) const {
    cfg::RunConfig rc;
    if (!config_path.empty()) rc.load_file(config_path);
    for (const auto& [key, opt] : options_) {
      if (opt->count() > 0) rc.set(key, *values_.at(key));
    }
    return rc;
  }

 private:
  void add(CLI::App* app, const cfg::KeySpec& k) {
    auto value = std::make_unique<std::string>();
    CLI::Option* opt = app->add_option("--" + k.key, *value, k.help)->default_str(k.default_value);
    values_[k.key] = std::move(value);
    options_.emplace_back(k.key, opt);
  }

  std::map<std::string, std::unique_ptr<std::string>> values_;
  std::vector<std::pair<std::string, CLI::Option*>> options_;
};

struct Paths {
  std::string config, data, splits, checkpoint, out, nodes, elevation, start, models;
};

// `--out` names a file when it carries the default file's extension,
// otherwise a directory that receives the default file name.
fs::path output_file(const std::string& out, const std::string& default_name) {
  const fs::path path = out;
  if (!fs::is_directory(path) && path.extension() == fs::path(default_name).extension()) {
    return path;
  }
  return path / default_name;
}

void require_exists(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("missing required --") + what);
  if (!fs::exists(path)) {
    throw DataError(DataError::Kind::kMissingFile, std::string(what) + " not found: " + path);
  }
}

io::SplitSpec load_splits(const Paths& p, const io::DatasetManifest& m, const cfg::RunConfig& rc) {
  if (!p.splits.empty()) {
    require_exists(p.splits, "splits");
    return io::read_splits_json(p.splits);
  }
  const auto r = cfg::parse_ratio(rc.get("train.split"));
  return io::ratio_splits(m, r[0], r[1], r[2]);
}

void write_run_meta(const fs::path& out, const std::string& command, const cfg::RunConfig& rc,
                    const io::DatasetManifest* manifest, Clock::time_point started) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["version"] = cfg::kVersion;
  j["seed"] = rc.get("train.seed");
  if (manifest != nullptr) {
    j["dataset"] = manifest->name;
    j["dataset_checksums"] = manifest->checksums;
  }
  j["config"] = rc.values();
  j["wall_seconds"] = std::chrono::duration<double>(Clock::now() - started).count();
  text::write_file_atomic(out / "run_meta.json", j.dump(2) + "\n");
}

std::string display_name(const model::ModelSpec& s) {
  switch (s.kind) {
    case model::ModelKind::kPm25Gnn:
      if (s.drop_pbl && s.no_export) return "no PBL height, no export";
      if (s.drop_pbl) return "no PBL height";
      if (s.no_export) return "no export";
      return "pm25gnn";
    case model::ModelKind::kMlp: return "MLP";
    case model::ModelKind::kGru: return "GRU";
    case model::ModelKind::kLstm: return "LSTM";
    case model::ModelKind::kNodesFcGru: return "nodesFC-GRU";
  }
  return "?";
}

void print_degrees(const geo::GraphTopology& topo, std::ostream& out) {
  std::map<std::size_t, std::size_t> hist;
  for (std::size_t i = 0; i < topo.num_nodes(); ++i) ++hist[topo.out_edges[i].size()];
  out << "degree histogram (out-degree: cities)\n";
  for (const auto& [deg, count] : hist) out << "  " << deg << ": " << count << "\n";
}

int cmd_build_graph(const Paths& p, double d_theta, double m_theta, std::size_t samples,
                    std::ostream& out, std::ostream& err) {
  require_exists(p.nodes, "nodes");
  require_exists(p.elevation, "elevation");
  if (p.out.empty()) throw ConfigError("missing required --out");
  const auto cities = geo::read_nodes_csv(p.nodes);
  const auto grid = geo::read_elevation_grid(p.elevation);
  const auto topo = geo::build_adjacency(cities, grid, d_theta, m_theta, samples);
  const fs::path target = output_file(p.out, "graph.json");
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  geo::write_graph_json(target, topo);
  out << "nodes: " << topo.num_nodes() << "\nedges: " << topo.num_edges() << "\n";
  print_degrees(topo, out);
  if (topo.num_edges() == 0) err << "warning: no city pair passes the gates; the graph has no edges\n";
  return 0;
}

int cmd_gen_synth(const Paths& p, const cfg::RunConfig& rc, std::ostream& out) {
  if (p.out.empty()) throw ConfigError("missing required --out");
  const auto started = Clock::now();
  const synth::SynthConfig sc = rc.synth();
  const synth::World world = synth::generate_world(sc);
  io::Dataset ds = synth::to_dataset(world, "synthetic-" + std::to_string(sc.seed));
  io::save_dataset(p.out, ds);
  const auto r = cfg::parse_ratio(rc.get("train.split"));
  io::write_splits_json(fs::path(p.out) / "splits.json",
                        io::ratio_splits(ds.manifest, r[0], r[1], r[2]));
  geo::write_graph_json(fs::path(p.out) / "graph.json", world.topology);
  text::write_file_atomic(fs::path(p.out) / "synth.conf", rc.dump());
  write_run_meta(p.out, "gen-synth", rc, &ds.manifest, started);
  out << "cities: " << world.cities.size() << "\nedges: " << world.topology.num_edges()
      << "\nsteps: " << ds.manifest.n_timesteps << "\nlearnability R^2: "
      << text::format_double(synth::learnability_r2(world)) << "\nwrote " << p.out << "\n";
  return 0;
}

int cmd_train(const Paths& p, cfg::RunConfig rc, const std::string& kind, std::ostream& out) {
  require_exists(p.data, "data");
  if (p.out.empty()) throw ConfigError("missing required --out");
  if (!kind.empty()) rc.set("model.kind", kind);
  const auto started = Clock::now();
  const train::TrainingConfig tc = rc.training();
  const model::ModelSpec spec = rc.model();
  const io::Dataset ds = io::load_dataset(p.data);
  const io::SplitSpec split_spec = load_splits(p, ds.manifest, rc);
  const auto splits = io::resolve_splits(ds.manifest, split_spec);
  const train::Prepared data = train::prepare(ds, splits, tc);

  const fs::path dir = p.out;
  fs::create_directories(dir);
  io::write_splits_json(dir / "splits.json", split_spec);
  const train::TrainResult tr = train::train_model(spec, data, tc, rc.values());
  io::save_checkpoint(dir / "checkpoint", tr.model);
  text::write_file_atomic(dir / "history.csv", train::history_csv(tr.history));
  const train::Evaluation ev = train::evaluate(tr.model, data, splits.test, tc);
  text::write_file_atomic(dir / "metrics.json", train::metrics_json(ev.report, ev.loss, &tr.history));
  text::write_file_atomic(dir / "per_leadtime.csv",
                          train::per_leadtime_csv(display_name(spec), ev.report));
  write_run_meta(dir, "train", rc, &ds.manifest, started);

  for (const std::string& w : data.standardizer.warnings) out << "warning: " << w << "\n";
  out << "model: " << model::to_string(spec.kind) << " ("
      << model::count_params(spec, data.dims()) << " parameters)\n"
      << "epochs run: " << tr.history.epochs.size() - 1 << ", best epoch "
      << tr.history.best_epoch << (tr.history.stopped_early ? " (early stop)" : "") << "\n"
      << "best validation loss: " << text::format_double(tr.history.best_val_loss) << "\n"
      << "test RMSE " << text::format_double(ev.report.rmse) << ", MAE "
      << text::format_double(ev.report.mae) << "\n";
  return 0;
}

std::string traces_csv(const train::Evaluation& ev, const train::Prepared& data) {
  std::string out = "timestamp,city_id,leadtime_h,pred_ugm3,truth_ugm3\n";
  const auto& fs_ = ev.forecasts;
  for (std::size_t lead : {std::size_t{3}, std::size_t{24}, std::size_t{72}}) {
    const std::size_t s = lead / metrics::kStepHours;
    if (s == 0 || s > fs_.steps) continue;
    for (std::size_t c = 0; c < fs_.cities; ++c) {
      for (std::size_t w = 0; w < fs_.windows; ++w) {
        const std::size_t t = ev.samples[w].start + s;
        out += io::format_iso8601_utc(data.timestamps[t]) + "," + std::to_string(c) + "," +
               std::to_string(lead) + "," + text::format_double(fs_.pred_at(w, s - 1, c)) + "," +
               text::format_double(fs_.truth_at(w, s - 1, c)) + "\n";
      }
    }
  }
  return out;
}

train::TrainingConfig config_from_checkpoint(const io::Checkpoint& ck, const cfg::RunConfig& rc) {
  train::TrainingConfig tc = rc.training();
  tc.d_theta_km = ck.d_theta_km;
  tc.m_theta_m = ck.m_theta_m;
  tc.ridge_samples = ck.ridge_samples;
  tc.wind_convention = ck.wind_convention;
  tc.horizon = ck.horizon;
  return tc;
}

int cmd_evaluate(const Paths& p, const cfg::RunConfig& rc, std::ostream& out) {
  require_exists(p.data, "data");
  require_exists(p.checkpoint, "checkpoint");
  if (p.out.empty()) throw ConfigError("missing required --out");
  const auto started = Clock::now();
  const io::Checkpoint ck = io::load_checkpoint(p.checkpoint);
  const train::TrainingConfig tc = config_from_checkpoint(ck, rc);
  const io::Dataset ds = io::load_dataset(p.data);
  const auto splits = io::resolve_splits(ds.manifest, load_splits(p, ds.manifest, rc));
  train::Prepared data = train::prepare_with(ds, ck.standardizer, tc);
  data.splits = splits;

  const train::Evaluation test = train::evaluate(ck, data, splits.test, tc);
  const train::Evaluation trn = train::evaluate(ck, data, splits.train, tc);
  const train::Evaluation val = train::evaluate(ck, data, splits.validate, tc);
  const std::string name = display_name(ck.spec);

  const fs::path dir = p.out;
  fs::create_directories(dir);
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(train::metrics_json(test.report, test.loss, nullptr));
  nlohmann::ordered_json full;
  full["model"] = name;
  full["dataset"] = ds.manifest.name;
  full["Train_Loss"] = trn.loss;
  full["Validate_Loss"] = val.loss;
  for (auto it = j.begin(); it != j.end(); ++it) full[it.key()] = it.value();
  text::write_file_atomic(dir / "metrics.json", full.dump(2) + "\n");

  const std::vector<std::pair<std::string, double>> rows = {
      {"Train_Loss", trn.loss},    {"Validate_Loss", val.loss}, {"Test_Loss", test.loss},
      {"RMSE", test.report.rmse}, {"MAE", test.report.mae},     {"CSI", test.report.csi},
      {"POD", test.report.pod},   {"FAR", test.report.far}};
  std::string csv = "model,dataset,metric,mean,std\n";
  for (const auto& [metric, v] : rows) {
    csv += name + "," + ds.manifest.name + "," + metric + "," + text::format_double(v) + ",0\n";
    out << metric << ": " << text::format_double(v) << "\n";
  }
  text::write_file_atomic(dir / "metrics.csv", csv);
  text::write_file_atomic(dir / "per_leadtime.csv", train::per_leadtime_csv(name, test.report));
  text::write_file_atomic(dir / "traces.csv", traces_csv(test, data));
  write_run_meta(dir, "evaluate", rc, &ds.manifest, started);
  out << "categorical aggregation: " << (test.report.per_cell_categorical ? "per_cell" : "pooled")
      << "\n";
  for (const std::string& n : test.report.notes) out << "note: " << n << "\n";
  return 0;
}

int cmd_predict(const Paths& p, const cfg::RunConfig& rc, std::ostream& out) {
  require_exists(p.data, "data");
  require_exists(p.checkpoint, "checkpoint");
  if (p.out.empty()) throw ConfigError("missing required --out");
  if (p.start.empty()) throw ConfigError("missing required --start");
  const io::Checkpoint ck = io::load_checkpoint(p.checkpoint);
  const train::TrainingConfig tc = config_from_checkpoint(ck, rc);
  const io::Dataset ds = io::load_dataset(p.data);
  const train::Prepared data = train::prepare_with(ds, ck.standardizer, tc);

  std::size_t start = 0;
  if (p.start.find('-') != std::string::npos) {
    const std::int64_t epoch = io::parse_iso8601_utc(p.start);
    const std::int64_t rel = epoch - ds.manifest.t0;
    if (rel < 0 || rel % ds.manifest.step_seconds != 0) {
      throw ConfigError("--start " + p.start + " is not a step of the dataset");
    }
    start = static_cast<std::size_t>(rel / ds.manifest.step_seconds);
  } else {
    try {
      start = static_cast<std::size_t>(text::parse_int(p.start, "--start"));
    } catch (const DataError& e) {
      throw ConfigError(e.what());
    }
  }
  if (start >= ds.manifest.n_timesteps) throw ConfigError("--start lies past the end of the data");
  const std::vector<double> pred = train::predict(ck, data, start);
  const std::size_t n = ds.cities.size();
  std::string csv = "city_id,leadtime_h,pm25_ugm3\n";
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t s = 0; s < ck.horizon; ++s) {
      csv += std::to_string(c) + "," + std::to_string((s + 1) * metrics::kStepHours) + "," +
             text::format_double(pred[s * n + c]) + "\n";
    }
  }
  const fs::path target = output_file(p.out, "forecast.csv");
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  text::write_file_atomic(target, csv);
  out << "forecast from " << io::format_iso8601_utc(data.timestamps[start]) << " for " << n
      << " cities x " << ck.horizon << " steps -> " << target.string() << "\n";
  return 0;
}

int run_specs(const char* command, const Paths& p, const cfg::RunConfig& rc,
              const std::vector<train::NamedSpec>& specs, std::size_t jobs, std::ostream& out) {
  require_exists(p.data, "data");
  if (p.out.empty()) throw ConfigError("missing required --out");
  const auto started = Clock::now();
  const train::TrainingConfig tc = rc.training();
  const io::Dataset ds = io::load_dataset(p.data);
  const io::SplitSpec split_spec = load_splits(p, ds.manifest, rc);
  const auto splits = io::resolve_splits(ds.manifest, split_spec);
  const train::Prepared data = train::prepare(ds, splits, tc);
  const train::ExperimentResult res =
      train::run_experiment(specs, data, tc, rc.get_size("train.repeats"), jobs);

  const fs::path dir = p.out;
  fs::create_directories(dir);
  io::write_splits_json(dir / "splits.json", split_spec);
  const std::string table = res.table();
  text::write_file_atomic(dir / (std::string(command) + ".md"), table);
  text::write_file_atomic(dir / "metrics.csv", res.csv(ds.manifest.name));
  std::string runs = "model,seed,metric,value\n";
  for (const auto& r : res.runs) {
    for (const auto& metric : train::table_metrics()) {
      runs += r.model + "," + std::to_string(r.seed) + "," + metric + "," +
              text::format_double(r.values.at(metric)) + "\n";
    }
  }
  text::write_file_atomic(dir / "runs.csv", runs);
  write_run_meta(dir, command, rc, &ds.manifest, started);
  out << table;
  return 0;
}

int cmd_ablate(const Paths& p, const cfg::RunConfig& rc, std::size_t jobs, std::ostream& out) {
  cfg::RunConfig base = rc;
  base.set("model.kind", "pm25gnn");
  base.set("model.drop_pbl", "false");
  base.set("model.no_export", "false");
  model::ModelSpec full = base.model();
  model::ModelSpec no_pbl = full, no_export = full;
  no_pbl.drop_pbl = true;
  no_export.no_export = true;
  return run_specs("ablation", p, base,
                   {{display_name(full), full},
                    {display_name(no_pbl), no_pbl},
                    {display_name(no_export), no_export}},
                   jobs, out);
}

int cmd_experiment(const Paths& p, const cfg::RunConfig& rc, std::size_t jobs, std::ostream& out) {
  std::vector<train::NamedSpec> specs;
  for (std::string_view name : text::split(p.models, ',')) {
    cfg::RunConfig one = rc;
    one.set("model.kind", std::string(text::trim(name)));
    if (one.get("model.kind") != "pm25gnn") {
      one.set("model.drop_pbl", "false");
      one.set("model.no_export", "false");
    }
    const model::ModelSpec s = one.model();
    specs.push_back({display_name(s), s});
  }
  return run_specs("experiment", p, rc, specs, jobs, out);
}

int exit_code_for(const DataError& e) {
  return e.kind() == DataError::Kind::kMissingFile ? 2 : 3;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph-based PM2.5 forecasting: graph building, synthetic data, training, "
               "evaluation and ablations",
               "airgraph"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cfg::kVersion);

  Paths p;
  double d_theta = geo::kDefaultDistanceThresholdKm;
  double m_theta = geo::kDefaultRidgeThresholdM;
  std::size_t ridge_samples = geo::kDefaultRidgeSamples;
  std::string model_kind;
  std::size_t jobs = 0;
  bool per_cell = false;

  auto* bg = app.add_subcommand("build-graph", "build the gated city graph and write graph.json");
  bg->add_option("--nodes", p.nodes, "nodes.csv (id,name,lat,lon,altitude)")->required();
  bg->add_option("--elevation", p.elevation, "elevation.grid")->required();
  bg->add_option("--d-theta", d_theta, "distance gate (km)")->capture_default_str();
  bg->add_option("--m-theta", m_theta, "ridge gate (m)")->capture_default_str();
  bg->add_option("--ridge-samples", ridge_samples, "terrain samples per pair")->capture_default_str();
  bg->add_option("--out", p.out, "output file or directory")->required();

  SchemaFlags gen_flags, train_flags, eval_flags, predict_flags, ablate_flags, exp_flags;

  auto* gen = app.add_subcommand("gen-synth", "generate a synthetic dataset directory");
  gen->add_option("--config", p.config, "key = value config file");
  gen->add_option("--out", p.out, "dataset directory to write")->required();
  gen_flags.attach(gen, {"synth", "graph"});
  gen_flags.attach_key(gen, "train.split");

  auto* tr = app.add_subcommand("train", "train one model and score it on the test split");
  tr->add_option("--data", p.data, "dataset directory")->required();
  tr->add_option("--splits", p.splits, "splits.json (default: train.split ratio)");
  tr->add_option("--model", model_kind, "model kind, overrides model.kind");
  tr->add_option("--config", p.config, "key = value config file");
  tr->add_option("--out", p.out, "run directory")->required();
  train_flags.attach(tr, {"model", "train", "graph", "data", "eval"});

  auto* ev = app.add_subcommand("evaluate", "score a checkpoint: summary metrics, leadtimes, traces");
  ev->add_option("--data", p.data, "dataset directory")->required();
  ev->add_option("--splits", p.splits, "splits.json (default: train.split ratio)");
  ev->add_option("--checkpoint", p.checkpoint, "checkpoint directory")->required();
  ev->add_option("--config", p.config, "key = value config file");
  ev->add_option("--out", p.out, "output directory")->required();
  ev->add_flag("--per-cell-categorical", per_cell,
               "average CSI/POD/FAR over city x leadtime cells instead of pooling");
  eval_flags.attach(ev, {"eval"});
  eval_flags.attach_key(ev, "train.split");
  eval_flags.attach_key(ev, "train.eval_batch_size");
  eval_flags.attach_key(ev, "data.max_fill_gap");

  auto* pr = app.add_subcommand("predict", "write a 72-hour forecast.csv from one start time");
  pr->add_option("--data", p.data, "dataset directory")->required();
  pr->add_option("--checkpoint", p.checkpoint, "checkpoint directory")->required();
  pr->add_option("--start", p.start, "start step index or ISO-8601 UTC time")->required();
  pr->add_option("--config", p.config, "key = value config file");
  pr->add_option("--out", p.out, "output file or directory")->required();
  predict_flags.attach_key(pr, "data.max_fill_gap");

  auto* ab = app.add_subcommand("ablate", "full model vs no PBL height vs no export");
  ab->add_option("--data", p.data, "dataset directory")->required();
  ab->add_option("--splits", p.splits, "splits.json (default: train.split ratio)");
  ab->add_option("--config", p.config, "key = value config file");
  ab->add_option("--out", p.out, "output directory")->required();
  ab->add_option("--jobs", jobs, "worker threads (default: train.jobs)");
  ablate_flags.attach(ab, {"model", "train", "graph", "data", "eval"});

  auto* ex = app.add_subcommand("experiment", "train several model kinds over repeated seeds");
  ex->add_option("--data", p.data, "dataset directory")->required();
  ex->add_option("--splits", p.splits, "splits.json (default: train.split ratio)");
  ex->add_option("--config", p.config, "key = value config file");
  ex->add_option("--out", p.out, "output directory")->required();
  ex->add_option("--models", p.models, "comma-separated model kinds")
      ->default_str("pm25gnn,gru,mlp");
  ex->add_option("--jobs", jobs, "worker threads (default: train.jobs)");
  exp_flags.attach(ex, {"model", "train", "graph", "data", "eval"});

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (p.models.empty()) p.models = "pm25gnn,gru,mlp";
    const auto resolve_jobs = [&](const cfg::RunConfig& rc) {
      return jobs > 0 ? jobs : std::max<std::size_t>(1, rc.get_size("train.jobs"));
    };
    if (bg->parsed()) return cmd_build_graph(p, d_theta, m_theta, ridge_samples, out, err);
    if (gen->parsed()) return cmd_gen_synth(p, gen_flags.resolve(p.config), out);
    if (tr->parsed()) return cmd_train(p, train_flags.resolve(p.config), model_kind, out);
    if (ev->parsed()) {
      cfg::RunConfig rc = eval_flags.resolve(p.config);
      if (per_cell) rc.set("eval.per_cell_categorical", "true");
      return cmd_evaluate(p, rc, out);
    }
    if (pr->parsed()) return cmd_predict(p, predict_flags.resolve(p.config), out);
    if (ab->parsed()) {
      const cfg::RunConfig rc = ablate_flags.resolve(p.config);
      return cmd_ablate(p, rc, resolve_jobs(rc), out);
    }
    if (ex->parsed()) {
      const cfg::RunConfig rc = exp_flags.resolve(p.config);
      return cmd_experiment(p, rc, resolve_jobs(rc), out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const TrainingAborted& e) {
    err << "training aborted: " << e.what() << "\n";
    return 4;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace airgraph::cli
