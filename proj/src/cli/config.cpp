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

#include "airgraph/config.hpp"

#include <algorithm>

#include "airgraph/dataio.hpp"
#include "airgraph/error.hpp"
#include "airgraph/textio.hpp"

namespace airgraph::cfg {

namespace {

std::string fmt(double v) { return text::format_double(v); }

std::vector<KeySpec> build_schema() {
  const synth::SynthConfig s;
  const model::ModelSpec m;
  const train::TrainingConfig t;
  return {
      {"synth.seed", std::to_string(s.seed), "seed of the synthetic world"},
      {"synth.n_cities", std::to_string(s.n_cities), "number of cities"},
      {"synth.lat_min", fmt(s.lat_min), "southern edge of the city box (deg)"},
      {"synth.lat_max", fmt(s.lat_max), "northern edge of the city box (deg)"},
      {"synth.lon_min", fmt(s.lon_min), "western edge of the city box (deg)"},
      {"synth.lon_max", fmt(s.lon_max), "eastern edge of the city box (deg)"},
      {"synth.min_separation_km", fmt(s.min_separation_km), "minimum distance between cities"},
      {"synth.n_timesteps", std::to_string(s.n_timesteps), "3-hour steps to generate"},
      {"synth.burn_in", std::to_string(s.burn_in), "discarded spin-up steps"},
      {"synth.t0", io::format_iso8601_utc(s.t0), "timestamp of the first kept step (UTC)"},
      {"synth.kappa", fmt(s.kappa), "transport gain"},
      {"synth.decay_base", fmt(s.decay_base), "retention per step before weather effects"},
      {"synth.pbl_weight", fmt(s.pbl_weight), "retention loss under a deep boundary layer"},
      {"synth.pbl_mid", fmt(s.pbl_mid), "boundary-layer height at half effect (m)"},
      {"synth.pbl_scale", fmt(s.pbl_scale), "width of the boundary-layer effect (m)"},
      {"synth.rain_weight", fmt(s.rain_weight), "retention loss at 1 mm of rain or more"},
      {"synth.emission_min", fmt(s.emission_min), "lowest per-city emission rate (ug/m3 per step)"},
      {"synth.emission_max", fmt(s.emission_max), "highest per-city emission rate"},
      {"synth.diurnal_amplitude", fmt(s.diurnal_amplitude), "relative daily emission swing"},
      {"synth.wind_u", fmt(s.wind_u), "regional mean eastward wind (m/s)"},
      {"synth.wind_v", fmt(s.wind_v), "regional mean northward wind (m/s)"},
      {"synth.wind_noise", fmt(s.wind_noise), "std of the regional wind anomaly (m/s)"},
      {"synth.local_wind_noise", fmt(s.local_wind_noise), "std of per-city wind anomalies (m/s)"},
      {"synth.wind_phi", fmt(s.wind_phi), "AR(1) persistence of wind anomalies"},
      {"synth.pbl_mean", fmt(s.pbl_mean), "mean boundary-layer height (m)"},
      {"synth.pbl_amplitude", fmt(s.pbl_amplitude), "daily boundary-layer swing (m)"},
      {"synth.pbl_noise", fmt(s.pbl_noise), "std of boundary-layer anomalies (m)"},
      {"synth.mountains", synth::format_mountains(s.mountains),
       "lat:lon:height_m:radius_deg items separated by ';'"},
      {"synth.grid_margin_deg", fmt(s.grid_margin_deg), "elevation grid margin around the box"},
      {"synth.grid_step_deg", fmt(s.grid_step_deg), "elevation grid spacing"},

      {"graph.d_theta_km", fmt(t.d_theta_km), "distance gate (km), connect if closer"},
      {"graph.m_theta_m", fmt(t.m_theta_m), "ridge gate (m), connect if lower"},
      {"graph.ridge_samples", std::to_string(t.ridge_samples), "terrain samples per city pair"},
      {"graph.wind_convention", std::string(feat::to_string(t.wind_convention)),
       "wind direction convention: toward or from"},

      {"model.kind", std::string(model::to_string(m.kind)),
       "pm25gnn, mlp, gru, lstm or nodesfc_gru"},
      {"model.edge_hidden", std::to_string(m.edge_hidden), "edge MLP hidden width"},
      {"model.edge_dim", std::to_string(m.edge_dim), "edge message width"},
      {"model.spatial_dim", std::to_string(m.spatial_dim), "aggregated spatial state width"},
      {"model.hidden_dim", std::to_string(m.hidden_dim), "recurrent state width"},
      {"model.mlp_hidden", std::to_string(m.mlp_hidden), "hidden width of the MLP baseline"},
      {"model.drop_pbl", "false", "ablation: remove the boundary-layer height feature"},
      {"model.no_export", "false", "ablation: drop the outgoing-message term"},

      {"train.epochs", std::to_string(t.epochs), "epoch cap"},
      {"train.lr", fmt(t.lr), "RMSprop learning rate"},
      {"train.rms_alpha", fmt(t.rms_alpha), "RMSprop smoothing constant"},
      {"train.rms_eps", fmt(t.rms_eps), "RMSprop epsilon"},
      {"train.batch_size", std::to_string(t.batch_size), "windows per update"},
      {"train.horizon", std::to_string(t.horizon), "forecast steps per window"},
      {"train.patience", std::to_string(t.patience), "early-stopping patience (epochs)"},
      {"train.seed", std::to_string(t.seed), "seed for initialization and shuffling"},
      {"train.precision", std::string(model::to_string(t.precision)), "f32 or f64"},
      {"train.max_batches_per_epoch", std::to_string(t.max_batches_per_epoch),
       "cap on updates per epoch, 0 = all windows"},
      {"train.eval_batch_size", std::to_string(t.eval_batch_size), "windows per evaluation batch"},
      {"train.repeats", "1", "seeds per model in experiments and ablations"},
      {"train.jobs", "1", "worker threads for multi-seed runs"},
      {"train.split", "2:1:1", "train:validate:test ratio used when no splits file is given"},

      {"data.max_fill_gap", std::to_string(t.max_fill_gap), "longest forward-filled PM2.5 gap"},

      {"eval.threshold", fmt(t.threshold), "pollution threshold (ug/m3), strict >"},
      {"eval.per_cell_categorical", "false", "average CSI/POD/FAR over cells instead of pooling"},
  };
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "' expects true or false, got '" + v + "'");
}

}  // namespace

const std::vector<KeySpec>& schema() {
  static const std::vector<KeySpec> s = build_schema();
  return s;
}

std::vector<KeySpec> section(std::string_view name) {
  std::vector<KeySpec> out;
  const std::string prefix = std::string(name) + ".";
  for (const KeySpec& k : schema()) {
    if (k.key.starts_with(prefix)) out.push_back(k);
  }
  return out;
}

RunConfig::RunConfig() {
  for (const KeySpec& k : schema()) values_[k.key] = k.default_value;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second = value;
}

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

void RunConfig::parse_text(std::string_view body, const std::string& origin) {
  std::size_t line_no = 0;
  for (std::string_view line : text::split(body, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(text::trim(line.substr(0, eq)));
    const std::string value(text::trim(line.substr(eq + 1)));
    if (!values_.contains(key)) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": unknown config key '" + key + "'");
    }
    values_[key] = value;
  }
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::string body;
  try {
    body = text::read_file(path);
  } catch (const DataError&) {
    throw ConfigError("config file not found: " + path.string());
  }
  parse_text(body, path.string());
}

double RunConfig::get_double(const std::string& key) const {
  try {
    return text::parse_double(get(key), key);
  } catch (const DataError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

long long RunConfig::get_int(const std::string& key) const {
  try {
    return text::parse_int(get(key), key);
  } catch (const DataError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

std::size_t RunConfig::get_size(const std::string& key) const {
  const long long v = get_int(key);
  if (v < 0) throw ConfigError("config key '" + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

bool RunConfig::get_bool(const std::string& key) const { return parse_bool(key, get(key)); }

synth::SynthConfig RunConfig::synth() const {
  synth::SynthConfig s;
  s.seed = static_cast<std::uint64_t>(get_size("synth.seed"));
  s.n_cities = get_size("synth.n_cities");
  s.lat_min = get_double("synth.lat_min");
  s.lat_max = get_double("synth.lat_max");
  s.lon_min = get_double("synth.lon_min");
  s.lon_max = get_double("synth.lon_max");
  s.min_separation_km = get_double("synth.min_separation_km");
  s.n_timesteps = get_size("synth.n_timesteps");
  s.burn_in = get_size("synth.burn_in");
  s.t0 = io::parse_iso8601_utc(get("synth.t0"));
  s.kappa = get_double("synth.kappa");
  s.decay_base = get_double("synth.decay_base");
  s.pbl_weight = get_double("synth.pbl_weight");
  s.pbl_mid = get_double("synth.pbl_mid");
  s.pbl_scale = get_double("synth.pbl_scale");
  s.rain_weight = get_double("synth.rain_weight");
  s.emission_min = get_double("synth.emission_min");
  s.emission_max = get_double("synth.emission_max");
  s.diurnal_amplitude = get_double("synth.diurnal_amplitude");
  s.wind_u = get_double("synth.wind_u");
  s.wind_v = get_double("synth.wind_v");
  s.wind_noise = get_double("synth.wind_noise");
  s.local_wind_noise = get_double("synth.local_wind_noise");
  s.wind_phi = get_double("synth.wind_phi");
  s.pbl_mean = get_double("synth.pbl_mean");
  s.pbl_amplitude = get_double("synth.pbl_amplitude");
  s.pbl_noise = get_double("synth.pbl_noise");
  s.mountains = synth::parse_mountains(get("synth.mountains"));
  s.grid_margin_deg = get_double("synth.grid_margin_deg");
  s.grid_step_deg = get_double("synth.grid_step_deg");
  s.d_theta_km = get_double("graph.d_theta_km");
  s.m_theta_m = get_double("graph.m_theta_m");
  s.validate();
  return s;
}

model::ModelSpec RunConfig::model() const {
  model::ModelSpec m;
  m.kind = model::parse_model_kind(get("model.kind"));
  m.edge_hidden = get_size("model.edge_hidden");
  m.edge_dim = get_size("model.edge_dim");
  m.spatial_dim = get_size("model.spatial_dim");
  m.hidden_dim = get_size("model.hidden_dim");
  m.mlp_hidden = get_size("model.mlp_hidden");
  m.drop_pbl = get_bool("model.drop_pbl");
  m.no_export = get_bool("model.no_export");
  m.seed = static_cast<std::uint64_t>(get_size("train.seed"));
  m.validate();
  return m;
}

train::TrainingConfig RunConfig::training() const {
  train::TrainingConfig t;
  t.epochs = get_size("train.epochs");
  t.lr = get_double("train.lr");
  t.rms_alpha = get_double("train.rms_alpha");
  t.rms_eps = get_double("train.rms_eps");
  t.batch_size = get_size("train.batch_size");
  t.horizon = get_size("train.horizon");
  t.patience = get_size("train.patience");
  t.seed = static_cast<std::uint64_t>(get_size("train.seed"));
  t.precision = model::parse_precision(get("train.precision"));
  t.max_batches_per_epoch = get_size("train.max_batches_per_epoch");
  t.eval_batch_size = get_size("train.eval_batch_size");
  t.d_theta_km = get_double("graph.d_theta_km");
  t.m_theta_m = get_double("graph.m_theta_m");
  t.ridge_samples = get_size("graph.ridge_samples");
  t.wind_convention = feat::parse_wind_convention(get("graph.wind_convention"));
  t.max_fill_gap = get_size("data.max_fill_gap");
  t.threshold = get_double("eval.threshold");
  t.per_cell_categorical = get_bool("eval.per_cell_categorical");
  t.validate();
  return t;
}

std::string RunConfig::dump() const {
  std::string out;
  for (const KeySpec& k : schema()) out += k.key + " = " + values_.at(k.key) + "\n";
  return out;
}

std::vector<double> parse_ratio(std::string_view body) {
  std::vector<double> out;
  for (std::string_view part : text::split(body, ':')) {
    try {
      out.push_back(text::parse_double(text::trim(part), "split ratio"));
    } catch (const DataError&) {
      throw ConfigError("split ratio '" + std::string(body) + "' must look like 2:1:1");
    }
  }
  if (out.size() != 3) throw ConfigError("split ratio '" + std::string(body) + "' needs three parts");
  return out;
}

}  // namespace airgraph::cfg
