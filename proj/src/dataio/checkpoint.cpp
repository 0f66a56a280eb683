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

#include "airgraph/checkpoint.hpp"

#include "json.hpp"

#include "airgraph/dataio.hpp"
#include "airgraph/error.hpp"
#include "airgraph/textio.hpp"

namespace airgraph::io {

namespace {

using Kind = DataError::Kind;
using nlohmann::json;

json spec_json(const model::ModelSpec& s) {
  return {{"kind", model::to_string(s.kind)},
          {"edge_hidden", s.edge_hidden},
          {"edge_dim", s.edge_dim},
          {"spatial_dim", s.spatial_dim},
          {"hidden_dim", s.hidden_dim},
          {"mlp_hidden", s.mlp_hidden},
          {"drop_pbl", s.drop_pbl},
          {"no_export", s.no_export},
          {"seed", s.seed}};
}

model::ModelSpec spec_from(const json& j) {
  model::ModelSpec s;
  s.kind = model::parse_model_kind(j.at("kind").get<std::string>());
  s.edge_hidden = j.at("edge_hidden").get<std::size_t>();
  s.edge_dim = j.at("edge_dim").get<std::size_t>();
  s.spatial_dim = j.at("spatial_dim").get<std::size_t>();
  s.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  s.mlp_hidden = j.at("mlp_hidden").get<std::size_t>();
  s.drop_pbl = j.at("drop_pbl").get<bool>();
  s.no_export = j.at("no_export").get<bool>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

json standardizer_json(const feat::Standardizer& s) {
  return {{"node_mean", s.node_mean}, {"node_std", s.node_std},
          {"edge_mean", s.edge_mean}, {"edge_std", s.edge_std},
          {"pm25_mean", s.pm25_mean}, {"pm25_std", s.pm25_std},
          {"warnings", s.warnings}};
}

feat::Standardizer standardizer_from(const json& j) {
  feat::Standardizer s;
  s.node_mean = j.at("node_mean").get<std::vector<double>>();
  s.node_std = j.at("node_std").get<std::vector<double>>();
  s.edge_mean = j.at("edge_mean").get<std::vector<double>>();
  s.edge_std = j.at("edge_std").get<std::vector<double>>();
  s.pm25_mean = j.at("pm25_mean").get<double>();
  s.pm25_std = j.at("pm25_std").get<double>();
  s.warnings = j.at("warnings").get<std::vector<std::string>>();
  s.fitted = true;
  return s;
}

void check_layout(const std::vector<model::ParamInfo>& layout, const model::ParamSet<double>& params,
                  const std::string& against) {
  for (std::size_t k = 0; k < std::max(layout.size(), params.size()); ++k) {
    if (k >= layout.size()) {
      throw DataError(Kind::kValidation, "checkpoint tensor '" + params.names[k] +
                                             "' has no counterpart in " + against);
    }
    if (k >= params.size()) {
      throw DataError(Kind::kValidation,
                      "checkpoint lacks tensor '" + layout[k].name + "' required by " + against);
    }
    if (layout[k].name != params.names[k] || layout[k].shape != params.values[k].shape()) {
      throw DataError(Kind::kValidation,
                      "checkpoint tensor '" + params.names[k] + "' " +
                          num::shape_str(params.values[k].shape()) + " does not match '" +
                          layout[k].name + "' " + num::shape_str(layout[k].shape) + " of " +
                          against);
    }
  }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& dir, const Checkpoint& ckpt) {
  std::filesystem::create_directories(dir);
  const Dtype dtype = ckpt.precision == model::Precision::kFloat32 ? Dtype::kF32 : Dtype::kF64;
  json tensors = json::array();
  for (std::size_t k = 0; k < ckpt.params.size(); ++k) {
    const std::string file = ckpt.params.names[k] + ".knt";
    const std::string bytes = encode_knt(ckpt.params.values[k], dtype);
    text::write_file_atomic(dir / file, bytes);
    tensors.push_back({{"name", ckpt.params.names[k]},
                       {"file", file},
                       {"shape", ckpt.params.values[k].shape()},
                       {"sha256", sha256_hex(bytes)}});
  }
  json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["spec"] = spec_json(ckpt.spec);
  j["dims"] = {{"node_features", ckpt.dims.node_features},
               {"edge_features", ckpt.dims.edge_features},
               {"num_nodes", ckpt.dims.num_nodes}};
  j["precision"] = model::to_string(ckpt.precision);
  j["standardizer"] = standardizer_json(ckpt.standardizer);
  j["config"] = ckpt.config;
  j["graph"] = {{"d_theta_km", ckpt.d_theta_km},
                {"m_theta_m", ckpt.m_theta_m},
                {"ridge_samples", ckpt.ridge_samples}};
  j["wind_convention"] = feat::to_string(ckpt.wind_convention);
  j["horizon"] = ckpt.horizon;
  j["final_val_loss"] = ckpt.final_val_loss;
  j["tensors"] = tensors;
  text::write_file_atomic(dir / "checkpoint.json", j.dump(2) + "\n");
}

Checkpoint load_checkpoint(const std::filesystem::path& dir, const model::ModelSpec* expected,
                           const model::FeatureDims* expected_dims) {
  const auto index = dir / "checkpoint.json";
  Checkpoint c;
  try {
    const json j = json::parse(text::read_file(index));
    const int version = j.at("format_version").get<int>();
    if (version != kCheckpointFormatVersion) {
      throw DataError(Kind::kVersionMismatch,
                      index.string() + ": checkpoint format version " + std::to_string(version) +
                          " is not supported (this build reads version " +
                          std::to_string(kCheckpointFormatVersion) +
                          "); retrain or re-export the checkpoint with a matching release");
    }
    c.spec = spec_from(j.at("spec"));
    c.dims.node_features = j.at("dims").at("node_features").get<std::size_t>();
    c.dims.edge_features = j.at("dims").at("edge_features").get<std::size_t>();
    c.dims.num_nodes = j.at("dims").at("num_nodes").get<std::size_t>();
    c.precision = model::parse_precision(j.at("precision").get<std::string>());
    c.standardizer = standardizer_from(j.at("standardizer"));
    c.config = j.at("config").get<std::map<std::string, std::string>>();
    c.d_theta_km = j.at("graph").at("d_theta_km").get<double>();
    c.m_theta_m = j.at("graph").at("m_theta_m").get<double>();
    c.ridge_samples = j.at("graph").at("ridge_samples").get<std::size_t>();
    c.wind_convention = feat::parse_wind_convention(j.at("wind_convention").get<std::string>());
    c.horizon = j.at("horizon").get<std::size_t>();
    c.final_val_loss = j.at("final_val_loss").get<double>();
    for (const json& t : j.at("tensors")) {
      const std::string name = t.at("name").get<std::string>();
      const std::string bytes = text::read_file(dir / t.at("file").get<std::string>());
      KntBlob blob = decode_knt(bytes, name);
      if (sha256_hex(bytes) != t.at("sha256").get<std::string>()) {
        throw DataError(Kind::kChecksumMismatch, "checkpoint tensor '" + name + "': checksum mismatch");
      }
      c.params.names.push_back(name);
      c.params.values.emplace_back(blob.shape, std::move(blob.values));
    }
  } catch (const json::exception& e) {
    throw DataError(Kind::kHeaderInconsistency, index.string() + ": " + e.what());
  } catch (const ConfigError& e) {
    throw DataError(Kind::kHeaderInconsistency, index.string() + ": " + e.what());
  }
  check_layout(model::param_layout(c.spec, c.dims), c.params, "the stored model spec");
  if (expected != nullptr) {
    const model::FeatureDims dims = expected_dims != nullptr ? *expected_dims : c.dims;
    check_layout(model::param_layout(*expected, dims), c.params, "the requested model spec");
  }
  return c;
}

}  // namespace airgraph::io
