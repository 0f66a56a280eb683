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

// Checkpoint directories: checkpoint.json (metadata, standardizer, tensor
// index) plus one KNT1 file per parameter tensor.

#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "airgraph/featurize.hpp"
#include "airgraph/model.hpp"

namespace airgraph::io {

inline constexpr int kCheckpointFormatVersion = 1;

struct Checkpoint {
  model::ModelSpec spec;
  model::FeatureDims dims;
  model::Precision precision = model::Precision::kFloat64;
  model::ParamSet<double> params;  // f32 models are widened exactly
  feat::Standardizer standardizer;
  std::map<std::string, std::string> config;  // flat key = value snapshot
  double d_theta_km = 0.0;
  double m_theta_m = 0.0;
  std::size_t ridge_samples = 0;
  feat::WindConvention wind_convention = feat::WindConvention::kToward;
  std::size_t horizon = 0;
  double final_val_loss = 0.0;
};

void save_checkpoint(const std::filesystem::path& dir, const Checkpoint& ckpt);

// Checks every tensor against the layout implied by the stored spec, and,
// when given, against `expected` (first mismatch named in the error).
Checkpoint load_checkpoint(const std::filesystem::path& dir,
                           const model::ModelSpec* expected = nullptr,
                           const model::FeatureDims* expected_dims = nullptr);

}  // namespace airgraph::io
