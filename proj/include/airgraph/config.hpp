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

// Run configuration: one schema of `section.key` entries backs the config
// file parser, the command-line flags and their help text.
//
// File format: `key = value` per line, `#` starts a comment, blank lines are
// ignored. Unknown keys are errors.

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "airgraph/model.hpp"
#include "airgraph/synth.hpp"
#include "airgraph/train.hpp"

namespace airgraph::cfg {

inline constexpr const char* kVersion = "0.1.0";

struct KeySpec {
  std::string key;  // "section.name"
  std::string default_value;
  std::string help;
};

const std::vector<KeySpec>& schema();
// Entries whose key starts with "<section>.".
std::vector<KeySpec> section(std::string_view name);

class RunConfig {
 public:
  RunConfig();  // every key at its default

  // Throws ConfigError for an unknown key.
  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;
  void load_file(const std::filesystem::path& path);
  void parse_text(std::string_view text, const std::string& origin = "config");

  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  synth::SynthConfig synth() const;
  model::ModelSpec model() const;
  train::TrainingConfig training() const;

  const std::map<std::string, std::string>& values() const { return values_; }
  std::string dump() const;

 private:
  std::map<std::string, std::string> values_;
};

// "2:1:1" -> {2, 1, 1}.
std::vector<double> parse_ratio(std::string_view text);

}  // namespace airgraph::cfg
